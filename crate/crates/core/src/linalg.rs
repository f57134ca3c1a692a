//! Exact integer linear algebra: Smith normal form, determinants,
//! signatures and rational solving.
//!
//! Everything is generic over the integer scalar through [`ExactInt`], so
//! the same code runs on `i64` for tests and on `BigInt` in the pipeline.
//! No floating point anywhere.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, Zero};
use thiserror::Error;

/// Integer scalar usable by the exact routines.
pub trait ExactInt: Integer + Signed + Clone + FromPrimitive + std::fmt::Debug {}
impl<T: Integer + Signed + Clone + FromPrimitive + std::fmt::Debug> ExactInt for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square")]
    NotSquare,
}

pub type Mat<I> = Vec<Vec<I>>;

pub fn identity<I: ExactInt>(n: usize) -> Mat<I> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { I::one() } else { I::zero() }).collect())
        .collect()
}

pub fn mat_mul<I: ExactInt>(a: &Mat<I>, b: &Mat<I>) -> Mat<I> {
    let n = a.len();
    let m = if n > 0 { a[0].len() } else { 0 };
    let c = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = vec![vec![I::zero(); c]; n];
    for i in 0..n {
        for k in 0..m {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..c {
                let add = a[i][k].clone() * b[k][j].clone();
                out[i][j] = out[i][j].clone() + add;
            }
        }
    }
    out
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn determinant<I: ExactInt>(m: &Mat<I>) -> Result<I, LinalgError> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(LinalgError::NotSquare);
        }
    }
    if n == 0 {
        return Ok(I::one());
    }
    let mut a = m.to_vec();
    let mut sign = I::one();
    let mut prev = I::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(I::zero());
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                debug_assert!(num.clone().mod_floor(&prev).is_zero());
                a[i][j] = num / prev.clone();
            }
            a[i][k] = I::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(sign * a[n - 1][n - 1].clone())
}

/// Smith normal form: `u * m * v = d` with `u`, `v` unimodular and the
/// diagonal of `d` a divisibility chain of non-negative integers.
#[derive(Debug, Clone)]
pub struct Snf<I> {
    /// Diagonal entries (length = min(rows, cols)), divisibility chain.
    pub diagonal: Vec<I>,
    pub u: Mat<I>,
    pub v: Mat<I>,
}

pub fn smith_normal_form<I: ExactInt>(m: &Mat<I>) -> Snf<I> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut a = m.to_vec();
    let mut u = identity::<I>(rows);
    let mut v = identity::<I>(cols);

    let steps = rows.min(cols);
    for t in 0..steps {
        // Find a pivot of least nonzero magnitude.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if a[i][j].abs() < a[pi][pj].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            a.swap(pi, t);
            u.swap(pi, t);
        }
        if pj != t {
            swap_cols(&mut a, pj, t);
            swap_cols(&mut v, pj, t);
        }

        'reduce: loop {
            // Clear the pivot column by Euclidean steps.
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].clone().div_rem(&a[t][t]).0;
                row_sub(&mut a, i, t, &q);
                row_sub(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    a.swap(i, t);
                    u.swap(i, t);
                    continue 'reduce;
                }
            }
            // Clear the pivot row.
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].clone().div_rem(&a[t][t]).0;
                col_sub(&mut a, j, t, &q);
                col_sub(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, j, t);
                    swap_cols(&mut v, j, t);
                    continue 'reduce;
                }
            }
            // Enforce divisibility of the remaining block.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[i][j].clone().mod_floor(&a[t][t].abs()).is_zero() {
                        let one = I::one();
                        row_sub(&mut a, t, i, &-one.clone());
                        row_sub(&mut u, t, i, &-one);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        if a[t][t].is_negative() {
            row_neg(&mut a, t);
            row_neg(&mut u, t);
        }
    }
    let diagonal = (0..steps).map(|t| a[t][t].clone()).collect();
    Snf { diagonal, u, v }
}

fn swap_cols<I: Clone>(a: &mut Mat<I>, x: usize, y: usize) {
    for row in a.iter_mut() {
        row.swap(x, y);
    }
}

fn row_sub<I: ExactInt>(a: &mut Mat<I>, i: usize, t: usize, q: &I) {
    if q.is_zero() {
        return;
    }
    let src = a[t].clone();
    for (dst, s) in a[i].iter_mut().zip(src) {
        *dst = dst.clone() - q.clone() * s;
    }
}

fn col_sub<I: ExactInt>(a: &mut Mat<I>, j: usize, t: usize, q: &I) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let s = row[t].clone();
        row[j] = row[j].clone() - q.clone() * s;
    }
}

fn row_neg<I: ExactInt>(a: &mut Mat<I>, i: usize) {
    for x in a[i].iter_mut() {
        *x = -x.clone();
    }
}

/// Signature of a symmetric matrix by exact symmetric reduction over the
/// rationals, with hyperbolic handling of zero diagonals.
pub fn signature<I: ExactInt>(m: &Mat<I>) -> Result<i64, LinalgError> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(LinalgError::NotSquare);
        }
        for j in 0..n {
            if m[i][j] != m[j][i] {
                return Err(LinalgError::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<Ratio<I>>> = m
        .iter()
        .map(|r| r.iter().map(|x| Ratio::from_integer(x.clone())).collect())
        .collect();
    let mut sig = 0i64;
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                swap_cols(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // All remaining diagonal entries vanish: make one nonzero
                // by the congruence row_k += row_j, col_k += col_j.
                let src = a[j].clone();
                for (dst, s) in a[k].iter_mut().zip(src) {
                    *dst = dst.clone() + s;
                }
                for row in a.iter_mut() {
                    let s = row[j].clone();
                    row[k] = row[k].clone() + s;
                }
            } else {
                // Zero row: zero eigenvalue.
                k += 1;
                continue;
            }
        }
        if a[k][k].is_zero() {
            continue;
        }
        sig += if a[k][k].is_positive() { 1 } else { -1 };
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone() / a[k][k].clone();
            let src = a[k].clone();
            for (dst, s) in a[i].iter_mut().zip(src) {
                *dst = dst.clone() - f.clone() * s;
            }
            for row in a.iter_mut() {
                let s = row[k].clone();
                row[i] = row[i].clone() - f.clone() * s;
            }
        }
        k += 1;
    }
    Ok(sig)
}

/// Solves `m x = b` exactly over the rationals; `None` when `m` is
/// singular.
pub fn solve_rational<I: ExactInt>(m: &Mat<I>, b: &[Ratio<I>]) -> Option<Vec<Ratio<I>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut a: Vec<Vec<Ratio<I>>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            row.iter()
                .map(|x| Ratio::from_integer(x.clone()))
                .chain(std::iter::once(rhs.clone()))
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone() / a[k][k].clone();
            let src = a[k].clone();
            for (dst, s) in a[i].iter_mut().zip(src) {
                *dst = dst.clone() - f.clone() * s;
            }
        }
    }
    Some((0..n).map(|k| a[k][n].clone() / a[k][k].clone()).collect())
}

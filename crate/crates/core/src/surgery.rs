//! Surgery-diagram semantics: contact coefficients, linking presentation,
//! first homology and the d3 invariant.
//!
//! A surgery diagram is a closed front whose components each carry a role:
//! a surgery curve with a contact coefficient (a nonzero reduced rational,
//! measured against the contact framing) or a marked knot that is carried
//! along but generates no surgery. Homological data is computed over the
//! surgery curves.

use crate::front::{ComponentRef, ComponentStructure, FrontDiagram, FrontError, Rewritten};
use crate::linalg::{self, Mat};
use crate::{Int, Rat};
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Zero};
use thiserror::Error;

/// Reduced rational with positive denominator.
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentRole {
    SurgeryCurve { coefficient: Rational },
    MarkedKnot,
}

impl ComponentRole {
    pub fn plus_one() -> Self {
        ComponentRole::SurgeryCurve { coefficient: Rational::from_integer(1) }
    }
    pub fn minus_one() -> Self {
        ComponentRole::SurgeryCurve { coefficient: Rational::from_integer(-1) }
    }
    pub fn coefficient(&self) -> Option<Rational> {
        match self {
            ComponentRole::SurgeryCurve { coefficient } => Some(*coefficient),
            ComponentRole::MarkedKnot => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error("{roles} roles for {components} components")]
    RoleCountMismatch { components: usize, roles: usize },
    #[error("contact 0-surgery is excluded")]
    ZeroCoefficient,
    #[error("component {0} is a marked knot and has no coefficient")]
    MarkedKnotHasNoCoefficient(usize),
    #[error("diagram contains a marked knot")]
    ContainsMarkedKnot,
    #[error("invalid component index {0}")]
    InvalidComponent(usize),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// First homology of the surgered manifold in Smith normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyReport {
    pub free_rank: usize,
    /// Invariant factors `d1 | d2 | ...`, each at least 2.
    pub torsion: Vec<Int>,
}

impl HomologyReport {
    pub fn trivial() -> Self {
        HomologyReport { free_rank: 0, torsion: Vec::new() }
    }
}

impl std::fmt::Display for HomologyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The d3 invariant of the induced plane field, defined for diagrams all
/// of whose contact coefficients are +1 or -1 and whose linking
/// presentation is invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D3Report {
    pub defined: bool,
    pub reason: Option<String>,
    pub value: Rat,
    pub c_squared: Rat,
    pub sigma: i64,
    pub chi: i64,
    pub q_plus: i64,
}

impl D3Report {
    fn undefined(reason: &str) -> Self {
        D3Report {
            defined: false,
            reason: Some(reason.to_string()),
            value: Rat::zero(),
            c_squared: Rat::zero(),
            sigma: 0,
            chi: 0,
            q_plus: 0,
        }
    }
}

/// A front diagram with one role per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryDiagram {
    pub front: FrontDiagram,
    pub roles: Vec<ComponentRole>,
    /// Sharks already consumed by a destabilization.
    pub used_sharks: Vec<bool>,
}

impl SurgeryDiagram {
    pub fn new(front: FrontDiagram, roles: Vec<ComponentRole>) -> Result<Self, SurgeryError> {
        let n = front.component_count()?;
        if n != roles.len() {
            return Err(SurgeryError::RoleCountMismatch { components: n, roles: roles.len() });
        }
        for r in &roles {
            if let Some(c) = r.coefficient() {
                if c.is_zero() {
                    return Err(SurgeryError::ZeroCoefficient);
                }
            }
        }
        let used_sharks = vec![false; n];
        Ok(SurgeryDiagram { front, roles, used_sharks })
    }

    /// Empty diagram for the standard tight 3-sphere.
    pub fn empty() -> Self {
        SurgeryDiagram { front: FrontDiagram::empty(), roles: Vec::new(), used_sharks: Vec::new() }
    }

    pub fn component_count(&self) -> usize {
        self.roles.len()
    }

    /// Carries roles and shark bookkeeping through a front rewrite. Roles
    /// for components created by the rewrite (or role overrides, e.g. for
    /// merged components) are given in `overrides`.
    pub fn rebuild_from(
        &self,
        rw: &Rewritten,
        overrides: &[(usize, ComponentRole)],
    ) -> Result<SurgeryDiagram, SurgeryError> {
        let n = rw.structure.components.len();
        let mut roles: Vec<Option<ComponentRole>> = vec![None; n];
        let mut used: Vec<bool> = vec![false; n];
        for (old, target) in rw.old_to_new.iter().enumerate() {
            if let Some(nc) = *target {
                if roles[nc].is_none() {
                    roles[nc] = Some(self.roles[old]);
                    used[nc] = self.used_sharks[old];
                }
            }
        }
        for &(nc, role) in overrides {
            if nc >= n {
                return Err(SurgeryError::InvalidComponent(nc));
            }
            roles[nc] = Some(role);
        }
        let roles: Vec<ComponentRole> = roles
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or(SurgeryError::InvalidComponent(i)))
            .collect::<Result<_, _>>()?;
        Ok(SurgeryDiagram { front: rw.diagram.clone(), roles, used_sharks: used })
    }

    pub fn structure(&self) -> Result<ComponentStructure, SurgeryError> {
        Ok(self.front.validate()?)
    }

    /// Topological surgery coefficient: tb + contact coefficient.
    pub fn topological_coefficient(&self, c: ComponentRef) -> Result<Rational, SurgeryError> {
        let cs = self.structure()?;
        self.topological_coefficient_with(&cs, c)
    }

    pub(crate) fn topological_coefficient_with(
        &self,
        cs: &ComponentStructure,
        c: ComponentRef,
    ) -> Result<Rational, SurgeryError> {
        let role = self.roles.get(c.0).ok_or(SurgeryError::InvalidComponent(c.0))?;
        let coeff = role
            .coefficient()
            .ok_or(SurgeryError::MarkedKnotHasNoCoefficient(c.0))?;
        let tb = cs.classical(c)?.tb;
        Ok(coeff + Rational::from_integer(tb))
    }

    /// Indices of the surgery-curve components, in canonical order.
    pub fn surgery_curves(&self) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, ComponentRole::SurgeryCurve { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    /// Presentation matrix of the first homology over the surgery curves:
    /// with topological coefficient a_i / b_i in lowest terms the row is
    /// M_ii = a_i, M_ij = b_i * lk(i, j).
    pub(crate) fn presentation_matrix_restricted(
        &self,
        cs: &ComponentStructure,
    ) -> Result<(Vec<usize>, Mat<Int>), SurgeryError> {
        let curves = self.surgery_curves();
        let lk = cs.lk_matrix();
        let mut m = vec![vec![Int::zero(); curves.len()]; curves.len()];
        for (i, &ci) in curves.iter().enumerate() {
            let t = self.topological_coefficient_with(cs, ComponentRef(ci))?;
            let (a, b) = (*t.numer(), *t.denom());
            for (j, &cj) in curves.iter().enumerate() {
                m[i][j] = if i == j {
                    Int::from_i64(a).unwrap()
                } else {
                    Int::from_i64(b * lk[ci][cj]).unwrap()
                };
            }
        }
        Ok((curves, m))
    }

    /// Presentation matrix; requires every component to be a surgery
    /// curve.
    pub fn presentation_matrix(&self) -> Result<Mat<Int>, SurgeryError> {
        if self.roles.iter().any(|r| matches!(r, ComponentRole::MarkedKnot)) {
            return Err(SurgeryError::ContainsMarkedKnot);
        }
        let cs = self.structure()?;
        Ok(self.presentation_matrix_restricted(&cs)?.1)
    }

    /// First homology of the surgered manifold (computed over the surgery
    /// curves; marked knots are spectators).
    pub fn h1(&self) -> Result<HomologyReport, SurgeryError> {
        let cs = self.structure()?;
        self.h1_with(&cs)
    }

    pub(crate) fn h1_with(&self, cs: &ComponentStructure) -> Result<HomologyReport, SurgeryError> {
        let (_, m) = self.presentation_matrix_restricted(cs)?;
        Ok(homology_of_matrix(&m))
    }

    /// The d3 invariant. Undefined (with a reason) when a coefficient is
    /// not +1 or -1 or when the presentation matrix is singular.
    pub fn d3(&self) -> Result<D3Report, SurgeryError> {
        let cs = self.structure()?;
        self.d3_with(&cs)
    }

    pub(crate) fn d3_with(&self, cs: &ComponentStructure) -> Result<D3Report, SurgeryError> {
        let curves = self.surgery_curves();
        for &c in &curves {
            let coeff = self.roles[c].coefficient().unwrap();
            if !(coeff == Rational::from_integer(1) || coeff == Rational::from_integer(-1)) {
                return Ok(D3Report::undefined("rational coefficient present"));
            }
        }
        let (_, m) = self.presentation_matrix_restricted(cs)?;
        let det = linalg::determinant(&m)?;
        if det.is_zero() {
            return Ok(D3Report::undefined("singular presentation matrix"));
        }
        let rot: Vec<Rat> = curves
            .iter()
            .map(|&c| {
                Ok::<_, SurgeryError>(Rat::from_integer(
                    Int::from_i64(cs.classical(ComponentRef(c))?.rot).unwrap(),
                ))
            })
            .collect::<Result<_, _>>()?;
        let x = linalg::solve_rational(&m, &rot).expect("nonsingular by determinant check");
        let c_squared: Rat =
            x.iter().zip(&rot).fold(Rat::zero(), |acc, (xi, ri)| acc + xi.clone() * ri.clone());
        let sigma = linalg::signature(&m)?;
        let n = curves.len() as i64;
        let chi = 1 + n;
        let q_plus = curves
            .iter()
            .filter(|&&c| self.roles[c].coefficient().unwrap() == Rational::from_integer(1))
            .count() as i64;
        let value = (c_squared.clone()
            - Rat::from_integer(Int::from_i64(3 * sigma + 2 * chi).unwrap()))
            / Rat::from_integer(Int::from_i64(4).unwrap())
            + Rat::from_integer(Int::from_i64(q_plus).unwrap());
        Ok(D3Report {
            defined: true,
            reason: None,
            value,
            c_squared,
            sigma,
            chi,
            q_plus,
        })
    }
}

/// Cokernel of an integer matrix in Smith form.
pub fn homology_of_matrix(m: &Mat<Int>) -> HomologyReport {
    let n = m.len();
    let snf = linalg::smith_normal_form(m);
    let nonzero = snf.diagonal.iter().filter(|d| !d.is_zero()).count();
    let free_rank = n - nonzero;
    let torsion = snf
        .diagonal
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .cloned()
        .collect();
    HomologyReport { free_rank, torsion }
}

/// Solves the stabilization-matching equations k + m = -delta_framing,
/// k - m = delta_rotation for non-negative integers.
pub fn match_stabilizations(delta_framing: i64, delta_rotation: i64) -> Option<(i64, i64)> {
    let sum = -delta_framing;
    let diff = delta_rotation;
    if (sum + diff) % 2 != 0 {
        return None;
    }
    let k = (sum + diff) / 2;
    let m = (sum - diff) / 2;
    if k < 0 || m < 0 {
        return None;
    }
    Some((k, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::{Event, FrontDiagram, Site};

    fn unknot_with(coeff: i64) -> SurgeryDiagram {
        let d = FrontDiagram::closed(vec![Event::LeftCusp(1), Event::RightCusp(1)]).unwrap();
        SurgeryDiagram::new(
            d,
            vec![ComponentRole::SurgeryCurve { coefficient: Rational::from_integer(coeff) }],
        )
        .unwrap()
    }

    fn cancelling_pair() -> SurgeryDiagram {
        let d = FrontDiagram::closed(vec![Event::LeftCusp(1), Event::RightCusp(1)]).unwrap();
        let (out, copy) = d.pushoff(ComponentRef(0)).unwrap();
        let orig = out.old_to_new[0].unwrap();
        let mut roles = vec![ComponentRole::plus_one(); 2];
        roles[orig] = ComponentRole::minus_one();
        roles[copy.0] = ComponentRole::plus_one();
        SurgeryDiagram::new(out.diagram, roles).unwrap()
    }

    #[test]
    fn topological_coefficients() {
        assert_eq!(
            unknot_with(1).topological_coefficient(ComponentRef(0)).unwrap(),
            Rational::from_integer(0)
        );
        assert_eq!(
            unknot_with(-1).topological_coefficient(ComponentRef(0)).unwrap(),
            Rational::from_integer(-2)
        );
    }

    #[test]
    fn h1_examples() {
        assert_eq!(SurgeryDiagram::empty().h1().unwrap(), HomologyReport::trivial());
        // +1 on the tb = -1 unknot: topological 0, S^1 x S^2.
        let s = unknot_with(1).h1().unwrap();
        assert_eq!(s.free_rank, 1);
        assert!(s.torsion.is_empty());
        assert_eq!(cancelling_pair().h1().unwrap(), HomologyReport::trivial());
    }

    #[test]
    fn d3_examples() {
        let half = Rat::new(Int::from(-1), Int::from(2));
        let empty = SurgeryDiagram::empty().d3().unwrap();
        assert!(empty.defined);
        assert_eq!(empty.value, half);

        let pair = cancelling_pair().d3().unwrap();
        assert!(pair.defined);
        assert_eq!(pair.value, half);

        // Shark: +1 on the once-stabilized unknot shifts d3 to +1/2.
        let u = FrontDiagram::unknot_with_invariants(-2, 1, false).unwrap();
        let shark = SurgeryDiagram::new(u, vec![ComponentRole::plus_one()]).unwrap();
        let rep = shark.d3().unwrap();
        assert!(rep.defined);
        assert_eq!(rep.value, Rat::new(Int::from(1), Int::from(2)));
        assert_eq!(rep.sigma, -1);
        assert_eq!(rep.chi, 2);

        // Singular matrix: +1 unknot gives topological 0.
        let rep = unknot_with(1).d3().unwrap();
        assert!(!rep.defined);

        // Rational coefficient: undefined.
        let d = FrontDiagram::closed(vec![Event::LeftCusp(1), Event::RightCusp(1)]).unwrap();
        let sd = SurgeryDiagram::new(
            d,
            vec![ComponentRole::SurgeryCurve { coefficient: Rational::new(1, 2) }],
        )
        .unwrap();
        assert!(!sd.d3().unwrap().defined);
    }

    #[test]
    fn d3_orientation_invariance() {
        let pair = cancelling_pair();
        let before = pair.d3().unwrap();
        let rev = SurgeryDiagram {
            front: pair.front.reverse_orientation(ComponentRef(0)).unwrap(),
            roles: pair.roles.clone(),
            used_sharks: pair.used_sharks.clone(),
        };
        let after = rev.d3().unwrap();
        assert_eq!(before.value, after.value);
        assert_eq!(before.c_squared, after.c_squared);
    }

    #[test]
    fn stabilization_matching() {
        assert_eq!(match_stabilizations(0, 0), Some((0, 0)));
        assert_eq!(match_stabilizations(-2, 0), Some((1, 1)));
        assert_eq!(match_stabilizations(-1, 2), None);
        assert_eq!(match_stabilizations(2, 0), None);
    }

    #[test]
    fn marked_knots_are_spectators() {
        let d = FrontDiagram::closed(vec![
            Event::LeftCusp(1),
            Event::RightCusp(1),
            Event::LeftCusp(1),
            Event::RightCusp(1),
        ])
        .unwrap();
        let sd = SurgeryDiagram::new(
            d,
            vec![ComponentRole::MarkedKnot, ComponentRole::plus_one()],
        )
        .unwrap();
        assert!(sd.presentation_matrix().is_err());
        assert_eq!(sd.h1().unwrap().free_rank, 1);
    }

    #[test]
    fn rational_presentation_rule() {
        // tb = -1 unknot with contact coefficient -1/2: topological -3/2,
        // matrix [-3], H1 = Z/3.
        let d = FrontDiagram::closed(vec![Event::LeftCusp(1), Event::RightCusp(1)]).unwrap();
        let sd = SurgeryDiagram::new(
            d,
            vec![ComponentRole::SurgeryCurve { coefficient: Rational::new(-1, 2) }],
        )
        .unwrap();
        let m = sd.presentation_matrix().unwrap();
        assert_eq!(m, vec![vec![Int::from(-3)]]);
        let h = sd.h1().unwrap();
        assert_eq!(h.free_rank, 0);
        assert_eq!(h.torsion, vec![Int::from(3)]);
    }

    #[test]
    fn hopf_pair_meridian_form() {
        // Base unknot -1 with a meridian carrying +1: dets and d3 as for
        // the cancelling pair.
        let d = FrontDiagram::closed(vec![Event::LeftCusp(1), Event::RightCusp(1)]).unwrap();
        let (out, m) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
        let base = out.old_to_new[0].unwrap();
        let mut roles = vec![ComponentRole::plus_one(); 2];
        roles[base] = ComponentRole::minus_one();
        roles[m.0] = ComponentRole::plus_one();
        let sd = SurgeryDiagram::new(out.diagram, roles).unwrap();
        assert_eq!(sd.h1().unwrap(), HomologyReport::trivial());
        let rep = sd.d3().unwrap();
        assert!(rep.defined);
        assert_eq!(rep.value, Rat::new(Int::from(-1), Int::from(2)));
    }
}

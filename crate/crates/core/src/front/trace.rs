//! Component tracing: segments, directions, cusp and crossing data.
//!
//! A segment is a strand at a gap, addressed `(gap, pos)`. Segments are
//! joined through events (straight at pass-throughs and crossings, turning
//! at cusps) and through 1-handle identifications. Components are the
//! connected classes; the canonical order is by first segment in
//! `(gap, pos)` lexicographic order.

use super::{
    ClassicalInvariants, ComponentRef, DiagramKind, Event, FrontDiagram, FrontError, Orientation,
};

/// Traversal direction of a segment under the component orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Right,
    Left,
}

impl Dir {
    pub fn flipped(self) -> Dir {
        match self {
            Dir::Right => Dir::Left,
            Dir::Left => Dir::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CuspSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
pub struct CuspInfo {
    pub event: usize,
    pub side: CuspSide,
    pub pos: usize,
    pub component: usize,
    /// Traversal passes downward through the cusp.
    pub down: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct CrossingInfo {
    pub event: usize,
    pub pos: usize,
    /// Component of the over-strand (the descending one).
    pub over: usize,
    /// Component of the under-strand.
    pub under: usize,
    pub sign: i64,
}

#[derive(Debug, Clone)]
pub struct ComponentInfo {
    pub first_segment: (usize, usize),
    pub segments: usize,
    pub open: bool,
}

/// The traced structure of a validated diagram.
#[derive(Debug, Clone)]
pub struct ComponentStructure {
    /// Strands per gap.
    pub counts: Vec<usize>,
    /// `component[gap][pos - 1]` is the component id of that segment.
    pub component: Vec<Vec<usize>>,
    /// `dir[gap][pos - 1]` is the oriented direction of that segment.
    pub dir: Vec<Vec<Dir>>,
    pub components: Vec<ComponentInfo>,
    pub cusps: Vec<CuspInfo>,
    pub crossings: Vec<CrossingInfo>,
}

impl ComponentStructure {
    pub fn comp_of(&self, gap: usize, pos: usize) -> Option<usize> {
        self.component.get(gap)?.get(pos - 1).copied()
    }

    pub fn dir_of(&self, gap: usize, pos: usize) -> Option<Dir> {
        self.dir.get(gap)?.get(pos - 1).copied()
    }

    pub fn classical(&self, c: ComponentRef) -> Result<ClassicalInvariants, FrontError> {
        if c.0 >= self.components.len() {
            return Err(FrontError::InvalidComponent(c.0));
        }
        let mut writhe = 0i64;
        for x in &self.crossings {
            if x.over == c.0 && x.under == c.0 {
                writhe += x.sign;
            }
        }
        let mut right_cusps = 0i64;
        let mut up = 0i64;
        let mut down = 0i64;
        for cu in &self.cusps {
            if cu.component != c.0 {
                continue;
            }
            if cu.side == CuspSide::Right {
                right_cusps += 1;
            }
            if cu.down {
                down += 1;
            } else {
                up += 1;
            }
        }
        debug_assert!((down - up) % 2 == 0, "odd cusp imbalance");
        Ok(ClassicalInvariants {
            tb: writhe - right_cusps,
            rot: (down - up) / 2,
            writhe,
            right_cusps,
            up_cusps: up,
            down_cusps: down,
        })
    }

    pub fn lk(&self, c1: ComponentRef, c2: ComponentRef) -> Result<i64, FrontError> {
        if c1 == c2 {
            return Err(FrontError::SameComponent);
        }
        for c in [c1, c2] {
            let info =
                self.components.get(c.0).ok_or(FrontError::InvalidComponent(c.0))?;
            if info.open {
                return Err(FrontError::OpenComponent);
            }
        }
        let mut total = 0i64;
        for x in &self.crossings {
            if (x.over == c1.0 && x.under == c2.0) || (x.over == c2.0 && x.under == c1.0) {
                total += x.sign;
            }
        }
        debug_assert!(total % 2 == 0, "odd inter-crossing sum");
        Ok(total / 2)
    }

    /// Full symmetric linking matrix over the closed components.
    pub fn lk_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.components.len();
        let mut m = vec![vec![0i64; n]; n];
        for x in &self.crossings {
            if x.over != x.under {
                m[x.over][x.under] += x.sign;
                m[x.under][x.over] += x.sign;
            }
        }
        for row in &mut m {
            for e in row.iter_mut() {
                debug_assert!(*e % 2 == 0);
                *e /= 2;
            }
        }
        m
    }

    /// Count of geometric crossings between a component and everything else.
    pub fn inter_crossings_with_others(&self, c: usize, others_excluded: &[usize]) -> usize {
        self.crossings
            .iter()
            .filter(|x| {
                let (a, b) = (x.over, x.under);
                (a == c) != (b == c)
                    && !(others_excluded.contains(&a) || others_excluded.contains(&b))
            })
            .count()
    }
}

const NO_EDGE: usize = usize::MAX;

struct SegGraph {
    counts: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
    /// Per segment: (neighbor-at-left-end, flips), (neighbor-at-right-end, flips).
    left: Vec<(usize, bool)>,
    right: Vec<(usize, bool)>,
}

impl SegGraph {
    fn seg(&self, gap: usize, pos: usize) -> usize {
        self.offsets[gap] + pos - 1
    }

    fn build(d: &FrontDiagram) -> Result<SegGraph, FrontError> {
        let counts = d.strand_counts()?;
        let mut offsets = Vec::with_capacity(counts.len() + 1);
        let mut total = 0;
        for &c in &counts {
            offsets.push(total);
            total += c;
        }
        let mut g = SegGraph {
            counts,
            offsets,
            total,
            left: vec![(NO_EDGE, false); total],
            right: vec![(NO_EDGE, false); total],
        };
        for (e, ev) in d.events.iter().enumerate() {
            let k = g.counts[e];
            match *ev {
                Event::LeftCusp(p) => {
                    for q in 1..=k {
                        let q2 = if q < p { q } else { q + 2 };
                        g.connect_straight(e, q, q2);
                    }
                    let a = g.seg(e + 1, p);
                    let b = g.seg(e + 1, p + 1);
                    g.left[a] = (b, true);
                    g.left[b] = (a, true);
                }
                Event::RightCusp(p) => {
                    for q in 1..=k {
                        if q == p || q == p + 1 {
                            continue;
                        }
                        let q2 = if q < p { q } else { q - 2 };
                        g.connect_straight(e, q, q2);
                    }
                    let a = g.seg(e, p);
                    let b = g.seg(e, p + 1);
                    g.right[a] = (b, true);
                    g.right[b] = (a, true);
                }
                Event::Crossing(p) => {
                    for q in 1..=k {
                        if q == p || q == p + 1 {
                            continue;
                        }
                        g.connect_straight(e, q, q);
                    }
                    g.connect_straight(e, p, p + 1);
                    g.connect_straight(e, p + 1, p);
                }
            }
        }
        if let DiagramKind::StandardForm { .. } = d.kind {
            let last = d.events.len();
            for h in &d.handles {
                for i in 0..h.size {
                    let r = g.seg(last, h.right_start + i);
                    let l = g.seg(0, h.left_start + i);
                    g.right[r] = (l, false);
                    g.left[l] = (r, false);
                }
            }
        }
        Ok(g)
    }

    fn connect_straight(&mut self, e: usize, from_pos: usize, to_pos: usize) {
        let a = self.seg(e, from_pos);
        let b = self.seg(e + 1, to_pos);
        self.right[a] = (b, false);
        self.left[b] = (a, false);
    }
}

/// Number of components, ignoring orientation flags.
pub(super) fn trace_unoriented(d: &FrontDiagram) -> Result<usize, FrontError> {
    let g = SegGraph::build(d)?;
    Ok(assign_components(&g).1)
}

fn assign_components(g: &SegGraph) -> (Vec<usize>, usize) {
    let mut comp = vec![usize::MAX; g.total];
    let mut next = 0;
    for start in 0..g.total {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = next;
        next += 1;
        let mut stack = vec![start];
        comp[start] = id;
        while let Some(s) = stack.pop() {
            for (n, _) in [g.left[s], g.right[s]] {
                if n != NO_EDGE && comp[n] == usize::MAX {
                    comp[n] = id;
                    stack.push(n);
                }
            }
        }
    }
    (comp, next)
}

pub(super) fn trace(d: &FrontDiagram) -> Result<ComponentStructure, FrontError> {
    let g = SegGraph::build(d)?;
    let (comp, n) = assign_components(&g);

    if d.orientations.len() != n {
        return Err(FrontError::OrientationMissing {
            components: n,
            found: d.orientations.len(),
        });
    }

    // Directions normalized to Plus (first segment rightward), then the
    // component flags are applied.
    let mut dir = vec![Dir::Right; g.total];
    let mut seen = vec![false; g.total];
    let mut first_segment = vec![usize::MAX; n];
    let mut seg_count = vec![0usize; n];
    let mut open = vec![false; n];
    for s in 0..g.total {
        let c = comp[s];
        seg_count[c] += 1;
        if first_segment[c] == usize::MAX {
            first_segment[c] = s;
        }
        if g.left[s].0 == NO_EDGE || g.right[s].0 == NO_EDGE {
            open[c] = true;
        }
    }
    for c in 0..n {
        let start = first_segment[c];
        dir[start] = match d.orientations[c] {
            Orientation::Plus => Dir::Right,
            Orientation::Minus => Dir::Left,
        };
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for (nb, flip) in [g.left[s], g.right[s]] {
                if nb == NO_EDGE {
                    continue;
                }
                let nd = if flip { dir[s].flipped() } else { dir[s] };
                if seen[nb] {
                    debug_assert_eq!(dir[nb], nd, "inconsistent direction propagation");
                } else {
                    dir[nb] = nd;
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
    }

    match d.kind {
        DiagramKind::Long => {
            let open_count = open.iter().filter(|&&o| o).count();
            if open_count != 1 {
                return Err(FrontError::OpenComponentCount { found: open_count });
            }
        }
        DiagramKind::Closed | DiagramKind::StandardForm { .. } => {
            debug_assert!(open.iter().all(|&o| !o));
        }
    }

    let per_gap = |v: &Vec<usize>| -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(g.counts.len());
        for gap in 0..g.counts.len() {
            let mut row = Vec::with_capacity(g.counts[gap]);
            for pos in 1..=g.counts[gap] {
                row.push(v[g.offsets[gap] + pos - 1]);
            }
            out.push(row);
        }
        out
    };
    let component = per_gap(&comp);
    let dir_rows: Vec<Vec<Dir>> = {
        let mut out = Vec::with_capacity(g.counts.len());
        for gap in 0..g.counts.len() {
            let mut row = Vec::with_capacity(g.counts[gap]);
            for pos in 1..=g.counts[gap] {
                row.push(dir[g.offsets[gap] + pos - 1]);
            }
            out.push(row);
        }
        out
    };

    let mut cusps = Vec::new();
    let mut crossings = Vec::new();
    for (e, ev) in d.events.iter().enumerate() {
        match *ev {
            Event::LeftCusp(p) => {
                let u = g.seg(e + 1, p);
                let l = g.seg(e + 1, p + 1);
                // Left cusp: upper exiting rightward means the traversal
                // turns upward through the cusp.
                let down = match (dir[u], dir[l]) {
                    (Dir::Right, Dir::Left) => false,
                    (Dir::Left, Dir::Right) => true,
                    other => unreachable!("cusp branches aligned: {:?}", other),
                };
                cusps.push(CuspInfo { event: e, side: CuspSide::Left, pos: p, component: comp[u], down });
            }
            Event::RightCusp(p) => {
                let u = g.seg(e, p);
                let l = g.seg(e, p + 1);
                let down = match (dir[u], dir[l]) {
                    (Dir::Right, Dir::Left) => true,
                    (Dir::Left, Dir::Right) => false,
                    other => unreachable!("cusp branches aligned: {:?}", other),
                };
                cusps.push(CuspInfo { event: e, side: CuspSide::Right, pos: p, component: comp[u], down });
            }
            Event::Crossing(p) => {
                let over = g.seg(e, p);
                let under = g.seg(e, p + 1);
                let sign = if dir[over] == dir[under] { 1 } else { -1 };
                crossings.push(CrossingInfo {
                    event: e,
                    pos: p,
                    over: comp[over],
                    under: comp[under],
                    sign,
                });
            }
        }
    }

    let components = (0..n)
        .map(|c| {
            let s = first_segment[c];
            let gap = match g.offsets.binary_search(&s) {
                Ok(i) => {
                    // offsets may repeat for zero-strand gaps; take the last
                    // gap whose offset equals s and has strands.
                    let mut i = i;
                    while i + 1 < g.offsets.len() && g.offsets[i + 1] == s {
                        i += 1;
                    }
                    i
                }
                Err(i) => i - 1,
            };
            let pos = s - g.offsets[gap] + 1;
            ComponentInfo { first_segment: (gap, pos), segments: seg_count[c], open: open[c] }
        })
        .collect();

    Ok(ComponentStructure {
        counts: g.counts,
        component,
        dir: dir_rows,
        components,
        cusps,
        crossings,
    })
}

//! Legendrian fronts as event words.
//!
//! A front diagram is a word of [`Event`]s read left to right. Between
//! consecutive events the diagram is a stack of horizontal strands,
//! numbered `1..=k` from the top. A left cusp inserts two adjacent
//! strands, a right cusp merges two adjacent strands, a crossing swaps
//! them. The strand with the more negative slope is always in front, so
//! at a crossing the descending strand (upper before, lower after) is the
//! over-strand.

mod ops;
mod trace;

pub use ops::{Rewritten, Sign};
pub(crate) use ops::rebuild as ops_rebuild;
pub use trace::{ComponentInfo, ComponentStructure, CrossingInfo, CuspInfo, CuspSide, Dir};

use std::fmt;
use thiserror::Error;

/// One event of a front word. Positions are 1-based and count strands
/// from the top of the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// Births strands `pos`, `pos + 1`. Requires `1 <= pos <= k + 1`.
    LeftCusp(usize),
    /// Merges strands `pos`, `pos + 1`. Requires `1 <= pos <= k - 1`.
    RightCusp(usize),
    /// Swaps strands `pos`, `pos + 1`. Requires `1 <= pos <= k - 1`.
    Crossing(usize),
}

impl Event {
    pub fn pos(&self) -> usize {
        match *self {
            Event::LeftCusp(p) | Event::RightCusp(p) | Event::Crossing(p) => p,
        }
    }

    /// Strand count after the event, given the count before.
    pub fn apply_count(&self, k: usize) -> Option<usize> {
        match *self {
            Event::LeftCusp(p) if p >= 1 && p <= k + 1 => Some(k + 2),
            Event::RightCusp(p) if k >= 2 && p >= 1 && p <= k - 1 => Some(k - 2),
            Event::Crossing(p) if k >= 2 && p >= 1 && p <= k - 1 => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Event::LeftCusp(p) => write!(f, "L{}", p),
            Event::RightCusp(p) => write!(f, "R{}", p),
            Event::Crossing(p) => write!(f, "X{}", p),
        }
    }
}

/// The global shape of a front word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramKind {
    /// Starts and ends with zero strands; all components closed.
    Closed,
    /// Starts and ends with one strand, the two ends of the long knot.
    Long,
    /// Starts and ends with `boundary` strands which are attached to
    /// 1-handles; every boundary strand must be covered by a handle block.
    StandardForm { boundary: usize },
}

impl DiagramKind {
    pub fn boundary(&self) -> usize {
        match *self {
            DiagramKind::Closed => 0,
            DiagramKind::Long => 1,
            DiagramKind::StandardForm { boundary } => boundary,
        }
    }
}

/// A 1-handle in a standard-form diagram: `size` consecutive left-boundary
/// strands starting at `left_start` are identified in order with the
/// right-boundary strands starting at `right_start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Handle {
    pub left_start: usize,
    pub right_start: usize,
    pub size: usize,
}

impl Handle {
    pub fn left_range(&self) -> std::ops::Range<usize> {
        self.left_start..self.left_start + self.size
    }
    pub fn right_range(&self) -> std::ops::Range<usize> {
        self.right_start..self.right_start + self.size
    }
}

/// Orientation flag of a component: `Plus` directs the component's first
/// segment (in canonical order) rightward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }
}

/// Canonical index of a component. Components are ordered by the first
/// occurrence of one of their segments, scanning gaps left to right and
/// positions top to bottom. Indices are recomputed after every rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentRef(pub usize);

/// An address inside a diagram: `gap` counts the slices between events
/// (`0` is before the first event), `pos` is a strand position at that
/// gap. `pos2` addresses a second strand for two-strand sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub gap: usize,
    pub pos: usize,
    pub pos2: Option<usize>,
}

impl Site {
    pub fn new(gap: usize, pos: usize) -> Self {
        Site { gap, pos, pos2: None }
    }
    pub fn pair(gap: usize, pos: usize, pos2: usize) -> Self {
        Site { gap, pos, pos2: Some(pos2) }
    }
}

/// Classical invariants of one component, computed from the front word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalInvariants {
    pub tb: i64,
    pub rot: i64,
    pub writhe: i64,
    pub right_cusps: i64,
    pub up_cusps: i64,
    pub down_cusps: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontError {
    #[error("event {index} ({event}) is out of range for {strands} strands")]
    PositionOutOfRange { index: usize, event: String, strands: usize },
    #[error("word ends with {found} strands, expected {expected}")]
    BoundaryMismatch { expected: usize, found: usize },
    #[error("{found} orientation flags for {components} components")]
    OrientationMissing { components: usize, found: usize },
    #[error("long diagram has {found} open components, expected exactly one")]
    OpenComponentCount { found: usize },
    #[error("handle blocks overlap or exceed the boundary")]
    HandleBlocksInvalid,
    #[error("boundary strand {pos} is not covered by any handle block")]
    UncoveredBoundaryStrand { pos: usize },
    #[error("invalid component index {0}")]
    InvalidComponent(usize),
    #[error("site gap {gap} pos {pos} is not valid here")]
    InvalidSite { gap: usize, pos: usize },
    #[error("site does not lie on the requested component")]
    SiteNotOnComponent,
    #[error("components must be distinct")]
    SameComponent,
    #[error("operation requires a closed component")]
    OpenComponent,
    #[error("no removable zigzag at the given site")]
    NoZigzagAtSite,
    #[error("the two strands cannot be coherently oriented; reverse one component first")]
    OrientationConflict,
    #[error("diagram is not a long diagram")]
    NotLong,
    #[error("no unknot with tb {tb} and rot {rot} exists")]
    Unrealizable { tb: i64, rot: i64 },
    #[error("route crosses a standard-form boundary")]
    BlockedByBoundary,
    #[error("events at gap {gap} overlap and cannot commute")]
    Overlapping { gap: usize },
    #[error("no gap shared by both components")]
    NoCommonGap,
}

/// A Legendrian front diagram: event word, kind, handle data and one
/// orientation flag per component (in canonical component order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontDiagram {
    pub kind: DiagramKind,
    pub events: Vec<Event>,
    pub handles: Vec<Handle>,
    pub orientations: Vec<Orientation>,
}

impl FrontDiagram {
    /// Empty closed diagram (the empty link).
    pub fn empty() -> Self {
        FrontDiagram {
            kind: DiagramKind::Closed,
            events: Vec::new(),
            handles: Vec::new(),
            orientations: Vec::new(),
        }
    }

    /// Builds a closed diagram from a word, tracing components and
    /// assigning `Plus` orientation to each.
    pub fn closed(events: Vec<Event>) -> Result<Self, FrontError> {
        Self::with_kind(DiagramKind::Closed, events, Vec::new())
    }

    /// Builds a long diagram from a word, `Plus` orientations.
    pub fn long(events: Vec<Event>) -> Result<Self, FrontError> {
        Self::with_kind(DiagramKind::Long, events, Vec::new())
    }

    pub fn with_kind(
        kind: DiagramKind,
        events: Vec<Event>,
        handles: Vec<Handle>,
    ) -> Result<Self, FrontError> {
        let mut d = FrontDiagram { kind, events, handles, orientations: Vec::new() };
        let n = d.count_components()?;
        d.orientations = vec![Orientation::Plus; n];
        d.validate()?;
        Ok(d)
    }

    /// Strand counts at every gap, or the first position error.
    pub fn strand_counts(&self) -> Result<Vec<usize>, FrontError> {
        let mut counts = Vec::with_capacity(self.events.len() + 1);
        let mut k = self.kind.boundary();
        counts.push(k);
        for (index, ev) in self.events.iter().enumerate() {
            k = ev.apply_count(k).ok_or(FrontError::PositionOutOfRange {
                index,
                event: ev.to_string(),
                strands: k,
            })?;
            counts.push(k);
        }
        if k != self.kind.boundary() {
            return Err(FrontError::BoundaryMismatch { expected: self.kind.boundary(), found: k });
        }
        Ok(counts)
    }

    fn count_components(&self) -> Result<usize, FrontError> {
        let cs = trace::trace_unoriented(self)?;
        Ok(cs)
    }

    /// Full validation: position legality, boundary, handle blocks, open
    /// component count and orientation flags, then the traced structure.
    pub fn validate(&self) -> Result<ComponentStructure, FrontError> {
        if let DiagramKind::StandardForm { boundary } = self.kind {
            let mut covered = vec![false; boundary];
            for h in &self.handles {
                if h.size == 0
                    || h.left_start == 0
                    || h.right_start == 0
                    || h.left_start + h.size - 1 > boundary
                    || h.right_start + h.size - 1 > boundary
                {
                    return Err(FrontError::HandleBlocksInvalid);
                }
                for p in h.left_range() {
                    if covered[p - 1] {
                        return Err(FrontError::HandleBlocksInvalid);
                    }
                    covered[p - 1] = true;
                }
            }
            let mut right_covered = vec![false; boundary];
            for h in &self.handles {
                for p in h.right_range() {
                    if right_covered[p - 1] {
                        return Err(FrontError::HandleBlocksInvalid);
                    }
                    right_covered[p - 1] = true;
                }
            }
            if let Some(p) = covered.iter().position(|c| !c) {
                return Err(FrontError::UncoveredBoundaryStrand { pos: p + 1 });
            }
            if let Some(p) = right_covered.iter().position(|c| !c) {
                return Err(FrontError::UncoveredBoundaryStrand { pos: p + 1 });
            }
        } else if !self.handles.is_empty() {
            return Err(FrontError::HandleBlocksInvalid);
        }
        trace::trace(self)
    }

    /// Number of components (after successful validation).
    pub fn component_count(&self) -> Result<usize, FrontError> {
        Ok(self.validate()?.components.len())
    }

    /// Classical invariants of one component.
    pub fn classical(&self, c: ComponentRef) -> Result<ClassicalInvariants, FrontError> {
        let cs = self.validate()?;
        cs.classical(c)
    }

    /// Linking number of two distinct closed components.
    pub fn lk(&self, c1: ComponentRef, c2: ComponentRef) -> Result<i64, FrontError> {
        let cs = self.validate()?;
        cs.lk(c1, c2)
    }

    /// Reverses the orientation flag of a component.
    pub fn reverse_orientation(&self, c: ComponentRef) -> Result<FrontDiagram, FrontError> {
        let cs = self.validate()?;
        if c.0 >= cs.components.len() {
            return Err(FrontError::InvalidComponent(c.0));
        }
        let mut d = self.clone();
        d.orientations[c.0] = d.orientations[c.0].reversed();
        Ok(d)
    }
}

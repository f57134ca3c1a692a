//! Legendrian Reidemeister moves and neutral word rewrites.
//!
//! The move variants are data: `data/r_move_variants.txt` lists each local
//! pattern, and this module interprets it. Every rewrite preserves tb and
//! rot of every component and all linking numbers; far commutation swaps
//! two events acting on disjoint strand ranges.

use crate::front::{Event, FrontDiagram, FrontError, Rewritten, Site};
use std::sync::OnceLock;
use thiserror::Error;

pub const VARIANT_TABLE_SOURCE: &str = include_str!("../data/r_move_variants.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RKind {
    R1,
    R2,
    R3,
}

impl std::fmt::Display for RKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RKind::R1 => write!(f, "r1"),
            RKind::R2 => write!(f, "r2"),
            RKind::R3 => write!(f, "r3"),
        }
    }
}

/// A move selector: kind, variant name from the table, and direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMove {
    pub kind: RKind,
    pub variant: String,
    pub forward: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Letter {
    L,
    R,
    X,
}

#[derive(Debug, Clone)]
pub struct Variant {
    pub kind: RKind,
    pub name: String,
    lhs: Vec<(Letter, i64)>,
    rhs: Vec<(Letter, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("unknown move variant {kind} {variant}")]
    UnknownVariant { kind: String, variant: String },
    #[error("pattern does not match at gap {gap}")]
    PatternMismatch { gap: usize },
    #[error(transparent)]
    Front(#[from] FrontError),
}

fn parse_pattern(s: &str) -> Vec<(Letter, i64)> {
    s.split_whitespace()
        .map(|tok| {
            let letter = match &tok[..1] {
                "L" => Letter::L,
                "R" => Letter::R,
                "X" => Letter::X,
                other => panic!("bad pattern letter {other}"),
            };
            let off: i64 = tok[1..].parse().expect("bad pattern offset");
            (letter, off)
        })
        .collect()
}

/// The published variant table, parsed from the data file.
pub fn variants() -> &'static [Variant] {
    static TABLE: OnceLock<Vec<Variant>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::new();
        for line in VARIANT_TABLE_SOURCE.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, body) = line.split_once('|').expect("missing | in variant line");
            let mut head_it = head.split_whitespace();
            let kind = match head_it.next().expect("missing kind") {
                "R1" => RKind::R1,
                "R2" => RKind::R2,
                "R3" => RKind::R3,
                other => panic!("bad kind {other}"),
            };
            let name = head_it.next().expect("missing variant name").to_string();
            let (lhs, rhs) = body.split_once("->").expect("missing -> in variant line");
            out.push(Variant {
                kind,
                name,
                lhs: parse_pattern(lhs),
                rhs: parse_pattern(rhs),
            });
        }
        out
    })
}

fn find_variant(kind: RKind, name: &str) -> Result<&'static Variant, RewriteError> {
    variants()
        .iter()
        .find(|v| v.kind == kind && v.name == name)
        .ok_or_else(|| RewriteError::UnknownVariant {
            kind: kind.to_string(),
            variant: name.to_string(),
        })
}

fn event_of(letter: Letter, pos: i64) -> Option<Event> {
    if pos < 1 {
        return None;
    }
    let p = pos as usize;
    Some(match letter {
        Letter::L => Event::LeftCusp(p),
        Letter::R => Event::RightCusp(p),
        Letter::X => Event::Crossing(p),
    })
}

fn letter_of(ev: Event) -> (Letter, i64) {
    match ev {
        Event::LeftCusp(p) => (Letter::L, p as i64),
        Event::RightCusp(p) => (Letter::R, p as i64),
        Event::Crossing(p) => (Letter::X, p as i64),
    }
}

/// Matches `pattern` against `events[i..]`, returning the anchor p.
fn match_pattern(events: &[Event], i: usize, pattern: &[(Letter, i64)]) -> Option<i64> {
    if pattern.is_empty() || i + pattern.len() > events.len() {
        return None;
    }
    let (l0, off0) = pattern[0];
    let (el, ep) = letter_of(events[i]);
    if el != l0 {
        return None;
    }
    let p = ep - off0;
    if p < 1 {
        return None;
    }
    for (j, &(lj, offj)) in pattern.iter().enumerate().skip(1) {
        let (al, ap) = letter_of(events[i + j]);
        if al != lj || ap != p + offj {
            return None;
        }
    }
    Some(p)
}

/// A replayable record of one rewrite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRecord {
    pub mv: RMove,
    pub site: Site,
    pub before_hash: u64,
    pub after_hash: u64,
}

/// FNV-1a hash of an event word.
pub fn word_hash(events: &[Event]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |b: u64| {
        h ^= b;
        h = h.wrapping_mul(0x100000001b3);
    };
    for ev in events {
        let (l, p) = letter_of(*ev);
        eat(match l {
            Letter::L => 1,
            Letter::R => 2,
            Letter::X => 3,
        });
        eat(p as u64);
    }
    h
}

impl FrontDiagram {
    /// All (site, variant) pairs at which the move applies. Sites for
    /// pattern-matching moves use `gap` as the index of the first matched
    /// event; insertion moves (empty LHS, forward) use (gap, strand).
    pub fn applicable_sites(&self, kind: RKind, forward: bool) -> Vec<(Site, String)> {
        let mut out = Vec::new();
        let Ok(counts) = self.strand_counts() else { return out };
        for v in variants().iter().filter(|v| v.kind == kind) {
            let (from, _to) = if forward { (&v.lhs, &v.rhs) } else { (&v.rhs, &v.lhs) };
            if from.is_empty() {
                for gap in 0..counts.len() {
                    for pos in 1..=counts[gap] {
                        if self
                            .apply_reidemeister(
                                &RMove { kind, variant: v.name.clone(), forward },
                                Site::new(gap, pos),
                            )
                            .is_ok()
                        {
                            out.push((Site::new(gap, pos), v.name.clone()));
                        }
                    }
                }
            } else {
                for i in 0..self.events.len() {
                    if let Some(p) = match_pattern(&self.events, i, from) {
                        if self
                            .apply_reidemeister(
                                &RMove { kind, variant: v.name.clone(), forward },
                                Site::new(i, p as usize),
                            )
                            .is_ok()
                        {
                            out.push((Site::new(i, p as usize), v.name.clone()));
                        }
                    }
                }
            }
        }
        out
    }

    /// Applies a Reidemeister move at the site. For insertion moves the
    /// site is (gap, strand position); otherwise `site.gap` is the index
    /// of the first event of the matched pattern and `site.pos` the
    /// anchor.
    pub fn apply_reidemeister(
        &self,
        mv: &RMove,
        site: Site,
    ) -> Result<(Rewritten, RewriteRecord), RewriteError> {
        let v = find_variant(mv.kind, &mv.variant)?;
        let (from, to) = if mv.forward { (&v.lhs, &v.rhs) } else { (&v.rhs, &v.lhs) };
        let cs = self.validate()?;
        let before_hash = word_hash(&self.events);

        let mut events = self.events.clone();
        let at;
        if from.is_empty() {
            // Insertion at (gap, strand pos).
            if site.gap >= cs.counts.len() || site.pos == 0 || site.pos > cs.counts[site.gap] {
                return Err(RewriteError::PatternMismatch { gap: site.gap });
            }
            at = site.gap;
            let p = site.pos as i64;
            let mut block = Vec::with_capacity(to.len());
            for &(l, off) in to {
                block.push(
                    event_of(l, p + off).ok_or(RewriteError::PatternMismatch { gap: site.gap })?,
                );
            }
            events.splice(at..at, block);
        } else {
            let i = site.gap;
            let p = match_pattern(&self.events, i, from)
                .filter(|&p| p as usize == site.pos)
                .ok_or(RewriteError::PatternMismatch { gap: i })?;
            at = i;
            let mut block = Vec::with_capacity(to.len());
            for &(l, off) in to {
                block.push(event_of(l, p + off).ok_or(RewriteError::PatternMismatch { gap: i })?);
            }
            events.splice(i..i + from.len(), block);
        }

        let removed = from.len();
        let added = to.len();
        let rewritten = crate::front::ops_rebuild(
            &cs,
            self.kind,
            self.handles.clone(),
            events,
            &move |g, pos| {
                if g <= at {
                    Some((g, pos))
                } else if g < at + removed {
                    None
                } else {
                    Some((g + added - removed, pos))
                }
            },
        )
        .map_err(|e| match e {
            FrontError::PositionOutOfRange { .. } | FrontError::BoundaryMismatch { .. } => {
                RewriteError::PatternMismatch { gap: at }
            }
            other => RewriteError::Front(other),
        })?;

        let record = RewriteRecord {
            mv: mv.clone(),
            site,
            before_hash,
            after_hash: word_hash(&rewritten.diagram.events),
        };
        Ok((rewritten, record))
    }

    /// Swaps the events at `gap` and `gap + 1` when they act on disjoint
    /// strand ranges, re-indexing positions.
    pub fn far_commute(&self, gap: usize) -> Result<Rewritten, FrontError> {
        if gap + 1 >= self.events.len() {
            return Err(FrontError::InvalidSite { gap, pos: 0 });
        }
        let cs = self.validate()?;
        let (e2p, e1p) = commute_pair(self.events[gap], self.events[gap + 1])
            .ok_or(FrontError::Overlapping { gap })?;
        let mut events = self.events.clone();
        events[gap] = e2p;
        events[gap + 1] = e1p;
        crate::front::ops_rebuild(&cs, self.kind, self.handles.clone(), events, &move |g, p| {
            if g == gap + 1 {
                None
            } else {
                Some((g, p))
            }
        })
    }

    /// Canonical word: greedy far-commutation into the least
    /// lexicographic order (by position, then cusp kind). Idempotent and
    /// preserves the diagram up to planar isotopy.
    pub fn canonicalize(&self) -> FrontDiagram {
        let mut d = self.clone();
        loop {
            let mut changed = false;
            for i in 0..d.events.len().saturating_sub(1) {
                let (a, b) = (d.events[i], d.events[i + 1]);
                if let Some((b2, a2)) = commute_pair(a, b) {
                    if event_key(b2, a2) < event_key(a, b) {
                        if let Ok(r) = d.far_commute(i) {
                            d = r.diagram;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }
}

fn rank(ev: Event) -> u8 {
    match ev {
        Event::LeftCusp(_) => 0,
        Event::Crossing(_) => 1,
        Event::RightCusp(_) => 2,
    }
}

fn event_key(a: Event, b: Event) -> (u8, usize, u8, usize) {
    (rank(a), a.pos(), rank(b), b.pos())
}

/// If `e1` then `e2` commute, returns the swapped pair `(e2', e1')`.
fn commute_pair(e1: Event, e2: Event) -> Option<(Event, Event)> {
    use Event::*;
    let some = |a: Event, b: Event| Some((a, b));
    match (e1, e2) {
        (LeftCusp(a), LeftCusp(b)) => {
            if b <= a {
                some(LeftCusp(b), LeftCusp(a + 2))
            } else if b >= a + 2 {
                some(LeftCusp(b - 2), LeftCusp(a))
            } else {
                None
            }
        }
        (LeftCusp(a), RightCusp(b)) => {
            if b + 2 <= a {
                some(RightCusp(b), LeftCusp(a - 2))
            } else if b >= a + 2 {
                some(RightCusp(b - 2), LeftCusp(a))
            } else {
                None
            }
        }
        (LeftCusp(a), Crossing(b)) => {
            if b + 2 <= a {
                some(Crossing(b), LeftCusp(a))
            } else if b >= a + 2 {
                some(Crossing(b - 2), LeftCusp(a))
            } else {
                None
            }
        }
        (RightCusp(a), LeftCusp(b)) => {
            if b <= a.saturating_sub(1) && b >= 1 {
                some(LeftCusp(b), RightCusp(a + 2))
            } else {
                some(LeftCusp(b + 2), RightCusp(a))
            }
        }
        (RightCusp(a), RightCusp(b)) => {
            if b + 2 <= a {
                some(RightCusp(b), RightCusp(a - 2))
            } else if b >= a {
                some(RightCusp(b + 2), RightCusp(a))
            } else {
                None
            }
        }
        (RightCusp(a), Crossing(b)) => {
            if b + 2 <= a {
                some(Crossing(b), RightCusp(a))
            } else if b >= a {
                some(Crossing(b + 2), RightCusp(a))
            } else {
                None
            }
        }
        (Crossing(a), LeftCusp(b)) => {
            if b <= a {
                some(LeftCusp(b), Crossing(a + 2))
            } else if b >= a + 2 {
                some(LeftCusp(b), Crossing(a))
            } else {
                None
            }
        }
        (Crossing(a), RightCusp(b)) => {
            if b + 2 <= a {
                some(RightCusp(b), Crossing(a - 2))
            } else if b >= a + 2 {
                some(RightCusp(b), Crossing(a))
            } else {
                None
            }
        }
        (Crossing(a), Crossing(b)) => {
            if b + 2 <= a || b >= a + 2 {
                some(Crossing(b), Crossing(a))
            } else {
                None
            }
        }
    }
}

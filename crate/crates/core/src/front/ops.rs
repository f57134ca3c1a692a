//! Elementary constructions on front words.
//!
//! Every operation is pure: it builds a new event word, re-traces it and
//! carries component orientations and identities across via a segment map
//! from surviving old segments to their new addresses.

use super::trace::Dir;
use super::{
    ComponentRef, ComponentStructure, DiagramKind, Event, FrontDiagram, FrontError, Handle,
    Orientation, Site,
};

/// Result of a rewriting operation: the new diagram, its trace, and the
/// mapping from old component indices to new ones (None = deleted).
#[derive(Debug)]
pub struct Rewritten {
    pub diagram: FrontDiagram,
    pub structure: ComponentStructure,
    pub old_to_new: Vec<Option<usize>>,
}

/// Sign of a stabilization or twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

pub(crate) fn rebuild(
    old_cs: &ComponentStructure,
    kind: DiagramKind,
    handles: Vec<Handle>,
    events: Vec<Event>,
    seg_map: &dyn Fn(usize, usize) -> Option<(usize, usize)>,
) -> Result<Rewritten, FrontError> {
    let mut nd = FrontDiagram { kind, events, handles, orientations: Vec::new() };
    let n = super::trace::trace_unoriented(&nd)?;
    nd.orientations = vec![Orientation::Plus; n];
    let cs0 = nd.validate()?;

    let mut flags: Vec<Option<Orientation>> = vec![None; n];
    let mut old_to_new = vec![None; old_cs.components.len()];
    let flag_for = |old_gap: usize, old_pos: usize, g: usize, p: usize| {
        let desired = old_cs.dir[old_gap][old_pos - 1];
        let actual = cs0.dir[g][p - 1];
        if desired == actual {
            Orientation::Plus
        } else {
            Orientation::Minus
        }
    };
    // First pass: one representative per old component (its earliest
    // surviving segment) fixes the mapping and the orientation flag.
    for oc in 0..old_cs.components.len() {
        'outer: for gap in 0..old_cs.counts.len() {
            for pos in 1..=old_cs.counts[gap] {
                if old_cs.component[gap][pos - 1] != oc {
                    continue;
                }
                let Some((g, p)) = seg_map(gap, pos) else { continue };
                let Some(nc) = cs0.comp_of(g, p) else { continue };
                old_to_new[oc] = Some(nc);
                if flags[nc].is_none() {
                    flags[nc] = Some(flag_for(gap, pos, g, p));
                }
                break 'outer;
            }
        }
    }
    // Second pass, only when a new component is still unflagged (a split
    // created a second piece of an old component): flag it from any of
    // the old component's remaining segments.
    if flags.iter().any(|f| f.is_none()) {
        for oc in 0..old_cs.components.len() {
            for gap in 0..old_cs.counts.len() {
                for pos in 1..=old_cs.counts[gap] {
                    if old_cs.component[gap][pos - 1] != oc {
                        continue;
                    }
                    let Some((g, p)) = seg_map(gap, pos) else { continue };
                    let Some(nc) = cs0.comp_of(g, p) else { continue };
                    if flags[nc].is_none() {
                        flags[nc] = Some(flag_for(gap, pos, g, p));
                    }
                }
            }
        }
    }
    nd.orientations = flags.into_iter().map(|f| f.unwrap_or(Orientation::Plus)).collect();
    let structure = nd.validate()?;
    Ok(Rewritten { diagram: nd, structure, old_to_new })
}

/// Flips the orientation flag of the component containing `seg` so that
/// the segment's direction becomes `desired`.
pub(crate) fn orient_segment(
    d: &mut FrontDiagram,
    seg: (usize, usize),
    desired: Dir,
) -> Result<ComponentStructure, FrontError> {
    let cs = d.validate()?;
    let comp = cs.comp_of(seg.0, seg.1).ok_or(FrontError::InvalidSite { gap: seg.0, pos: seg.1 })?;
    if cs.dir[seg.0][seg.1 - 1] != desired {
        d.orientations[comp] = d.orientations[comp].reversed();
        return d.validate();
    }
    Ok(cs)
}

fn shifted(ev: Event, delta: isize) -> Event {
    let p = (ev.pos() as isize + delta) as usize;
    match ev {
        Event::LeftCusp(_) => Event::LeftCusp(p),
        Event::RightCusp(_) => Event::RightCusp(p),
        Event::Crossing(_) => Event::Crossing(p),
    }
}

/// Inserts a block of events at `gap`; the surviving segment map is the
/// identity away from the block.
fn insert_block(
    d: &FrontDiagram,
    cs: &ComponentStructure,
    gap: usize,
    block: Vec<Event>,
) -> Result<Rewritten, FrontError> {
    let len = block.len();
    let mut events = d.events.clone();
    events.splice(gap..gap, block);
    rebuild(cs, d.kind, d.handles.clone(), events, &move |g, p| {
        if g <= gap {
            Some((g, p))
        } else {
            Some((g + len, p))
        }
    })
}

fn check_site(cs: &ComponentStructure, site: Site) -> Result<(), FrontError> {
    if site.gap >= cs.counts.len() || site.pos == 0 || site.pos > cs.counts[site.gap] {
        return Err(FrontError::InvalidSite { gap: site.gap, pos: site.pos });
    }
    Ok(())
}

fn check_site_on(cs: &ComponentStructure, site: Site, c: ComponentRef) -> Result<(), FrontError> {
    check_site(cs, site)?;
    if c.0 >= cs.components.len() {
        return Err(FrontError::InvalidComponent(c.0));
    }
    if cs.component[site.gap][site.pos - 1] != c.0 {
        return Err(FrontError::SiteNotOnComponent);
    }
    Ok(())
}

impl FrontDiagram {
    /// Adds a zigzag on component `c` at `site`. `Plus` makes both new
    /// cusps traverse downward (rot + 1), `Minus` upward (rot - 1); tb
    /// drops by one either way.
    pub fn stabilize(&self, c: ComponentRef, sign: Sign, site: Site) -> Result<Rewritten, FrontError> {
        let cs = self.validate()?;
        check_site_on(&cs, site, c)?;
        let p = site.pos;
        let dir = cs.dir[site.gap][p - 1];
        let below = match (sign, dir) {
            (Sign::Plus, Dir::Right) | (Sign::Minus, Dir::Left) => true,
            (Sign::Plus, Dir::Left) | (Sign::Minus, Dir::Right) => false,
        };
        let block = if below {
            vec![Event::LeftCusp(p + 1), Event::RightCusp(p)]
        } else {
            vec![Event::LeftCusp(p), Event::RightCusp(p + 1)]
        };
        insert_block(self, &cs, site.gap, block)
    }

    /// Removes the zigzag formed by the two adjacent events starting at
    /// `site.gap`, the inverse of [`FrontDiagram::stabilize`].
    pub fn destabilize(&self, site: Site) -> Result<Rewritten, FrontError> {
        let cs = self.validate()?;
        let i = site.gap;
        if i + 1 >= self.events.len() {
            return Err(FrontError::NoZigzagAtSite);
        }
        let ok = match (self.events[i], self.events[i + 1]) {
            (Event::LeftCusp(a), Event::RightCusp(b)) => b + 1 == a || b == a + 1,
            _ => false,
        };
        if !ok {
            return Err(FrontError::NoZigzagAtSite);
        }
        let mut events = self.events.clone();
        events.drain(i..i + 2);
        rebuild(&cs, self.kind, self.handles.clone(), events, &move |g, p| {
            if g <= i {
                Some((g, p))
            } else if g == i + 1 {
                None
            } else {
                Some((g - 2, p))
            }
        })
    }

    /// Adds a small self-loop on `c` at `site`: one crossing and one cusp
    /// pair. A positive twist leaves tb unchanged, a negative one drops
    /// it by two; the writhe changes by the twist sign.
    pub fn add_twist(&self, c: ComponentRef, sign: Sign, site: Site) -> Result<Rewritten, FrontError> {
        let cs = self.validate()?;
        check_site_on(&cs, site, c)?;
        let p = site.pos;
        let block = match sign {
            Sign::Plus => vec![Event::LeftCusp(p + 1), Event::Crossing(p), Event::RightCusp(p + 1)],
            Sign::Minus => vec![Event::LeftCusp(p + 1), Event::Crossing(p + 1), Event::RightCusp(p)],
        };
        insert_block(self, &cs, site.gap, block)
    }

    /// Saddle move reconnecting the two adjacent strands `site.pos`,
    /// `site.pos + 1`. The strands must be anti-parallel.
    pub fn pinch(&self, site: Site) -> Result<Rewritten, FrontError> {
        let cs = self.validate()?;
        check_site(&cs, site)?;
        let p = site.pos;
        if let Some(p2) = site.pos2 {
            if p2 != p + 1 {
                return Err(FrontError::InvalidSite { gap: site.gap, pos: p2 });
            }
        }
        if p + 1 > cs.counts[site.gap] {
            return Err(FrontError::InvalidSite { gap: site.gap, pos: p + 1 });
        }
        if cs.dir[site.gap][p - 1] == cs.dir[site.gap][p] {
            return Err(FrontError::OrientationConflict);
        }
        insert_block(self, &cs, site.gap, vec![Event::RightCusp(p), Event::LeftCusp(p)])
    }

    /// Legendrian band-sum of two distinct components along a vertical
    /// corridor at a common gap. The two strands must be anti-parallel;
    /// strands in between are crossed twice with cancelling signs. The
    /// merged component satisfies tb = tb1 + tb2 + 2 lk + 1 and
    /// rot = rot1 + rot2.
    pub fn connect_sum(
        &self,
        c1: ComponentRef,
        site1: Site,
        c2: ComponentRef,
        site2: Site,
    ) -> Result<Rewritten, FrontError> {
        if c1 == c2 {
            return Err(FrontError::SameComponent);
        }
        let cs = self.validate()?;
        check_site_on(&cs, site1, c1)?;
        check_site_on(&cs, site2, c2)?;
        if site1.gap != site2.gap {
            return Err(FrontError::NoCommonGap);
        }
        if site1.pos == site2.pos {
            return Err(FrontError::InvalidSite { gap: site2.gap, pos: site2.pos });
        }
        let gap = site1.gap;
        let (upper, lower) = if site1.pos < site2.pos {
            (site1.pos, site2.pos)
        } else {
            (site2.pos, site1.pos)
        };
        if cs.dir[gap][upper - 1] == cs.dir[gap][lower - 1] {
            return Err(FrontError::OrientationConflict);
        }
        insert_block(self, &cs, gap, band_block(upper, lower))
    }

    /// Inserts a standard Legendrian meridian around the strand of `c` at
    /// `site`: a two-cusp oval whose upper arc crosses the strand twice
    /// with equal signs. Returns the meridian's component.
    pub fn insert_meridian(
        &self,
        c: ComponentRef,
        site: Site,
    ) -> Result<(Rewritten, ComponentRef), FrontError> {
        let cs = self.validate()?;
        check_site_on(&cs, site, c)?;
        let p = site.pos;
        let block = vec![
            Event::LeftCusp(p + 1),
            Event::Crossing(p),
            Event::Crossing(p),
            Event::RightCusp(p + 1),
        ];
        let out = insert_block(self, &cs, site.gap, block)?;
        let m = out
            .structure
            .comp_of(site.gap + 1, p + 1)
            .ok_or(FrontError::InvalidSite { gap: site.gap, pos: p })?;
        Ok((out, ComponentRef(m)))
    }

    /// Encircles the `count` adjacent strands starting at `site.pos` with
    /// one meridian oval (one pass per strand). Used for 1-handle
    /// replacement.
    pub fn insert_meridian_around(
        &self,
        site: Site,
        count: usize,
    ) -> Result<(Rewritten, ComponentRef), FrontError> {
        let cs = self.validate()?;
        check_site(&cs, site)?;
        let p = site.pos;
        if count == 0 || p + count - 1 > cs.counts[site.gap] {
            return Err(FrontError::InvalidSite { gap: site.gap, pos: p + count - 1 });
        }
        let mut block = vec![Event::LeftCusp(p + count)];
        for i in (0..count).rev() {
            block.push(Event::Crossing(p + i));
        }
        for i in 0..count {
            block.push(Event::Crossing(p + i));
        }
        block.push(Event::RightCusp(p + count));
        let out = insert_block(self, &cs, site.gap, block)?;
        let m = out
            .structure
            .comp_of(site.gap + 1, p + count)
            .ok_or(FrontError::InvalidSite { gap: site.gap, pos: p })?;
        Ok((out, ComponentRef(m)))
    }

    /// Doubles component `c`: every strand receives a parallel copy
    /// directly above it. The copy has the classical invariants of `c`,
    /// links it `tb(c)` times and links everything else like `c` does.
    pub fn pushoff(&self, c: ComponentRef) -> Result<(Rewritten, ComponentRef), FrontError> {
        let cs = self.validate()?;
        let info = cs.components.get(c.0).ok_or(FrontError::InvalidComponent(c.0))?;
        if info.open {
            return Err(FrontError::OpenComponent);
        }

        // widths[p-1] = 2 when old strand p belongs to c.
        let mut widths: Vec<usize> =
            (1..=cs.counts[0]).map(|p| if cs.component[0][p - 1] == c.0 { 2 } else { 1 }).collect();
        let base = |w: &Vec<usize>, p: usize| -> usize { 1 + w[..p - 1].iter().sum::<usize>() };

        let mut new_events: Vec<Event> = Vec::with_capacity(self.events.len() * 2);
        let mut gap_of = Vec::with_capacity(cs.counts.len());
        let mut widths_at = Vec::with_capacity(cs.counts.len());
        gap_of.push(0);
        widths_at.push(widths.clone());
        for (e, ev) in self.events.iter().enumerate() {
            match *ev {
                Event::LeftCusp(p) => {
                    let b = base(&widths, p);
                    let v = if cs.component[e + 1][p - 1] == c.0 { 2 } else { 1 };
                    if v == 2 {
                        new_events.extend([
                            Event::LeftCusp(b),
                            Event::LeftCusp(b + 2),
                            Event::Crossing(b + 1),
                        ]);
                    } else {
                        new_events.push(Event::LeftCusp(b));
                    }
                    widths.splice(p - 1..p - 1, [v, v]);
                }
                Event::RightCusp(p) => {
                    let b = base(&widths, p);
                    let v = widths[p - 1];
                    debug_assert_eq!(v, widths[p]);
                    if v == 2 {
                        new_events.extend([
                            Event::Crossing(b + 1),
                            Event::RightCusp(b + 2),
                            Event::RightCusp(b),
                        ]);
                    } else {
                        new_events.push(Event::RightCusp(b));
                    }
                    widths.drain(p - 1..p + 1);
                }
                Event::Crossing(p) => {
                    let b = base(&widths, p);
                    match (widths[p - 1], widths[p]) {
                        (1, 1) => new_events.push(Event::Crossing(b)),
                        (2, 1) => new_events.extend([Event::Crossing(b + 1), Event::Crossing(b)]),
                        (1, 2) => new_events.extend([Event::Crossing(b), Event::Crossing(b + 1)]),
                        (2, 2) => new_events.extend([
                            Event::Crossing(b + 1),
                            Event::Crossing(b),
                            Event::Crossing(b + 2),
                            Event::Crossing(b + 1),
                        ]),
                        other => unreachable!("widths {:?}", other),
                    }
                    widths.swap(p - 1, p);
                }
            }
            gap_of.push(new_events.len());
            widths_at.push(widths.clone());
        }

        let widths_for_map = widths_at.clone();
        let gap_for_map = gap_of.clone();
        let comp_rows = cs.component.clone();
        let cid = c.0;
        let out = rebuild(
            &cs,
            self.kind,
            self.handles.clone(),
            new_events,
            &move |g, p| {
                let w = &widths_for_map[g];
                let b = 1 + w[..p - 1].iter().sum::<usize>();
                let off = if comp_rows[g][p - 1] == cid { 1 } else { 0 };
                Some((gap_for_map[g], b + off))
            },
        )?;

        // Identify and orient the copy parallel to the original.
        let (g0, p0) = info.first_segment;
        let wb = 1 + widths_at[g0][..p0 - 1].iter().sum::<usize>();
        let copy_seg = (gap_of[g0], wb);
        let desired = cs.dir[g0][p0 - 1];
        let mut diagram = out.diagram;
        let structure = orient_segment(&mut diagram, copy_seg, desired)?;
        let copy = structure
            .comp_of(copy_seg.0, copy_seg.1)
            .ok_or(FrontError::InvalidComponent(c.0))?;
        Ok((
            Rewritten { diagram, structure, old_to_new: out.old_to_new },
            ComponentRef(copy),
        ))
    }

    /// Closes a long diagram over the top: tb drops by one, rot is kept.
    pub fn complete_long(&self) -> Result<Rewritten, FrontError> {
        if self.kind != DiagramKind::Long {
            return Err(FrontError::NotLong);
        }
        let cs = self.validate()?;
        let mut events = Vec::with_capacity(self.events.len() + 2);
        events.push(Event::LeftCusp(1));
        events.extend(self.events.iter().map(|&e| shifted(e, 1)));
        events.push(Event::RightCusp(1));
        rebuild(&cs, DiagramKind::Closed, Vec::new(), events, &|g, p| Some((g + 1, p + 1)))
    }

    /// Pokes a two-strand finger of the component at `from` to `to.pos`
    /// at the same gap. Every strand in between is crossed twice with
    /// opposite signs; tb, rot and all linking numbers are unchanged.
    pub fn route_finger(&self, from: Site, to: Site) -> Result<Rewritten, FrontError> {
        let cs = self.validate()?;
        check_site(&cs, from)?;
        if from.gap != to.gap {
            return Err(FrontError::NoCommonGap);
        }
        if let DiagramKind::StandardForm { .. } = self.kind {
            if from.gap == 0 || from.gap == self.events.len() {
                return Err(FrontError::BlockedByBoundary);
            }
        }
        if to.pos == 0 || to.pos > cs.counts[from.gap] + 1 {
            return Err(FrontError::InvalidSite { gap: to.gap, pos: to.pos });
        }
        let p = from.pos;
        let block = if to.pos > p {
            let m = to.pos - p - 1;
            let mut b = vec![Event::LeftCusp(p + 1), Event::Crossing(p)];
            for i in 1..=m {
                b.push(Event::Crossing(p + i + 1));
                b.push(Event::Crossing(p + i));
            }
            b.push(Event::RightCusp(p + m + 1));
            b
        } else if to.pos < p {
            let m = p - to.pos;
            let mut b = vec![Event::LeftCusp(p), Event::Crossing(p + 1)];
            for i in 1..=m {
                b.push(Event::Crossing(p - i));
                b.push(Event::Crossing(p - i + 1));
            }
            b.push(Event::RightCusp(p - m));
            b
        } else {
            vec![Event::LeftCusp(p + 1), Event::Crossing(p), Event::RightCusp(p + 1)]
        };
        insert_block(self, &cs, from.gap, block)
    }

    /// Standard Legendrian unknot word with the requested invariants.
    pub fn unknot_with_invariants(tb: i64, rot: i64, long: bool) -> Result<FrontDiagram, FrontError> {
        let realizable = if long {
            tb + rot.abs() <= 0 && (tb + rot).rem_euclid(2) == 0
        } else {
            tb + rot.abs() <= -1 && (tb + rot).rem_euclid(2) == 1
        };
        if !realizable {
            return Err(FrontError::Unrealizable { tb, rot });
        }
        let base_tb = if long { 0 } else { -1 };
        let pairs = (base_tb - tb - rot.abs()) / 2;
        let mut d = if long {
            FrontDiagram::long(Vec::new())?
        } else {
            FrontDiagram::closed(vec![Event::LeftCusp(1), Event::RightCusp(1)])?
        };
        let site = if long { Site::new(0, 1) } else { Site::new(1, 1) };
        let stab = |d: &FrontDiagram, s: Sign| -> Result<FrontDiagram, FrontError> {
            Ok(d.stabilize(ComponentRef(0), s, site)?.diagram)
        };
        for _ in 0..rot.abs() {
            d = stab(&d, if rot > 0 { Sign::Plus } else { Sign::Minus })?;
        }
        for _ in 0..pairs {
            d = stab(&d, Sign::Plus)?;
            d = stab(&d, Sign::Minus)?;
        }
        Ok(d)
    }

    /// Removes whole components from the diagram. Crossings with the
    /// removed components disappear; everything else keeps its shape.
    pub fn delete_components(&self, comps: &[usize]) -> Result<Rewritten, FrontError> {
        let cs = self.validate()?;
        for &c in comps {
            if c >= cs.components.len() {
                return Err(FrontError::InvalidComponent(c));
            }
            if cs.components[c].open {
                return Err(FrontError::OpenComponent);
            }
        }
        let dead = |g: usize, p: usize| comps.contains(&cs.component[g][p - 1]);
        let new_pos = |g: usize, p: usize| -> usize {
            p - (1..p).filter(|&q| dead(g, q)).count()
        };
        let mut events = Vec::new();
        // retained_before[g] = number of kept events before gap g.
        let mut retained_before = vec![0usize; cs.counts.len()];
        for (e, ev) in self.events.iter().enumerate() {
            retained_before[e] = events.len();
            match *ev {
                Event::LeftCusp(p) => {
                    if !dead(e + 1, p) {
                        events.push(Event::LeftCusp(new_pos(e + 1, p)));
                    }
                }
                Event::RightCusp(p) => {
                    if !dead(e, p) {
                        events.push(Event::RightCusp(new_pos(e, p)));
                    }
                }
                Event::Crossing(p) => {
                    if !dead(e, p) && !dead(e, p + 1) {
                        events.push(Event::Crossing(new_pos(e, p)));
                    }
                }
            }
        }
        retained_before[cs.counts.len() - 1] = events.len();

        rebuild(&cs, self.kind, self.handles.clone(), events, &move |g, p| {
            if dead(g, p) {
                None
            } else {
                Some((retained_before[g], new_pos(g, p)))
            }
        })
    }

    /// Inserts another closed diagram as a split block at `site` (between
    /// strands `site.pos - 1` and `site.pos`). Returns the mapping from
    /// the inserted diagram's components to new component indices.
    pub fn insert_sub_diagram(
        &self,
        site: Site,
        other: &FrontDiagram,
    ) -> Result<(Rewritten, Vec<usize>), FrontError> {
        let cs = self.validate()?;
        if site.gap >= cs.counts.len() || site.pos == 0 || site.pos > cs.counts[site.gap] + 1 {
            return Err(FrontError::InvalidSite { gap: site.gap, pos: site.pos });
        }
        if other.kind != DiagramKind::Closed {
            return Err(FrontError::NotLong);
        }
        let other_cs = other.validate()?;
        let delta = site.pos as isize - 1;
        let block: Vec<Event> = other.events.iter().map(|&e| shifted(e, delta)).collect();
        let out = insert_block(self, &cs, site.gap, block)?;

        let mut diagram = out.diagram;
        let mut inserted = Vec::with_capacity(other_cs.components.len());
        for info in &other_cs.components {
            let (g0, p0) = info.first_segment;
            let seg = (site.gap + g0, p0 + site.pos - 1);
            let desired = other_cs.dir[g0][p0 - 1];
            orient_segment(&mut diagram, seg, desired)?;
        }
        let structure = diagram.validate()?;
        for info in &other_cs.components {
            let (g0, p0) = info.first_segment;
            let seg = (site.gap + g0, p0 + site.pos - 1);
            inserted.push(
                structure
                    .comp_of(seg.0, seg.1)
                    .ok_or(FrontError::InvalidSite { gap: seg.0, pos: seg.1 })?,
            );
        }
        Ok((Rewritten { diagram, structure, old_to_new: out.old_to_new }, inserted))
    }
}

/// Band-sum block between the strand at `upper` and the strand at
/// `lower` (`upper < lower`), crossing everything in between twice.
pub(crate) fn band_block(upper: usize, lower: usize) -> Vec<Event> {
    let p = upper;
    let m = lower - upper - 1;
    let mut b = vec![Event::LeftCusp(p + 1), Event::Crossing(p)];
    for i in 1..=m {
        b.push(Event::Crossing(p + i + 1));
        b.push(Event::Crossing(p + i));
    }
    b.push(Event::Crossing(p + m + 2));
    b.push(Event::RightCusp(p + m + 1));
    b
}

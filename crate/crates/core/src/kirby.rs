//! Handle moves on contact surgery diagrams.
//!
//! Each move is a verified diagram transformation: it rewrites the front
//! word through the constructions in [`crate::front`], carries roles
//! across, and is covered by a preservation contract checked in
//! [`crate::verify`].

use crate::front::{
    ComponentRef, ComponentStructure, DiagramKind, Event, FrontDiagram, FrontError, Rewritten,
    Sign, Site,
};
use crate::surgery::{ComponentRole, Rational, SurgeryDiagram, SurgeryError};
use thiserror::Error;

pub const SHARK_PLACEMENT_SOURCE: &str = include_str!("../data/shark_placement.txt");

/// Handle addition orients the slide partner like the surgery curve that
/// is slid over; subtraction reverses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlideOrientation {
    Add,
    Subtract,
}

/// The move vocabulary, used for script parsing and contract lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Reidemeister,
    FarCommute,
    Stabilize,
    Destabilize,
    Twist,
    Pinch,
    ConnectSum,
    Pushoff,
    InsertMeridian,
    CompleteLong,
    RouteFinger,
    HandleSlide,
    CancelPairInsert,
    CancelPairRemove,
    PushoffMeridianForward,
    PushoffMeridianBackward,
    FirstKirbyAdd,
    FirstKirbyRemove,
    SharkStabilize,
    SharkDestabilize,
    ReplaceOneHandles,
    Move4,
    Move5,
    Move6,
    MeridianIsotopy1,
    MeridianIsotopy2,
    MeridianIsotopy3,
    OneHandleSlide,
    LightBulb,
    RolfsenTwistView,
    ReverseOrientation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error("coefficient of the slid-over curve must be +1 or -1")]
    CoefficientNotPlusMinusOne,
    #[error("base curve must carry contact coefficient -1")]
    CoefficientNotMinusOne,
    #[error("components do not form a push-off pair")]
    NotAPushoffPair,
    #[error("component is not a standard meridian of the base")]
    NotAMeridian,
    #[error("pair is not split from the rest of the diagram")]
    NotSplit,
    #[error("no unused shark meridian for this move")]
    NoShark,
    #[error("no zigzag of the required sign at the site")]
    NoZigzag,
    #[error("first Kirby block not found")]
    BlockNotFound,
    #[error("diagram is not in standard form")]
    NotStandardForm,
    #[error("component must be a marked knot")]
    NotMarked,
    #[error("the component is not a tb = -1 unknot with contact +1")]
    NotAPlusOneUnknot,
    #[error("the moving component must pass through the unknot exactly once")]
    NotThroughOnce,
    #[error("the rewrite is not an isotopy: {0}")]
    NotAnIsotopy(String),
    #[error("local pattern does not match")]
    PatternMismatch,
}

fn structure(sd: &SurgeryDiagram) -> Result<ComponentStructure, MoveError> {
    Ok(sd.front.validate().map_err(SurgeryError::Front)?)
}

/// classical(copy) = classical(base), lk(copy, base) = tb(base), and the
/// copy links everything else exactly like the base.
pub fn is_pushoff_pair(sd: &SurgeryDiagram, base: usize, copy: usize) -> Result<bool, MoveError> {
    let cs = structure(sd)?;
    if base == copy || base >= cs.components.len() || copy >= cs.components.len() {
        return Ok(false);
    }
    let cb = cs.classical(ComponentRef(base)).map_err(SurgeryError::Front)?;
    let cc = cs.classical(ComponentRef(copy)).map_err(SurgeryError::Front)?;
    if (cb.tb, cb.rot) != (cc.tb, cc.rot) {
        return Ok(false);
    }
    let lk = cs.lk_matrix();
    if lk[base][copy] != cb.tb {
        return Ok(false);
    }
    for x in 0..cs.components.len() {
        if x != base && x != copy && lk[base][x] != lk[copy][x] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// tb = -1, rot = 0, |lk(mu, base)| = 1 and no other linking.
pub fn is_standard_meridian(sd: &SurgeryDiagram, mu: usize, base: usize) -> Result<bool, MoveError> {
    let cs = structure(sd)?;
    if mu == base || mu >= cs.components.len() || base >= cs.components.len() {
        return Ok(false);
    }
    let cm = cs.classical(ComponentRef(mu)).map_err(SurgeryError::Front)?;
    if (cm.tb, cm.rot) != (-1, 0) {
        return Ok(false);
    }
    let lk = cs.lk_matrix();
    if lk[mu][base].abs() != 1 {
        return Ok(false);
    }
    for x in 0..cs.components.len() {
        if x != base && x != mu && lk[mu][x] != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_split(cs: &ComponentStructure, comps: &[usize]) -> bool {
    cs.crossings.iter().all(|x| comps.contains(&x.over) == comps.contains(&x.under))
}

/// Finds an anti-parallel strand pair (one strand of each component) at a
/// common gap, scanning deterministically.
fn find_band_site(
    cs: &ComponentStructure,
    ci: usize,
    cj: usize,
) -> Option<(usize, usize, usize)> {
    for gap in 0..cs.counts.len() {
        for a in 1..=cs.counts[gap] {
            if cs.component[gap][a - 1] != ci {
                continue;
            }
            for b in 1..=cs.counts[gap] {
                if b == a || cs.component[gap][b - 1] != cj {
                    continue;
                }
                if cs.dir[gap][a - 1] != cs.dir[gap][b - 1] {
                    return Some((gap, a, b));
                }
            }
        }
    }
    None
}

/// Finds an adjacent parallel (copy above original) pair of strands.
fn find_parallel_adjacent(
    cs: &ComponentStructure,
    upper: usize,
    lower: usize,
) -> Option<(usize, usize)> {
    for gap in 0..cs.counts.len() {
        for p in 1..cs.counts[gap] {
            if cs.component[gap][p - 1] == upper
                && cs.component[gap][p] == lower
                && cs.dir[gap][p - 1] == cs.dir[gap][p]
            {
                return Some((gap, p));
            }
        }
    }
    None
}

/// Builds the twisted push-off of surgery curve `j` inside the diagram:
/// the Legendrian push-off with one extra twist of the sign of `j`'s
/// contact coefficient wound around `j`. Returns the partner component
/// and the composed old-to-new component map.
fn twisted_pushoff(
    sd: &SurgeryDiagram,
    j: usize,
    twist_positive: bool,
) -> Result<(SurgeryDiagram, usize, Vec<Option<usize>>), MoveError> {
    let (rw, copy) = sd.front.pushoff(ComponentRef(j)).map_err(SurgeryError::Front)?;
    let sd1 = sd.rebuild_from(&rw, &[(copy.0, ComponentRole::MarkedKnot)])?;
    let j1 = rw.old_to_new[j].ok_or(SurgeryError::InvalidComponent(j))?;

    let cs = structure(&sd1)?;
    let (gap, p) =
        find_parallel_adjacent(&cs, copy.0, j1).ok_or(MoveError::PatternMismatch)?;
    let block = if twist_positive {
        vec![Event::Crossing(p), Event::Crossing(p)]
    } else {
        vec![
            Event::LeftCusp(p + 2),
            Event::Crossing(p + 1),
            Event::RightCusp(p),
            Event::LeftCusp(p),
            Event::Crossing(p + 1),
            Event::RightCusp(p + 2),
        ]
    };
    let mut events = sd1.front.events.clone();
    events.splice(gap..gap, block.clone());
    let len = block.len();
    let rw2 = crate::front::ops_rebuild(
        &cs,
        sd1.front.kind,
        sd1.front.handles.clone(),
        events,
        &move |g, q| if g <= gap { Some((g, q)) } else { Some((g + len, q)) },
    )
    .map_err(SurgeryError::Front)?;
    let partner = rw2.old_to_new[copy.0].ok_or(SurgeryError::InvalidComponent(copy.0))?;
    let composed: Vec<Option<usize>> = rw
        .old_to_new
        .iter()
        .map(|m| m.and_then(|mid| rw2.old_to_new[mid]))
        .collect();
    let sd2 = sd1.rebuild_from(&rw2, &[])?;
    Ok((sd2, partner, composed))
}

/// The second Kirby move: slides component `i` over the contact (+1) or
/// (-1) surgery curve `j` by banding `i` with the correspondingly twisted
/// push-off of `j`. The contact coefficient of `i` is unchanged; its
/// topological coefficient becomes f_i + f_j +/- 2 lk(i, j).
pub fn handle_slide(
    sd: &SurgeryDiagram,
    i: usize,
    j: usize,
    orientation: SlideOrientation,
) -> Result<SurgeryDiagram, MoveError> {
    if i == j || i >= sd.roles.len() || j >= sd.roles.len() {
        return Err(SurgeryError::InvalidComponent(i.max(j)).into());
    }
    let coeff = sd.roles[j]
        .coefficient()
        .ok_or(SurgeryError::MarkedKnotHasNoCoefficient(j))?;
    let twist_positive = if coeff == Rational::from_integer(1) {
        true
    } else if coeff == Rational::from_integer(-1) {
        false
    } else {
        return Err(MoveError::CoefficientNotPlusMinusOne);
    };

    let (mut sd1, partner, omap) = twisted_pushoff(sd, j, twist_positive)?;
    if orientation == SlideOrientation::Subtract {
        sd1 = SurgeryDiagram {
            front: sd1
                .front
                .reverse_orientation(ComponentRef(partner))
                .map_err(SurgeryError::Front)?,
            roles: sd1.roles.clone(),
            used_sharks: sd1.used_sharks.clone(),
        };
    }
    let i1 = omap[i].ok_or(SurgeryError::InvalidComponent(i))?;

    let cs = structure(&sd1)?;
    let (gap, a, b) = find_band_site(&cs, i1, partner).ok_or(FrontError::NoCommonGap)?;
    let rw = sd1
        .front
        .connect_sum(ComponentRef(i1), Site::new(gap, a), ComponentRef(partner), Site::new(gap, b))
        .map_err(SurgeryError::Front)?;
    let merged = rw.old_to_new[i1].ok_or(SurgeryError::InvalidComponent(i1))?;
    let out = sd1.rebuild_from(&rw, &[(merged, sd.roles[i])])?;
    Ok(out)
}

/// Inserts a cancelling pair: the given base knot with contact (-1) and
/// its push-off with contact (+1), split from the rest of the diagram.
pub fn cancel_pair_insert(
    sd: &SurgeryDiagram,
    base: &FrontDiagram,
    site: Site,
) -> Result<(SurgeryDiagram, (usize, usize)), MoveError> {
    let (rw, inserted) = sd.front.insert_sub_diagram(site, base).map_err(SurgeryError::Front)?;
    if inserted.len() != 1 {
        return Err(MoveError::PatternMismatch);
    }
    let b = inserted[0];
    let sd1 = sd.rebuild_from(&rw, &[(b, ComponentRole::minus_one())])?;
    let (rw2, copy) = sd1.front.pushoff(ComponentRef(b)).map_err(SurgeryError::Front)?;
    let sd2 = sd1.rebuild_from(&rw2, &[(copy.0, ComponentRole::plus_one())])?;
    let b2 = rw2.old_to_new[b].ok_or(SurgeryError::InvalidComponent(b))?;
    Ok((sd2, (b2, copy.0)))
}

/// Removes a split cancelling pair.
pub fn cancel_pair_remove(
    sd: &SurgeryDiagram,
    i: usize,
    j: usize,
) -> Result<SurgeryDiagram, MoveError> {
    let coeffs = (
        sd.roles.get(i).and_then(|r| r.coefficient()),
        sd.roles.get(j).and_then(|r| r.coefficient()),
    );
    let (one, minus) = (Rational::from_integer(1), Rational::from_integer(-1));
    let ok = matches!(coeffs, (Some(a), Some(b)) if (a == one && b == minus) || (a == minus && b == one));
    if !ok {
        return Err(MoveError::NotAPushoffPair);
    }
    if !(is_pushoff_pair(sd, i, j)? || is_pushoff_pair(sd, j, i)?) {
        return Err(MoveError::NotAPushoffPair);
    }
    let cs = structure(sd)?;
    if !is_split(&cs, &[i, j]) {
        return Err(MoveError::NotSplit);
    }
    let rw = sd.front.delete_components(&[i, j]).map_err(SurgeryError::Front)?;
    Ok(sd.rebuild_from(&rw, &[])?)
}

/// Replaces the push-off of a (-1)-surgery curve by a standard meridian
/// (forward) or a standard meridian by the push-off (backward), keeping
/// the replaced component's role and coefficient.
pub fn pushoff_meridian(
    sd: &SurgeryDiagram,
    base: usize,
    target: usize,
    forward: bool,
) -> Result<SurgeryDiagram, MoveError> {
    if sd.roles.get(base).and_then(|r| r.coefficient()) != Some(Rational::from_integer(-1)) {
        return Err(MoveError::CoefficientNotMinusOne);
    }
    if forward {
        if !is_pushoff_pair(sd, base, target)? {
            return Err(MoveError::NotAPushoffPair);
        }
    } else if !is_standard_meridian(sd, target, base)? {
        return Err(MoveError::NotAMeridian);
    }
    let role = sd.roles[target];

    let rw = sd.front.delete_components(&[target]).map_err(SurgeryError::Front)?;
    let sd1 = sd.rebuild_from(&rw, &[])?;
    let base1 = rw.old_to_new[base].ok_or(SurgeryError::InvalidComponent(base))?;

    if forward {
        let cs = structure(&sd1)?;
        let (g0, p0) = cs.components[base1].first_segment;
        let (rw2, mu) = sd1
            .front
            .insert_meridian(ComponentRef(base1), Site::new(g0, p0))
            .map_err(SurgeryError::Front)?;
        Ok(sd1.rebuild_from(&rw2, &[(mu.0, role)])?)
    } else {
        let (rw2, copy) = sd1.front.pushoff(ComponentRef(base1)).map_err(SurgeryError::Front)?;
        Ok(sd1.rebuild_from(&rw2, &[(copy.0, role)])?)
    }
}

/// The default first-Kirby block: a once-stabilized unknot carrying
/// contact (+1) together with its push-off carrying contact (-1).
/// Its surgered manifold is S^3 and its d3 is -1/2, so splitting it into
/// any diagram changes neither H1 nor d3.
pub fn default_first_kirby_block() -> (FrontDiagram, Vec<ComponentRole>) {
    let base = FrontDiagram::unknot_with_invariants(-2, 1, false).expect("realizable");
    let (rw, copy) = base.pushoff(ComponentRef(0)).expect("push-off of the standard unknot");
    let orig = rw.old_to_new[0].expect("base survives");
    let mut roles = vec![ComponentRole::plus_one(); 2];
    roles[orig] = ComponentRole::plus_one();
    roles[copy.0] = ComponentRole::minus_one();
    (rw.diagram, roles)
}

/// First Kirby move, adding direction: splits the default block into the
/// diagram at `site`.
pub fn first_kirby_add(sd: &SurgeryDiagram, site: Site) -> Result<SurgeryDiagram, MoveError> {
    let (block, roles) = default_first_kirby_block();
    let (rw, inserted) = sd.front.insert_sub_diagram(site, &block).map_err(SurgeryError::Front)?;
    let overrides: Vec<(usize, ComponentRole)> =
        inserted.iter().copied().zip(roles.iter().copied()).collect();
    Ok(sd.rebuild_from(&rw, &overrides)?)
}

/// First Kirby move, removing direction: finds a split sub-pair whose
/// canonical word and roles equal the default block and deletes it.
pub fn first_kirby_remove(sd: &SurgeryDiagram) -> Result<SurgeryDiagram, MoveError> {
    let (block, block_roles) = default_first_kirby_block();
    let block_canon = block.canonicalize().events;
    let cs = structure(sd)?;
    let n = cs.components.len();
    for a in 0..n {
        for b in 0..n {
            if a == b || !is_split(&cs, &[a, b]) {
                continue;
            }
            let keep_roles = (sd.roles[a], sd.roles[b]);
            let want = (block_roles[0], block_roles[1]);
            if keep_roles != want {
                continue;
            }
            // Extract the pair as its own diagram and compare canonically.
            let others: Vec<usize> = (0..n).filter(|&c| c != a && c != b).collect();
            let Ok(pair_only) = sd.front.delete_components(&others) else { continue };
            if pair_only.diagram.canonicalize().events != block_canon {
                continue;
            }
            let rw = sd.front.delete_components(&[a, b]).map_err(SurgeryError::Front)?;
            return Ok(sd.rebuild_from(&rw, &[])?);
        }
    }
    Err(MoveError::BlockNotFound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZigzagSign {
    Plus,
    Minus,
}

/// Shark rotation number required for a zigzag sign, from the placement
/// table.
pub fn shark_rot_for(sign: ZigzagSign) -> i64 {
    for line in SHARK_PLACEMENT_SOURCE.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(tag), Some(rot)) = (it.next(), it.next()) else { continue };
        let parsed: i64 = rot.parse().expect("bad shark placement rot");
        match (tag, sign) {
            ("S+", ZigzagSign::Plus) | ("S-", ZigzagSign::Minus) => return parsed,
            _ => {}
        }
    }
    panic!("shark placement table incomplete");
}

fn find_shark(
    sd: &SurgeryDiagram,
    cs: &ComponentStructure,
    c: usize,
    rot: i64,
    want_used: bool,
) -> Result<Option<usize>, MoveError> {
    let lk = cs.lk_matrix();
    for s in 0..cs.components.len() {
        if s == c || sd.used_sharks[s] != want_used {
            continue;
        }
        if sd.roles[s].coefficient() != Some(Rational::from_integer(1)) {
            continue;
        }
        let ci = cs.classical(ComponentRef(s)).map_err(SurgeryError::Front)?;
        if (ci.tb, ci.rot) != (-2, rot) || lk[s][c].abs() != 1 {
            continue;
        }
        if (0..cs.components.len()).any(|x| x != s && x != c && lk[s][x] != 0) {
            continue;
        }
        return Ok(Some(s));
    }
    Ok(None)
}

/// Destabilizes (or stabilizes) a marked knot in the presence of a shark
/// meridian of the matching sign. Each shark mediates one
/// destabilization and is marked used; the inverse releases it. For the
/// stabilize direction `sign` selects the zigzag; for destabilize the
/// zigzag at the site is classified from the word.
pub fn shark_move(
    sd: &SurgeryDiagram,
    c: usize,
    destabilize: bool,
    site: Site,
    sign: Option<ZigzagSign>,
) -> Result<SurgeryDiagram, MoveError> {
    if !matches!(sd.roles.get(c), Some(ComponentRole::MarkedKnot)) {
        return Err(MoveError::NotMarked);
    }
    let cs = structure(sd)?;
    if destabilize {
        // Classify the zigzag at the site.
        let i = site.gap;
        if i + 1 >= sd.front.events.len() {
            return Err(MoveError::NoZigzag);
        }
        let (Event::LeftCusp(a), Event::RightCusp(_)) =
            (sd.front.events[i], sd.front.events[i + 1])
        else {
            return Err(MoveError::NoZigzag);
        };
        if cs.comp_of(i + 1, a) != Some(c) {
            return Err(MoveError::NoZigzag);
        }
        let downs = cs
            .cusps
            .iter()
            .filter(|cu| cu.event == i || cu.event == i + 1)
            .filter(|cu| cu.down)
            .count();
        let sign = match downs {
            2 => ZigzagSign::Plus,
            0 => ZigzagSign::Minus,
            _ => return Err(MoveError::NoZigzag),
        };
        let shark = find_shark(sd, &cs, c, shark_rot_for(sign), false)?
            .ok_or(MoveError::NoShark)?;
        let rw = sd.front.destabilize(site).map_err(SurgeryError::Front)?;
        let mut out = sd.rebuild_from(&rw, &[])?;
        let shark_new = rw.old_to_new[shark].ok_or(SurgeryError::InvalidComponent(shark))?;
        out.used_sharks[shark_new] = true;
        Ok(out)
    } else {
        // Inverse: add the zigzag back, releasing a used shark.
        let sign = sign.unwrap_or(ZigzagSign::Plus);
        let shark = find_shark(sd, &cs, c, shark_rot_for(sign), true)?
            .ok_or(MoveError::NoShark)?;
        let fsign = match sign {
            ZigzagSign::Plus => Sign::Plus,
            ZigzagSign::Minus => Sign::Minus,
        };
        let rw = sd
            .front
            .stabilize(ComponentRef(c), fsign, Site::new(site.gap, site.pos))
            .map_err(SurgeryError::Front)?;
        let mut out = sd.rebuild_from(&rw, &[])?;
        let shark_new = rw.old_to_new[shark].ok_or(SurgeryError::InvalidComponent(shark))?;
        out.used_sharks[shark_new] = false;
        Ok(out)
    }
}

/// Replaces every 1-handle of a standard-form diagram by a contact (+1)
/// surgery on a tb = -1 unknot encircling the strands that ran through
/// it; the result is a closed diagram.
pub fn replace_one_handles(sd: &SurgeryDiagram) -> Result<SurgeryDiagram, MoveError> {
    let DiagramKind::StandardForm { boundary } = sd.front.kind else {
        return Err(MoveError::NotStandardForm);
    };
    structure(sd)?;
    if boundary == 0 {
        let mut out = sd.clone();
        out.front.kind = DiagramKind::Closed;
        return Ok(out);
    }

    // Remaining (left, right, handle-id) pairs, updated as we close.
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (h, handle) in sd.front.handles.iter().enumerate() {
        for k in 0..handle.size {
            pairs.push((handle.left_start + k, handle.right_start + k, h));
        }
    }
    pairs.sort();

    let mut current = sd.clone();
    let total = boundary;
    // closure_iteration[h] collects the 1-based iteration numbers of the
    // closures belonging to handle h.
    let mut closure_iters: Vec<Vec<usize>> = vec![Vec::new(); sd.front.handles.len()];
    for iter in 1..=total {
        let (l, r, h) = pairs.remove(0);
        debug_assert_eq!(l, 1);
        closure_iters[h].push(iter);

        let remaining_boundary = total - iter;
        let kind = if remaining_boundary == 0 {
            DiagramKind::Closed
        } else {
            DiagramKind::StandardForm { boundary: remaining_boundary }
        };
        // Shrink the remaining handle blocks.
        let mut handles = Vec::new();
        for &(pl, pr, ph) in &pairs {
            let npl = pl - 1;
            let npr = if pr > r { pr - 1 } else { pr };
            handles.push((npl, npr, ph));
        }
        pairs = handles.clone();
        let new_handles: Vec<crate::front::Handle> = merge_pairs(&pairs);

        let cs = structure(&current)?;
        let mut events = Vec::with_capacity(current.front.events.len() + r + 1);
        events.push(Event::LeftCusp(1));
        events.extend(current.front.events.iter().map(|e| shift_event(*e, 1)));
        for q in 1..r {
            events.push(Event::Crossing(q));
        }
        events.push(Event::RightCusp(r));
        let rw = crate::front::ops_rebuild(&cs, kind, new_handles, events, &|g, p| {
            Some((g + 1, p + 1))
        })
        .map_err(SurgeryError::Front)?;
        current = current.rebuild_from(&rw, &[])?;
    }

    // Insert one encircling (+1)-unknot per handle around its returns.
    for iters in closure_iters.iter() {
        if iters.is_empty() {
            continue;
        }
        // Return of closure i sits at position total - i + 1 at gap total.
        let positions: Vec<usize> = iters.iter().map(|&i| total - i + 1).collect();
        let lo = *positions.iter().min().unwrap();
        let hi = *positions.iter().max().unwrap();
        debug_assert_eq!(hi - lo + 1, positions.len());
        let (rw, mu) = current
            .front
            .insert_meridian_around(Site::new(total, lo), positions.len())
            .map_err(SurgeryError::Front)?;
        current = current.rebuild_from(&rw, &[(mu.0, ComponentRole::plus_one())])?;
    }
    Ok(current)
}

fn merge_pairs(pairs: &[(usize, usize, usize)]) -> Vec<crate::front::Handle> {
    // Rebuild contiguous handle blocks from the per-strand pairs.
    let mut handles: Vec<crate::front::Handle> = Vec::new();
    let mut by_handle: std::collections::BTreeMap<usize, Vec<(usize, usize)>> =
        std::collections::BTreeMap::new();
    for &(l, r, h) in pairs {
        by_handle.entry(h).or_default().push((l, r));
    }
    for (_, mut v) in by_handle {
        v.sort();
        let mut start = 0;
        while start < v.len() {
            let mut size = 1;
            while start + size < v.len()
                && v[start + size].0 == v[start].0 + size
                && v[start + size].1 == v[start].1 + size
            {
                size += 1;
            }
            handles.push(crate::front::Handle {
                left_start: v[start].0,
                right_start: v[start].1,
                size,
            });
            start += size;
        }
    }
    handles
}

fn shift_event(e: Event, d: usize) -> Event {
    match e {
        Event::LeftCusp(p) => Event::LeftCusp(p + d),
        Event::RightCusp(p) => Event::RightCusp(p + d),
        Event::Crossing(p) => Event::Crossing(p + d),
    }
}

/// Checks that `l0` is a tb = -1, rot = 0 unknot-shaped curve with
/// contact coefficient +1.
fn check_plus_one_unknot(sd: &SurgeryDiagram, l0: usize) -> Result<(), MoveError> {
    if sd.roles.get(l0).and_then(|r| r.coefficient()) != Some(Rational::from_integer(1)) {
        return Err(MoveError::NotAPlusOneUnknot);
    }
    let inv = sd.front.classical(ComponentRef(l0)).map_err(SurgeryError::Front)?;
    if (inv.tb, inv.rot, inv.writhe) != (-1, 0, 0) {
        return Err(MoveError::NotAPlusOneUnknot);
    }
    Ok(())
}

/// Move 6: slides the component `c` passing once through the (+1)-unknot
/// `l0` over it. Net effect on `c`: tb drops by 2, rot is unchanged;
/// ambient homology data is preserved.
pub fn move6(sd: &SurgeryDiagram, c: usize, l0: usize) -> Result<SurgeryDiagram, MoveError> {
    check_plus_one_unknot(sd, l0)?;
    let cs = structure(sd)?;
    let lk = cs.lk_matrix();
    let linking = lk[c][l0];
    if linking.abs() != 1 {
        return Err(MoveError::NotThroughOnce);
    }
    let orientation = if linking > 0 {
        SlideOrientation::Subtract
    } else {
        SlideOrientation::Add
    };
    handle_slide(sd, c, l0, orientation)
}

/// The light bulb move is move 6 performed on a marked knot crossing the
/// belt sphere of the former 1-handle once.
pub fn light_bulb(sd: &SurgeryDiagram, c: usize, l0: usize) -> Result<SurgeryDiagram, MoveError> {
    move6(sd, c, l0)
}

/// Identifies the contiguous event block of an encircling meridian `l0`
/// and the strand block it pierces. Returns (start event index, length,
/// pierced position, pierced count).
fn meridian_block(
    sd: &SurgeryDiagram,
    cs: &ComponentStructure,
    l0: usize,
) -> Result<(usize, usize, usize, usize), MoveError> {
    let events = &sd.front.events;
    let mine: Vec<usize> = (0..events.len())
        .filter(|&e| match events[e] {
            Event::LeftCusp(p) => cs.comp_of(e + 1, p) == Some(l0),
            Event::RightCusp(p) | Event::Crossing(p) => {
                cs.comp_of(e, p) == Some(l0) || cs.comp_of(e, p + 1) == Some(l0)
            }
        })
        .collect();
    if mine.is_empty() {
        return Err(MoveError::PatternMismatch);
    }
    let start = mine[0];
    let len = mine.len();
    if mine.last() != Some(&(start + len - 1)) {
        return Err(MoveError::PatternMismatch);
    }
    // Below-form: L(p+s) X(p+s-1)..X(p) X(p)..X(p+s-1) R(p+s).
    // Above-form: L(p) X(p+1)..X(p+s) X(p+s)..X(p+1) R(p).
    let (Event::LeftCusp(q), Event::RightCusp(q2)) = (events[start], events[start + len - 1])
    else {
        return Err(MoveError::PatternMismatch);
    };
    if q != q2 || len < 4 || (len - 2) % 2 != 0 {
        return Err(MoveError::PatternMismatch);
    }
    let s = (len - 2) / 2;
    let below = matches!(events[start + 1], Event::Crossing(x) if x + 1 == q);
    let p = if below {
        if q < s + 1 {
            return Err(MoveError::PatternMismatch);
        }
        q - s
    } else {
        q
    };
    for i in 0..s {
        let down = if below { q - 1 - i } else { q + 1 + i };
        let up = down;
        let ok_down = matches!(events[start + 1 + i], Event::Crossing(x) if x == down);
        let ok_up = matches!(events[start + len - 2 - i], Event::Crossing(x) if x == up);
        if !ok_down || !ok_up {
            return Err(MoveError::PatternMismatch);
        }
    }
    Ok((start, len, p, s))
}

/// Move 4: swings the encircling unknot to the other side of the strands
/// it pierces (below-form to above-form and back). A pure isotopy.
pub fn move4(sd: &SurgeryDiagram, l0: usize) -> Result<SurgeryDiagram, MoveError> {
    check_plus_one_unknot(sd, l0)?;
    let cs = structure(sd)?;
    let (start, len, p, s) = meridian_block(sd, &cs, l0)?;
    let below = matches!(sd.front.events[start], Event::LeftCusp(q) if q == p + s);
    let mut block = Vec::with_capacity(len);
    if below {
        // Rebuild in above-form: cusps above the pierced block.
        block.push(Event::LeftCusp(p));
        for i in 1..=s {
            block.push(Event::Crossing(p + i));
        }
        for i in (1..=s).rev() {
            block.push(Event::Crossing(p + i));
        }
        block.push(Event::RightCusp(p));
    } else {
        block.push(Event::LeftCusp(p + s));
        for i in (0..s).rev() {
            block.push(Event::Crossing(p + i));
        }
        for i in 0..s {
            block.push(Event::Crossing(p + i));
        }
        block.push(Event::RightCusp(p + s));
    }
    let cusp_pos = if below { p } else { p + s };
    let mut events = sd.front.events.clone();
    events.splice(start..start + len, block);
    let rw = crate::front::ops_rebuild(
        &cs,
        sd.front.kind,
        sd.front.handles.clone(),
        events,
        &move |g, q| {
            if g <= start {
                Some((g, q))
            } else if g < start + len {
                None
            } else {
                Some((g, q))
            }
        },
    )
    .map_err(SurgeryError::Front)?;
    let mu = rw
        .structure
        .comp_of(start + 1, cusp_pos)
        .ok_or(MoveError::PatternMismatch)?;
    let out = sd.rebuild_from(&rw, &[(mu, sd.roles[l0])])?;
    ensure_isotopy(sd, &out, "move4")?;
    Ok(out)
}

/// Move 5: slides a crossing of two pierced strands from one side of the
/// encircling unknot to the other. A pure isotopy.
pub fn move5(sd: &SurgeryDiagram, l0: usize) -> Result<SurgeryDiagram, MoveError> {
    check_plus_one_unknot(sd, l0)?;
    let cs = structure(sd)?;
    let (start, len, p, s) = meridian_block(sd, &cs, l0)?;
    if s < 2 {
        return Err(MoveError::PatternMismatch);
    }
    let mut events = sd.front.events.clone();
    // A crossing of pierced strands immediately before or after the block.
    let before = start
        .checked_sub(1)
        .filter(|&e| matches!(events[e], Event::Crossing(q) if q >= p && q + 1 < p + s + 1));
    let after = (start + len < events.len())
        .then_some(start + len)
        .filter(|&e| matches!(events[e], Event::Crossing(q) if q >= p && q + 1 < p + s + 1));
    let (from, to) = match (before, after) {
        (Some(e), _) => (e, start + len - 1),
        (None, Some(e)) => (e, start),
        (None, None) => return Err(MoveError::PatternMismatch),
    };
    let ev = events.remove(from);
    events.insert(to, ev);
    // Gap shift for the moved event; positions carry over (the block's
    // own strands occupy identical positions in both words, and pierced
    // components have their representatives outside the moved range).
    let rw = crate::front::ops_rebuild(
        &cs,
        sd.front.kind,
        sd.front.handles.clone(),
        events,
        &move |g, q| {
            let ng = if from < to {
                if g <= from {
                    g
                } else if g <= to {
                    g - 1
                } else {
                    g
                }
            } else if g <= to {
                g
            } else if g <= from {
                g + 1
            } else {
                g
            };
            Some((ng, q))
        },
    )
    .map_err(SurgeryError::Front)?;
    let out = sd.rebuild_from(&rw, &[])?;
    ensure_isotopy(sd, &out, "move5")?;
    Ok(out)
}

/// Meridian isotopies: re-seat the encircling unknot around the same
/// strands at a different site (kinds 1 and 2) or flip its side (kind 3,
/// same mechanism as move 4). The rewrite is checked to preserve the
/// entire ledger and refused otherwise.
pub fn meridian_isotopy(
    sd: &SurgeryDiagram,
    kind: u8,
    l0: usize,
    to: Site,
) -> Result<SurgeryDiagram, MoveError> {
    check_plus_one_unknot(sd, l0)?;
    match kind {
        3 => move4(sd, l0),
        1 | 2 => {
            let cs = structure(sd)?;
            let (start, len, _p, s) = meridian_block(sd, &cs, l0)?;
            let mut events = sd.front.events.clone();
            events.drain(start..start + len);
            let rw = crate::front::ops_rebuild(
                &cs,
                sd.front.kind,
                sd.front.handles.clone(),
                events,
                &move |g, q| {
                    if g <= start {
                        Some((g, q))
                    } else if g < start + len {
                        None
                    } else {
                        Some((g - len, q))
                    }
                },
            )
            .map_err(SurgeryError::Front)?;
            let sd1 = sd.rebuild_from_dropping(&rw, l0)?;
            let (rw2, mu) = sd1
                .front
                .insert_meridian_around(to, s)
                .map_err(SurgeryError::Front)?;
            let out = sd1.rebuild_from(&rw2, &[(mu.0, sd.roles[l0])])?;
            ensure_isotopy(sd, &out, "meridian isotopy")?;
            Ok(out)
        }
        _ => Err(MoveError::PatternMismatch),
    }
}

/// A 1-handle slide: slides one former 1-handle's (+1)-unknot over
/// another.
pub fn one_handle_slide(
    sd: &SurgeryDiagram,
    a: usize,
    b: usize,
    orientation: SlideOrientation,
) -> Result<SurgeryDiagram, MoveError> {
    check_plus_one_unknot(sd, a)?;
    check_plus_one_unknot(sd, b)?;
    handle_slide(sd, a, b, orientation)
}

/// Read-only report for regarding a slide over a former 1-handle as a
/// Rolfsen twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RolfsenReport {
    /// Topological coefficient of the (+1)-unknot relative to its disc
    /// framing; always zero for a converted 1-handle.
    pub surface_framing_coefficient: Rational,
    pub tb: i64,
    pub rot: i64,
    /// Stabilization class of `c` relative to the maximal unknot,
    /// from the stabilization-matching equations.
    pub stabilization_class: Option<(i64, i64)>,
}

pub fn rolfsen_twist_view(
    sd: &SurgeryDiagram,
    l0: usize,
    c: usize,
) -> Result<RolfsenReport, MoveError> {
    check_plus_one_unknot(sd, l0)?;
    let cs = structure(sd)?;
    let lk = cs.lk_matrix();
    if lk[c][l0].abs() != 1 {
        return Err(MoveError::NotThroughOnce);
    }
    // Surface framing of the unknot is its Seifert-disc framing, i.e. the
    // topological coefficient itself: tb + 1 = 0.
    let surface = sd.topological_coefficient(ComponentRef(l0))?;
    let inv = sd.front.classical(ComponentRef(c)).map_err(SurgeryError::Front)?;
    let class = crate::surgery::match_stabilizations(inv.tb + 1, inv.rot);
    Ok(RolfsenReport {
        surface_framing_coefficient: surface,
        tb: inv.tb,
        rot: inv.rot,
        stabilization_class: class,
    })
}

/// Exact equality of the invariant content of two diagrams: per-component
/// tb/rot multiset with roles, keyed linking data, H1 and d3.
fn ensure_isotopy(
    before: &SurgeryDiagram,
    after: &SurgeryDiagram,
    what: &str,
) -> Result<(), MoveError> {
    let err = |msg: String| Err(MoveError::NotAnIsotopy(format!("{what}: {msg}")));
    let mut b: Vec<(i64, i64, Option<Rational>)> = classical_role_list(before)?;
    let mut a: Vec<(i64, i64, Option<Rational>)> = classical_role_list(after)?;
    b.sort();
    a.sort();
    if a != b {
        return err("classical invariants changed".into());
    }
    if keyed_lk_multiset(before)? != keyed_lk_multiset(after)? {
        return err("linking data changed".into());
    }
    if before.h1()? != after.h1()? {
        return err("homology changed".into());
    }
    let (d_b, d_a) = (before.d3()?, after.d3()?);
    if d_b.defined != d_a.defined || (d_b.defined && d_b.value != d_a.value) {
        return err("d3 changed".into());
    }
    Ok(())
}

/// |lk| entries keyed by the two components' fingerprints.
#[allow(clippy::type_complexity)]
fn keyed_lk_multiset(
    sd: &SurgeryDiagram,
) -> Result<Vec<((i64, i64, Option<Rational>), (i64, i64, Option<Rational>), i64)>, MoveError> {
    let cs = structure(sd)?;
    let lk = cs.lk_matrix();
    let keys = classical_role_list(sd)?;
    let mut out = Vec::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            let (a, b) = if keys[i] <= keys[j] { (keys[i], keys[j]) } else { (keys[j], keys[i]) };
            out.push((a, b, lk[i][j].abs()));
        }
    }
    out.sort();
    Ok(out)
}

fn classical_role_list(
    sd: &SurgeryDiagram,
) -> Result<Vec<(i64, i64, Option<Rational>)>, MoveError> {
    (0..sd.roles.len())
        .map(|c| {
            let inv = sd.front.classical(ComponentRef(c)).map_err(SurgeryError::Front)?;
            Ok((inv.tb, inv.rot, sd.roles[c].coefficient()))
        })
        .collect()
}

impl SurgeryDiagram {
    /// Like `rebuild_from` but explicitly drops one old component (whose
    /// deletion the rewrite performed).
    pub(crate) fn rebuild_from_dropping(
        &self,
        rw: &Rewritten,
        dropped: usize,
    ) -> Result<SurgeryDiagram, SurgeryError> {
        debug_assert!(rw.old_to_new[dropped].is_none());
        self.rebuild_from(rw, &[])
    }
}

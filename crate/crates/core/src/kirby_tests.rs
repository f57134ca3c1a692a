use crate::front::{ComponentRef, Event, FrontDiagram, Site};
use crate::kirby::*;
use crate::surgery::{ComponentRole, Rational, SurgeryDiagram};
use crate::{Int, Rat};

fn ev(s: &str) -> Vec<Event> {
    s.split_whitespace()
        .map(|t| {
            let p: usize = t[1..].parse().unwrap();
            match &t[..1] {
                "L" => Event::LeftCusp(p),
                "R" => Event::RightCusp(p),
                "X" => Event::Crossing(p),
                _ => panic!(),
            }
        })
        .collect()
}

fn two_split_unknots() -> SurgeryDiagram {
    let d = FrontDiagram::closed(ev("L1 L3 R1 R1")).unwrap();
    SurgeryDiagram::new(d, vec![ComponentRole::minus_one(), ComponentRole::minus_one()]).unwrap()
}

#[test]
fn worked_two_unknot_slide() {
    let sd = two_split_unknots();
    let before_h1 = sd.h1().unwrap();
    assert_eq!(before_h1.torsion, vec![Int::from(2), Int::from(2)]);
    let before_d3 = sd.d3().unwrap();

    let out = handle_slide(&sd, 0, 1, SlideOrientation::Subtract).unwrap();
    assert_eq!(out.component_count(), 2);

    // The slid component keeps its contact coefficient.
    let slid = out
        .roles
        .iter()
        .enumerate()
        .find(|(c, _)| {
            let inv = out.front.classical(ComponentRef(*c)).unwrap();
            inv.tb == -3
        })
        .map(|(c, _)| c)
        .expect("slid component with tb -3");
    assert_eq!(out.roles[slid].coefficient(), Some(Rational::from_integer(-1)));
    assert_eq!(
        out.topological_coefficient(ComponentRef(slid)).unwrap(),
        Rational::from_integer(-4)
    );

    let other = 1 - slid;
    let inv_other = out.front.classical(ComponentRef(other)).unwrap();
    assert_eq!(inv_other.tb, -1);
    assert_eq!(out.front.lk(ComponentRef(slid), ComponentRef(other)).unwrap().abs(), 2);

    let after_h1 = out.h1().unwrap();
    assert_eq!(after_h1, before_h1);
    let after_d3 = out.d3().unwrap();
    assert_eq!(after_d3.defined, before_d3.defined);
    assert_eq!(after_d3.value, before_d3.value);
}

#[test]
fn twisted_pushoff_framings() {
    // Slide over a +1 curve: partner keeps tb; the framing rule follows
    // f' = f_i + f_j + 2 lk for handle addition.
    let d = FrontDiagram::closed(ev("L1 L3 R1 R1")).unwrap();
    let sd = SurgeryDiagram::new(
        d,
        vec![ComponentRole::minus_one(), ComponentRole::plus_one()],
    )
    .unwrap();
    let out = handle_slide(&sd, 0, 1, SlideOrientation::Add).unwrap();
    let slid = (0..2)
        .find(|&c| out.roles[c].coefficient() == Some(Rational::from_integer(-1)))
        .unwrap();
    // f' = (-2) + 0 + 0 = -2, contact -1 kept, so tb' = -1.
    assert_eq!(
        out.topological_coefficient(ComponentRef(slid)).unwrap(),
        Rational::from_integer(-2)
    );
    let inv = out.front.classical(ComponentRef(slid)).unwrap();
    assert_eq!(inv.tb, -1);
}

#[test]
fn slide_preserves_h1_with_linking() {
    // Hopf-linked pair via a meridian, both -1; slide base over meridian.
    let d = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (rw, mu) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
    let base = rw.old_to_new[0].unwrap();
    let mut roles = vec![ComponentRole::minus_one(); 2];
    roles[mu.0] = ComponentRole::minus_one();
    roles[base] = ComponentRole::minus_one();
    let sd = SurgeryDiagram::new(rw.diagram, roles).unwrap();
    let h_before = sd.h1().unwrap();
    let d3_before = sd.d3().unwrap();
    for orientation in [SlideOrientation::Add, SlideOrientation::Subtract] {
        let out = handle_slide(&sd, base, mu.0, orientation).unwrap();
        assert_eq!(out.h1().unwrap(), h_before, "{orientation:?}");
        let d3_after = out.d3().unwrap();
        assert_eq!(d3_after.defined, d3_before.defined);
        assert_eq!(d3_after.value, d3_before.value, "{orientation:?}");
    }
}

#[test]
fn slide_framing_rule_with_linking() {
    // f' = f_i + f_j + 2 eps lk(i, j), checked on a linked pair.
    let d = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (rw, mu) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
    let base = rw.old_to_new[0].unwrap();
    let lk = rw.diagram.lk(ComponentRef(base), ComponentRef(mu.0)).unwrap();
    let mut roles = vec![ComponentRole::minus_one(); 2];
    roles[mu.0] = ComponentRole::plus_one();
    let sd = SurgeryDiagram::new(rw.diagram, roles).unwrap();
    let f_i = sd.topological_coefficient(ComponentRef(base)).unwrap();
    let f_j = sd.topological_coefficient(ComponentRef(mu.0)).unwrap();
    for (orientation, eps) in [(SlideOrientation::Add, 1), (SlideOrientation::Subtract, -1)] {
        let out = handle_slide(&sd, base, mu.0, orientation).unwrap();
        let slid = (0..2)
            .find(|&c| out.roles[c].coefficient() == Some(Rational::from_integer(-1)))
            .unwrap();
        let f_new = out.topological_coefficient(ComponentRef(slid)).unwrap();
        assert_eq!(f_new, f_i + f_j + Rational::from_integer(2 * eps * lk));
    }
}

#[test]
fn cancel_pair_roundtrip() {
    let sd = SurgeryDiagram::empty();
    let base = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (with_pair, (b, c)) = cancel_pair_insert(&sd, &base, Site::new(0, 1)).unwrap();
    assert_eq!(with_pair.component_count(), 2);
    assert_eq!(with_pair.h1().unwrap(), crate::surgery::HomologyReport::trivial());
    let d3 = with_pair.d3().unwrap();
    assert_eq!(d3.value, Rat::new(Int::from(-1), Int::from(2)));

    let removed = cancel_pair_remove(&with_pair, b, c).unwrap();
    assert!(removed.front.events.is_empty());
    assert_eq!(removed.component_count(), 0);
}

#[test]
fn cancel_pair_requires_split() {
    // A pair with geometric crossings against a third component is not
    // removable, even though every linking number still vanishes.
    let d = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let sd = SurgeryDiagram::new(d, vec![ComponentRole::MarkedKnot]).unwrap();
    let base = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (with_pair, _) = cancel_pair_insert(&sd, &base, Site::new(1, 1)).unwrap();
    // Poke a finger of the marked strand across the whole pair.
    let cs = with_pair.front.validate().unwrap();
    let marked = (0..3)
        .find(|&x| matches!(with_pair.roles[x], ComponentRole::MarkedKnot))
        .unwrap();
    let (gap, pos) = (0..cs.counts.len())
        .flat_map(|g| (1..=cs.counts[g]).map(move |p| (g, p)))
        .find(|&(g, p)| cs.component[g][p - 1] == marked && cs.counts[g] > 2 && p > 2)
        .expect("marked strand below the pair at a shared gap");
    let rw = with_pair
        .front
        .route_finger(Site::new(gap, pos), Site::new(gap, 1))
        .unwrap();
    let poked = with_pair.rebuild_from(&rw, &[]).unwrap();
    let b2 = (0..3)
        .find(|&x| poked.roles[x].coefficient() == Some(Rational::from_integer(-1)))
        .unwrap();
    let c2 = (0..3)
        .find(|&x| poked.roles[x].coefficient() == Some(Rational::from_integer(1)))
        .unwrap();
    assert_eq!(cancel_pair_remove(&poked, b2, c2).unwrap_err(), MoveError::NotSplit);
}

#[test]
fn pushoff_meridian_forward_backward() {
    let sd = SurgeryDiagram::empty();
    let base_knot = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (sd, (base, copy)) = cancel_pair_insert(&sd, &base_knot, Site::new(0, 1)).unwrap();
    let h_before = sd.h1().unwrap();
    let d3_before = sd.d3().unwrap();

    let fwd = pushoff_meridian(&sd, base, copy, true).unwrap();
    assert_eq!(fwd.h1().unwrap(), h_before);
    let d3_fwd = fwd.d3().unwrap();
    assert_eq!(d3_fwd.value, d3_before.value);
    // The meridian carries the +1 coefficient and links the base once.
    let mu = (0..2)
        .find(|&c| fwd.roles[c].coefficient() == Some(Rational::from_integer(1)))
        .unwrap();
    let b2 = 1 - mu;
    let inv = fwd.front.classical(ComponentRef(mu)).unwrap();
    assert_eq!((inv.tb, inv.rot), (-1, 0));
    assert_eq!(fwd.front.lk(ComponentRef(mu), ComponentRef(b2)).unwrap().abs(), 1);

    let back = pushoff_meridian(&fwd, b2, mu, false).unwrap();
    assert_eq!(back.h1().unwrap(), h_before);
    assert_eq!(back.d3().unwrap().value, d3_before.value);
    // Canonical word equality with the original pair.
    assert_eq!(
        back.front.canonicalize().events,
        sd.front.canonicalize().events
    );

    // Wrong coefficient on the base is rejected.
    assert_eq!(
        pushoff_meridian(&fwd, mu, b2, true).unwrap_err(),
        MoveError::CoefficientNotMinusOne
    );
}

#[test]
fn first_kirby_block_contract() {
    let (block, roles) = default_first_kirby_block();
    let sd = SurgeryDiagram::new(block, roles).unwrap();
    assert_eq!(sd.h1().unwrap(), crate::surgery::HomologyReport::trivial());
    let d3 = sd.d3().unwrap();
    assert!(d3.defined);
    assert_eq!(d3.value, Rat::new(Int::from(-1), Int::from(2)));
}

#[test]
fn first_kirby_add_remove() {
    let host = two_split_unknots();
    let h = host.h1().unwrap();
    let d3 = host.d3().unwrap();
    let added = first_kirby_add(&host, Site::new(0, 1)).unwrap();
    assert_eq!(added.component_count(), 4);
    assert_eq!(added.h1().unwrap(), h);
    let d3_after = added.d3().unwrap();
    assert_eq!(d3_after.defined, d3.defined);
    assert_eq!(d3_after.value, d3.value);

    let removed = first_kirby_remove(&added).unwrap();
    assert_eq!(
        removed.front.canonicalize().events,
        host.front.canonicalize().events
    );
    assert_eq!(first_kirby_remove(&host).unwrap_err(), MoveError::BlockNotFound);
}

fn marked_stabilized_unknot_with_shark() -> (SurgeryDiagram, usize, usize) {
    // Marked S+ unknot with a shark meridian around it.
    let d = FrontDiagram::unknot_with_invariants(-2, 1, false).unwrap();
    let (rw, mu) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
    let c = rw.old_to_new[0].unwrap();
    let mut roles = vec![ComponentRole::MarkedKnot; 2];
    roles[mu.0] = ComponentRole::plus_one();
    let sd = SurgeryDiagram::new(rw.diagram.clone(), roles).unwrap();
    // Stabilize the meridian once so it becomes a shark (tb -2, rot +1).
    let cs = rw.diagram.validate().unwrap();
    let (g0, p0) = cs.components[mu.0].first_segment;
    let rw2 = rw
        .diagram
        .stabilize(mu, crate::front::Sign::Plus, Site::new(g0, p0))
        .unwrap();
    let sd = sd.rebuild_from(&rw2, &[]).unwrap();
    let shark = rw2.old_to_new[mu.0].unwrap();
    let c = rw2.old_to_new[c].unwrap();
    (sd, c, shark)
}

#[test]
fn shark_destabilization() {
    let (sd, c, shark) = marked_stabilized_unknot_with_shark();
    let inv = sd.front.classical(ComponentRef(c)).unwrap();
    assert_eq!((inv.tb, inv.rot), (-2, 1));
    let sinv = sd.front.classical(ComponentRef(shark)).unwrap();
    assert_eq!((sinv.tb, sinv.rot), (-2, 1));
    let h_before = sd.h1().unwrap();
    let d3_before = sd.d3().unwrap();

    // The marked knot's zigzag sits at some adjacent L,R pair; find it.
    let site = (0..sd.front.events.len() - 1)
        .find_map(|i| {
            match (sd.front.events[i], sd.front.events[i + 1]) {
                (Event::LeftCusp(a), Event::RightCusp(b)) if b + 1 == a || b == a + 1 => {
                    let cs = sd.front.validate().unwrap();
                    (cs.comp_of(i + 1, a) == Some(c)).then_some(Site::new(i, a))
                }
                _ => None,
            }
        })
        .expect("zigzag on the marked knot");

    let out = shark_move(&sd, c, true, site, None).unwrap();
    let c_new = (0..2)
        .find(|&x| matches!(out.roles[x], ComponentRole::MarkedKnot))
        .unwrap();
    let inv = out.front.classical(ComponentRef(c_new)).unwrap();
    assert_eq!((inv.tb, inv.rot), (-1, 0));
    assert_eq!(out.h1().unwrap(), h_before);
    assert_eq!(out.d3().unwrap().value, d3_before.value);
    // The shark is consumed: a second destabilization must fail.
    assert!(out.used_sharks.iter().any(|&u| u));

    // Inverse restores tb/rot and releases the shark.
    let back = shark_move(&out, c_new, false, site, Some(ZigzagSign::Plus)).unwrap();
    let c_back = (0..2)
        .find(|&x| matches!(back.roles[x], ComponentRole::MarkedKnot))
        .unwrap();
    let inv = back.front.classical(ComponentRef(c_back)).unwrap();
    assert_eq!((inv.tb, inv.rot), (-2, 1));
    assert!(back.used_sharks.iter().all(|&u| !u));
}

#[test]
fn shark_required() {
    // Marked stabilized unknot with no shark at all.
    let d = FrontDiagram::unknot_with_invariants(-2, 1, false).unwrap();
    let sd = SurgeryDiagram::new(d.clone(), vec![ComponentRole::MarkedKnot]).unwrap();
    let site = Site::new(1, 1);
    let zig = (0..sd.front.events.len() - 1)
        .find(|&i| matches!(
            (sd.front.events[i], sd.front.events[i + 1]),
            (Event::LeftCusp(a), Event::RightCusp(b)) if b + 1 == a || b == a + 1
        ))
        .map(|i| Site::new(i, sd.front.events[i].pos()))
        .unwrap_or(site);
    assert_eq!(shark_move(&sd, 0, true, zig, None).unwrap_err(), MoveError::NoShark);
}

#[test]
fn replace_single_handle_gives_s1_s2() {
    // One strand through one handle.
    let d = FrontDiagram::with_kind(
        crate::front::DiagramKind::StandardForm { boundary: 1 },
        vec![],
        vec![crate::front::Handle { left_start: 1, right_start: 1, size: 1 }],
    )
    .unwrap();
    let sd = SurgeryDiagram::new(d, vec![ComponentRole::MarkedKnot]).unwrap();
    let out = replace_one_handles(&sd).unwrap();
    assert_eq!(out.front.kind, crate::front::DiagramKind::Closed);
    assert_eq!(out.component_count(), 2);
    let h = out.h1().unwrap();
    assert_eq!(h.free_rank, 1);
    assert!(h.torsion.is_empty());
    // The closed strand is a tb = -1 unknot marked knot.
    let marked = (0..2)
        .find(|&c| matches!(out.roles[c], ComponentRole::MarkedKnot))
        .unwrap();
    let inv = out.front.classical(ComponentRef(marked)).unwrap();
    assert_eq!(inv.tb, -1);
    let mu = 1 - marked;
    let minv = out.front.classical(ComponentRef(mu)).unwrap();
    assert_eq!((minv.tb, minv.rot), (-1, 0));
    assert_eq!(out.front.lk(ComponentRef(marked), ComponentRef(mu)).unwrap().abs(), 1);
}

#[test]
fn replace_two_empty_handles() {
    let d = FrontDiagram::with_kind(
        crate::front::DiagramKind::StandardForm { boundary: 2 },
        vec![],
        vec![
            crate::front::Handle { left_start: 1, right_start: 1, size: 1 },
            crate::front::Handle { left_start: 2, right_start: 2, size: 1 },
        ],
    )
    .unwrap();
    let sd = SurgeryDiagram::new(d, vec![ComponentRole::MarkedKnot, ComponentRole::MarkedKnot])
        .unwrap();
    let out = replace_one_handles(&sd).unwrap();
    let h = out.h1().unwrap();
    assert_eq!(h.free_rank, 2);
    assert!(h.torsion.is_empty());
}

#[test]
fn move6_double_stabilization() {
    // A marked unknot through a former 1-handle's (+1)-unknot once.
    let d = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (rw, mu) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
    let c = rw.old_to_new[0].unwrap();
    let mut roles = vec![ComponentRole::MarkedKnot; 2];
    roles[mu.0] = ComponentRole::plus_one();
    let sd = SurgeryDiagram::new(rw.diagram, roles).unwrap();
    let before = sd.front.classical(ComponentRef(c)).unwrap();
    let h_before = sd.h1().unwrap();

    let out = move6(&sd, c, mu.0).unwrap();
    let c_new = (0..2)
        .find(|&x| matches!(out.roles[x], ComponentRole::MarkedKnot))
        .unwrap();
    let after = out.front.classical(ComponentRef(c_new)).unwrap();
    assert_eq!(after.tb, before.tb - 2);
    assert_eq!(after.rot, before.rot);
    assert_eq!(out.h1().unwrap(), h_before);
}

#[test]
fn move4_and_isotopies_preserve_everything() {
    let d = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (rw, mu) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
    let c = rw.old_to_new[0].unwrap();
    let mut roles = vec![ComponentRole::MarkedKnot; 2];
    roles[mu.0] = ComponentRole::plus_one();
    roles[c] = ComponentRole::MarkedKnot;
    let sd = SurgeryDiagram::new(rw.diagram, roles).unwrap();

    let m4 = move4(&sd, mu.0).unwrap();
    let twice = {
        let mu2 = (0..2)
            .find(|&x| m4.roles[x].coefficient() == Some(Rational::from_integer(1)))
            .unwrap();
        move4(&m4, mu2).unwrap()
    };
    assert_eq!(twice.front.events, sd.front.events);
}

#[test]
fn rolfsen_view() {
    let d = FrontDiagram::closed(ev("L1 R1")).unwrap();
    let (rw, mu) = d.insert_meridian(ComponentRef(0), Site::new(1, 1)).unwrap();
    let c = rw.old_to_new[0].unwrap();
    let mut roles = vec![ComponentRole::MarkedKnot; 2];
    roles[mu.0] = ComponentRole::plus_one();
    let sd = SurgeryDiagram::new(rw.diagram, roles).unwrap();

    let report = rolfsen_twist_view(&sd, mu.0, c).unwrap();
    assert_eq!(report.surface_framing_coefficient, Rational::from_integer(0));
    assert_eq!(report.stabilization_class, Some((0, 0)));

    // After move 6 the class grows by (1, 1).
    let out = move6(&sd, c, mu.0).unwrap();
    let c_new = (0..2)
        .find(|&x| matches!(out.roles[x], ComponentRole::MarkedKnot))
        .unwrap();
    let mu_new = 1 - c_new;
    let report = rolfsen_twist_view(&out, mu_new, c_new).unwrap();
    assert_eq!(report.stabilization_class, Some((1, 1)));

    // A -1 unknot is rejected.
    let bad = SurgeryDiagram {
        front: sd.front.clone(),
        roles: {
            let mut r = sd.roles.clone();
            r[mu.0] = ComponentRole::minus_one();
            r
        },
        used_sharks: sd.used_sharks.clone(),
    };
    assert_eq!(
        rolfsen_twist_view(&bad, mu.0, c).unwrap_err(),
        MoveError::NotAPlusOneUnknot
    );
}

//! Invariant ledgers and per-move preservation contracts.
//!
//! A ledger captures everything computable from a closed surgery diagram:
//! per-component classical invariants and roles, the linking matrix,
//! topological coefficients, first homology and d3. Each move kind owns a
//! contract, a list of clauses; `check_move` evaluates every clause
//! against the ledgers before and after and reports each one.

use crate::front::{ComponentRef, DiagramKind};
use crate::kirby::MoveKind;
use crate::surgery::{ComponentRole, D3Report, HomologyReport, Rational, SurgeryDiagram, SurgeryError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("ledger requires a closed diagram (convert standard form first)")]
    NotClosed,
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// Per-component entry of the ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLedger {
    pub tb: i64,
    pub rot: i64,
    pub writhe: i64,
    pub right_cusps: i64,
    pub role: ComponentRole,
    pub topological: Option<Rational>,
}

/// The full invariant ledger of a surgery diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantLedger {
    pub components: Vec<ComponentLedger>,
    pub lk: Vec<Vec<i64>>,
    pub h1: HomologyReport,
    pub d3: D3Report,
    pub word_length: usize,
}

impl InvariantLedger {
    /// Sorted multiset of (tb, rot, coefficient), the isotopy fingerprint
    /// of the component list.
    fn classical_multiset(&self) -> Vec<(i64, i64, Option<Rational>)> {
        let mut v: Vec<_> =
            self.components.iter().map(|c| (c.tb, c.rot, c.role.coefficient())).collect();
        v.sort();
        v
    }

    fn classical_multiset_with_writhe(&self) -> Vec<(i64, i64, i64, Option<Rational>)> {
        let mut v: Vec<_> = self
            .components
            .iter()
            .map(|c| (c.tb, c.rot, c.writhe, c.role.coefficient()))
            .collect();
        v.sort();
        v
    }

    /// Linking entries keyed by unordered component fingerprints; the
    /// linking value enters by absolute value so the multiset is stable
    /// under orientation conventions of newly built components.
    fn lk_multiset(&self) -> Vec<((i64, i64), (i64, i64), i64)> {
        let mut v = Vec::new();
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                let a = (self.components[i].tb, self.components[i].rot);
                let b = (self.components[j].tb, self.components[j].rot);
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                v.push((a, b, self.lk[i][j].abs()));
            }
        }
        v.sort();
        v
    }

    fn coefficient_multiset(&self) -> Vec<Option<Rational>> {
        let mut v: Vec<_> = self.components.iter().map(|c| c.role.coefficient()).collect();
        v.sort();
        v
    }

    fn topological_multiset(&self) -> Vec<Rational> {
        let mut v: Vec<_> = self.components.iter().filter_map(|c| c.topological).collect();
        v.sort();
        v
    }
}

/// Computes the ledger of a closed surgery diagram.
pub fn ledger(sd: &SurgeryDiagram) -> Result<InvariantLedger, VerifyError> {
    if sd.front.kind != DiagramKind::Closed {
        return Err(VerifyError::NotClosed);
    }
    let cs = sd.structure()?;
    let lk = cs.lk_matrix();
    let mut components = Vec::with_capacity(sd.roles.len());
    for c in 0..sd.roles.len() {
        let inv = cs.classical(ComponentRef(c)).map_err(SurgeryError::Front)?;
        let topological = match sd.roles[c] {
            ComponentRole::SurgeryCurve { .. } => {
                Some(sd.topological_coefficient_with(&cs, ComponentRef(c))?)
            }
            ComponentRole::MarkedKnot => None,
        };
        components.push(ComponentLedger {
            tb: inv.tb,
            rot: inv.rot,
            writhe: inv.writhe,
            right_cusps: inv.right_cusps,
            role: sd.roles[c],
            topological,
        });
    }
    Ok(InvariantLedger {
        components,
        lk,
        h1: sd.h1_with(&cs)?,
        d3: sd.d3_with(&cs)?,
        word_length: sd.front.events.len(),
    })
}

/// One contract clause. Contracts are data: every move kind maps to a
/// clause list in [`contract_for`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// Sorted (tb, rot, coefficient) component multiset unchanged.
    ClassicalPreserved,
    /// As above, including the diagram writhe of each component.
    ClassicalWithWrithePreserved,
    /// Linking multiset unchanged.
    LkPreserved,
    /// Component count changes by the given amount.
    ComponentCountDelta(i64),
    /// Coefficient multiset unchanged (slides keep every coefficient).
    CoefficientsPreserved,
    /// H1 invariant factors and free rank unchanged.
    H1Preserved,
    /// d3 unchanged (including definedness).
    D3Preserved,
    /// One focused component changes (tb, rot) by the declared delta;
    /// everything else is unchanged (as multisets).
    FocusDelta,
    /// Topological coefficient multiset transforms by the slide framing
    /// rule f' = f_i + f_j + 2 eps lk(i, j).
    SlideFraming,
}

/// Extra data a clause may need, supplied by the caller of `check_move`.
#[derive(Debug, Clone, Default)]
pub struct MoveParams {
    /// (tb, rot, coefficient) of the focused component before the move
    /// and its expected (dtb, drot).
    pub focus: Option<FocusParams>,
    /// Framing data for handle slides.
    pub slide: Option<SlideParams>,
}

#[derive(Debug, Clone, Copy)]
pub struct FocusParams {
    pub tb: i64,
    pub rot: i64,
    pub coefficient: Option<Rational>,
    pub dtb: i64,
    pub drot: i64,
}

#[derive(Debug, Clone, Copy)]
pub struct SlideParams {
    pub f_i: Rational,
    pub f_j: Rational,
    pub lk: i64,
    /// +1 for addition, -1 for subtraction.
    pub eps: i64,
}

/// The contract table.
pub fn contract_for(kind: MoveKind) -> &'static [Clause] {
    use Clause::*;
    use MoveKind::*;
    match kind {
        // The kink moves change the writhe by design, so the Reidemeister
        // contract pins the invariant content only; commutation preserves
        // every diagram count.
        Reidemeister => &[
            ClassicalPreserved,
            LkPreserved,
            ComponentCountDelta(0),
            H1Preserved,
            D3Preserved,
        ],
        FarCommute => &[
            ClassicalWithWrithePreserved,
            LkPreserved,
            ComponentCountDelta(0),
            H1Preserved,
            D3Preserved,
        ],
        RouteFinger | Move4 | Move5 | MeridianIsotopy1 | MeridianIsotopy2 | MeridianIsotopy3 => &[
            ClassicalPreserved,
            LkPreserved,
            ComponentCountDelta(0),
            H1Preserved,
            D3Preserved,
        ],
        Stabilize | Destabilize | Twist => &[FocusDelta, ComponentCountDelta(0)],
        Pinch | ConnectSum | CompleteLong => &[],
        Pushoff | InsertMeridian => &[ComponentCountDelta(1)],
        HandleSlide | OneHandleSlide => &[
            CoefficientsPreserved,
            SlideFraming,
            ComponentCountDelta(0),
            H1Preserved,
            D3Preserved,
        ],
        Move6 | LightBulb => &[
            CoefficientsPreserved,
            FocusDelta,
            ComponentCountDelta(0),
            H1Preserved,
            D3Preserved,
        ],
        CancelPairInsert | FirstKirbyAdd => &[ComponentCountDelta(2), H1Preserved, D3Preserved],
        CancelPairRemove | FirstKirbyRemove => &[ComponentCountDelta(-2), H1Preserved, D3Preserved],
        PushoffMeridianForward | PushoffMeridianBackward => &[
            ComponentCountDelta(0),
            CoefficientsPreserved,
            H1Preserved,
            D3Preserved,
        ],
        SharkStabilize | SharkDestabilize => &[
            FocusDelta,
            ComponentCountDelta(0),
            CoefficientsPreserved,
            H1Preserved,
            D3Preserved,
        ],
        ReplaceOneHandles | RolfsenTwistView => &[],
        ReverseOrientation => &[ComponentCountDelta(0), H1Preserved, D3Preserved],
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseReport {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub move_name: String,
    pub clauses: Vec<ClauseReport>,
    pub pass: bool,
}

fn clause_report<T: std::fmt::Debug + PartialEq>(name: &str, expected: T, actual: T) -> ClauseReport {
    let pass = expected == actual;
    ClauseReport {
        name: name.to_string(),
        expected: format!("{:?}", expected),
        actual: format!("{:?}", actual),
        pass,
    }
}

/// Evaluates the contract of `kind` on the two ledgers.
pub fn check_move(
    before: &InvariantLedger,
    after: &InvariantLedger,
    kind: MoveKind,
    params: &MoveParams,
) -> VerificationReport {
    let mut clauses = Vec::new();
    for clause in contract_for(kind) {
        match clause {
            Clause::ClassicalPreserved => clauses.push(clause_report(
                "classical invariants preserved",
                before.classical_multiset(),
                after.classical_multiset(),
            )),
            Clause::ClassicalWithWrithePreserved => clauses.push(clause_report(
                "classical invariants and writhes preserved",
                before.classical_multiset_with_writhe(),
                after.classical_multiset_with_writhe(),
            )),
            Clause::LkPreserved => clauses.push(clause_report(
                "linking data preserved",
                before.lk_multiset(),
                after.lk_multiset(),
            )),
            Clause::ComponentCountDelta(d) => clauses.push(clause_report(
                "component count",
                before.components.len() as i64 + d,
                after.components.len() as i64,
            )),
            Clause::CoefficientsPreserved => clauses.push(clause_report(
                "contact coefficients preserved",
                before.coefficient_multiset(),
                after.coefficient_multiset(),
            )),
            Clause::H1Preserved => clauses.push(clause_report(
                "first homology preserved",
                &before.h1,
                &after.h1,
            )),
            Clause::D3Preserved => {
                let expected = (before.d3.defined, before.d3.value.clone());
                let actual = (after.d3.defined, after.d3.value.clone());
                let pass = expected.0 == actual.0 && (!expected.0 || expected.1 == actual.1);
                clauses.push(ClauseReport {
                    name: "d3 preserved".to_string(),
                    expected: format!("{:?}", expected),
                    actual: format!("{:?}", actual),
                    pass,
                });
            }
            Clause::FocusDelta => {
                if let Some(f) = &params.focus {
                    let mut expected = before.classical_multiset();
                    let key = (f.tb, f.rot, f.coefficient);
                    if let Some(i) = expected.iter().position(|&e| e == key) {
                        expected.remove(i);
                    }
                    expected.push((f.tb + f.dtb, f.rot + f.drot, f.coefficient));
                    expected.sort();
                    clauses.push(clause_report(
                        "focused component delta",
                        expected,
                        after.classical_multiset(),
                    ));
                } else {
                    clauses.push(ClauseReport {
                        name: "focused component delta".to_string(),
                        expected: "focus parameters".to_string(),
                        actual: "missing".to_string(),
                        pass: false,
                    });
                }
            }
            Clause::SlideFraming => {
                if let Some(s) = &params.slide {
                    let f_new = s.f_i + s.f_j + Rational::from_integer(2 * s.eps * s.lk);
                    let mut expected = before.topological_multiset();
                    if let Some(i) = expected.iter().position(|&e| e == s.f_i) {
                        expected.remove(i);
                    }
                    expected.push(f_new);
                    expected.sort();
                    clauses.push(clause_report(
                        "slide framing rule",
                        expected,
                        after.topological_multiset(),
                    ));
                } else {
                    // Marked knots carry no framing; nothing to check.
                    clauses.push(ClauseReport {
                        name: "slide framing rule".to_string(),
                        expected: "no framing (marked knot)".to_string(),
                        actual: "skipped".to_string(),
                        pass: true,
                    });
                }
            }
        }
    }
    let pass = clauses.iter().all(|c| c.pass);
    VerificationReport { move_name: format!("{:?}", kind), clauses, pass }
}

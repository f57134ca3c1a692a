//! Move scripts: parsing and verified execution.
//!
//! A script is a line-based list of move invocations with `key=value`
//! arguments; `#` starts a comment. Components are referenced by the
//! names of the input file; after a move that changes the component
//! structure, components are renamed positionally to `c0`, `c1`, ... in
//! canonical order.
//!
//! Sites are written `gap`, `gap.pos` or `gap.pos.pos2`.

use crate::format::NamedDiagram;
use csd_core::front::{Sign, Site};
use csd_core::kirby::{self, MoveKind, SlideOrientation};
use csd_core::rewrite::{RKind, RMove};
use csd_core::verify::{self, FocusParams, MoveParams, SlideParams, VerificationReport};
use csd_core::ComponentRef;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("script line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("step {step} ({mv}): {message}")]
    Apply { step: usize, mv: String, message: String },
    #[error("step {step} ({mv}): verification failed")]
    Verification { step: usize, mv: String, report: Box<VerificationReport> },
}

#[derive(Debug, Clone)]
pub struct Step {
    pub line: usize,
    pub command: String,
    pub args: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct MoveScript {
    pub steps: Vec<Step>,
}

pub fn parse_script(text: &str) -> Result<MoveScript, ScriptError> {
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let command = parts.next().unwrap().to_string();
        let mut args = BTreeMap::new();
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(|| ScriptError::Parse {
                line,
                message: format!("expected key=value, found {part}"),
            })?;
            args.insert(k.to_string(), v.to_string());
        }
        steps.push(Step { line, command, args });
    }
    Ok(MoveScript { steps })
}

fn parse_site(s: &str) -> Option<Site> {
    let mut it = s.split('.');
    let gap = it.next()?.parse().ok()?;
    let pos = match it.next() {
        Some(p) => p.parse().ok()?,
        None => 1,
    };
    let pos2 = match it.next() {
        Some(p) => Some(p.parse().ok()?),
        None => None,
    };
    Some(Site { gap, pos, pos2 })
}

struct StepCtx<'a> {
    step: usize,
    mv: &'a str,
}

impl StepCtx<'_> {
    fn err(&self, message: impl ToString) -> ScriptError {
        ScriptError::Apply {
            step: self.step,
            mv: self.mv.to_string(),
            message: message.to_string(),
        }
    }

    fn arg<'s>(&self, args: &'s BTreeMap<String, String>, key: &str) -> Result<&'s str, ScriptError> {
        args.get(key).map(String::as_str).ok_or_else(|| self.err(format!("missing {key}=")))
    }

    fn site(&self, args: &BTreeMap<String, String>, key: &str) -> Result<Site, ScriptError> {
        parse_site(self.arg(args, key)?).ok_or_else(|| self.err(format!("bad site in {key}=")))
    }

    fn comp(
        &self,
        nd: &NamedDiagram,
        args: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<usize, ScriptError> {
        let name = self.arg(args, key)?;
        nd.resolve(name).ok_or_else(|| self.err(format!("unknown component {name}")))
    }

    fn sign(&self, args: &BTreeMap<String, String>, key: &str) -> Result<Sign, ScriptError> {
        match self.arg(args, key)? {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            other => Err(self.err(format!("bad sign {other}"))),
        }
    }
}

/// Applies the script. With `verify` on, every step's ledgers are
/// compared under the move's contract; the first failing step aborts.
pub fn run_script(
    start: &NamedDiagram,
    script: &MoveScript,
    verify_steps: bool,
) -> Result<(NamedDiagram, Vec<VerificationReport>), ScriptError> {
    let mut nd = start.clone();
    let mut reports = Vec::new();
    for (step_no, step) in script.steps.iter().enumerate() {
        let ctx = StepCtx { step: step_no, mv: &step.command };
        let before_count = nd.diagram.component_count();
        let ledger_before = verify::ledger(&nd.diagram).ok();
        let mut params = MoveParams::default();

        let (diagram, kind) = apply_step(&nd, step, &ctx, &mut params)?;
        let kept_names = diagram.component_count() == before_count;
        let new_nd = if kept_names {
            NamedDiagram {
                diagram,
                names: nd.names.clone(),
                handle_names: nd.handle_names.clone(),
            }
        } else {
            NamedDiagram::renumbered(diagram)
        };

        if verify_steps {
            let report = match (ledger_before, verify::ledger(&new_nd.diagram).ok()) {
                (Some(before), Some(after)) => verify::check_move(&before, &after, kind, &params),
                _ => VerificationReport {
                    move_name: format!("{kind:?}"),
                    clauses: vec![verify_skip_clause()],
                    pass: true,
                },
            };
            if !report.pass {
                return Err(ScriptError::Verification {
                    step: step_no,
                    mv: step.command.clone(),
                    report: Box::new(report),
                });
            }
            reports.push(report);
        }
        nd = new_nd;
    }
    Ok((nd, reports))
}

fn verify_skip_clause() -> csd_core::verify::ClauseReport {
    csd_core::verify::ClauseReport {
        name: "ledger".to_string(),
        expected: "closed diagram".to_string(),
        actual: "not closed; ledger skipped".to_string(),
        pass: true,
    }
}

fn apply_step(
    nd: &NamedDiagram,
    step: &Step,
    ctx: &StepCtx<'_>,
    params: &mut MoveParams,
) -> Result<(csd_core::SurgeryDiagram, MoveKind), ScriptError> {
    let sd = &nd.diagram;
    let args = &step.args;
    let focus_of = |c: usize, dtb: i64, drot: i64| -> Result<FocusParams, ScriptError> {
        let inv = sd.front.classical(ComponentRef(c)).map_err(|e| ctx.err(e))?;
        Ok(FocusParams {
            tb: inv.tb,
            rot: inv.rot,
            coefficient: sd.roles[c].coefficient(),
            dtb,
            drot,
        })
    };

    match step.command.as_str() {
        "stabilize" => {
            let c = ctx.comp(nd, args, "c")?;
            let sign = ctx.sign(args, "sign")?;
            let site = ctx.site(args, "at")?;
            let drot = if sign == Sign::Plus { 1 } else { -1 };
            params.focus = Some(focus_of(c, -1, drot)?);
            let rw = sd.front.stabilize(ComponentRef(c), sign, site).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::Stabilize))
        }
        "destabilize" => {
            let site = ctx.site(args, "at")?;
            // The removed zigzag belongs to the component born at the
            // left cusp; its sign fixes the rot delta.
            if site.gap + 1 < sd.front.events.len() {
                if let csd_core::Event::LeftCusp(a) = sd.front.events[site.gap] {
                    if let Ok(cs) = sd.front.validate() {
                        if let Some(c) = cs.comp_of(site.gap + 1, a) {
                            if let Some(sign) = classify_zigzag(sd, site) {
                                let drot =
                                    if sign == kirby::ZigzagSign::Plus { -1 } else { 1 };
                                params.focus = Some(focus_of(c, 1, drot)?);
                            }
                        }
                    }
                }
            }
            let rw = sd.front.destabilize(site).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::Destabilize))
        }
        "twist" => {
            let c = ctx.comp(nd, args, "c")?;
            let sign = ctx.sign(args, "sign")?;
            let site = ctx.site(args, "at")?;
            let dtb = if sign == Sign::Plus { 0 } else { -2 };
            params.focus = Some(focus_of(c, dtb, 0)?);
            let rw = sd.front.add_twist(ComponentRef(c), sign, site).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::Twist))
        }
        "pinch" => {
            let site = ctx.site(args, "at")?;
            let rw = sd.front.pinch(site).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::Pinch))
        }
        "connectsum" => {
            let a = ctx.comp(nd, args, "a")?;
            let b = ctx.comp(nd, args, "b")?;
            let site = ctx.site(args, "at")?;
            let pos2 = site.pos2.ok_or_else(|| ctx.err("at= needs gap.posA.posB"))?;
            let rw = sd
                .front
                .connect_sum(
                    ComponentRef(a),
                    Site::new(site.gap, site.pos),
                    ComponentRef(b),
                    Site::new(site.gap, pos2),
                )
                .map_err(|e| ctx.err(e))?;
            let merged = rw.old_to_new[a].ok_or_else(|| ctx.err("merge lost component"))?;
            let role = sd.roles[a];
            Ok((
                sd.rebuild_from(&rw, &[(merged, role)]).map_err(|e| ctx.err(e))?,
                MoveKind::ConnectSum,
            ))
        }
        "pushoff" => {
            let c = ctx.comp(nd, args, "c")?;
            let (rw, copy) = sd.front.pushoff(ComponentRef(c)).map_err(|e| ctx.err(e))?;
            Ok((
                sd.rebuild_from(&rw, &[(copy.0, csd_core::ComponentRole::MarkedKnot)])
                    .map_err(|e| ctx.err(e))?,
                MoveKind::Pushoff,
            ))
        }
        "meridian" => {
            let c = ctx.comp(nd, args, "c")?;
            let site = ctx.site(args, "at")?;
            let (rw, mu) =
                sd.front.insert_meridian(ComponentRef(c), site).map_err(|e| ctx.err(e))?;
            Ok((
                sd.rebuild_from(&rw, &[(mu.0, csd_core::ComponentRole::MarkedKnot)])
                    .map_err(|e| ctx.err(e))?,
                MoveKind::InsertMeridian,
            ))
        }
        "completelong" => {
            let rw = sd.front.complete_long().map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::CompleteLong))
        }
        "routefinger" => {
            let from = ctx.site(args, "from")?;
            let to = ctx.site(args, "to")?;
            let rw = sd.front.route_finger(from, to).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::RouteFinger))
        }
        "reverse" => {
            let c = ctx.comp(nd, args, "c")?;
            let front = sd.front.reverse_orientation(ComponentRef(c)).map_err(|e| ctx.err(e))?;
            let out = csd_core::SurgeryDiagram {
                front,
                roles: sd.roles.clone(),
                used_sharks: sd.used_sharks.clone(),
            };
            Ok((out, MoveKind::ReverseOrientation))
        }
        "farcommute" => {
            let gap: usize = ctx
                .arg(args, "gap")?
                .parse()
                .map_err(|_| ctx.err("bad gap index"))?;
            let rw = sd.front.far_commute(gap).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::FarCommute))
        }
        "reidemeister" => {
            let kind = match ctx.arg(args, "kind")? {
                "r1" => RKind::R1,
                "r2" => RKind::R2,
                "r3" => RKind::R3,
                other => return Err(ctx.err(format!("unknown move kind {other}"))),
            };
            let variant = ctx.arg(args, "variant")?.to_string();
            let forward = match args.get("forward").map(String::as_str) {
                None | Some("true") => true,
                Some("false") => false,
                Some(other) => return Err(ctx.err(format!("bad forward={other}"))),
            };
            let site = ctx.site(args, "at")?;
            let mv = RMove { kind, variant, forward };
            let (rw, _) = sd.front.apply_reidemeister(&mv, site).map_err(|e| ctx.err(e))?;
            Ok((sd.rebuild_from(&rw, &[]).map_err(|e| ctx.err(e))?, MoveKind::Reidemeister))
        }
        "slide" => {
            let i = ctx.comp(nd, args, "i")?;
            let j = ctx.comp(nd, args, "j")?;
            let orientation = match ctx.arg(args, "orient")? {
                "add" => SlideOrientation::Add,
                "subtract" => SlideOrientation::Subtract,
                other => return Err(ctx.err(format!("bad orient={other}"))),
            };
            // The framing clause is checked against the claimed
            // orientation (claim= defaults to the applied one), so a
            // wrong claim is caught by verification.
            let claimed = match args.get("claim").map(String::as_str) {
                None => orientation,
                Some("add") => SlideOrientation::Add,
                Some("subtract") => SlideOrientation::Subtract,
                Some(other) => return Err(ctx.err(format!("bad claim={other}"))),
            };
            let eps = if claimed == SlideOrientation::Add { 1 } else { -1 };
            if let (Ok(f_i), Ok(f_j)) = (
                sd.topological_coefficient(ComponentRef(i)),
                sd.topological_coefficient(ComponentRef(j)),
            ) {
                let lk = sd.front.lk(ComponentRef(i), ComponentRef(j)).map_err(|e| ctx.err(e))?;
                params.slide = Some(SlideParams { f_i, f_j, lk, eps });
            }
            let out = kirby::handle_slide(sd, i, j, orientation).map_err(|e| ctx.err(e))?;
            Ok((out, MoveKind::HandleSlide))
        }
        "cancelinsert" => {
            let word = ctx.arg(args, "word")?;
            let events: Result<Vec<_>, _> = word
                .split(',')
                .map(|t| crate::format::parse_event(t, step.line, 0))
                .collect();
            let events = events.map_err(|e| ctx.err(e))?;
            let base = csd_core::FrontDiagram::closed(events).map_err(|e| ctx.err(e))?;
            let site = ctx.site(args, "at")?;
            let (out, _) = kirby::cancel_pair_insert(sd, &base, site).map_err(|e| ctx.err(e))?;
            Ok((out, MoveKind::CancelPairInsert))
        }
        "cancelremove" => {
            let a = ctx.comp(nd, args, "a")?;
            let b = ctx.comp(nd, args, "b")?;
            let out = kirby::cancel_pair_remove(sd, a, b).map_err(|e| ctx.err(e))?;
            Ok((out, MoveKind::CancelPairRemove))
        }
        "pushmeridian" => {
            let base = ctx.comp(nd, args, "base")?;
            let target = ctx.comp(nd, args, "target")?;
            let forward = match ctx.arg(args, "dir")? {
                "forward" => true,
                "backward" => false,
                other => return Err(ctx.err(format!("bad dir={other}"))),
            };
            let out = kirby::pushoff_meridian(sd, base, target, forward).map_err(|e| ctx.err(e))?;
            Ok((
                out,
                if forward {
                    MoveKind::PushoffMeridianForward
                } else {
                    MoveKind::PushoffMeridianBackward
                },
            ))
        }
        "firstkirby" => match ctx.arg(args, "dir")? {
            "add" => {
                let site = ctx.site(args, "at")?;
                let out = kirby::first_kirby_add(sd, site).map_err(|e| ctx.err(e))?;
                Ok((out, MoveKind::FirstKirbyAdd))
            }
            "remove" => {
                let out = kirby::first_kirby_remove(sd).map_err(|e| ctx.err(e))?;
                Ok((out, MoveKind::FirstKirbyRemove))
            }
            other => Err(ctx.err(format!("bad dir={other}"))),
        },
        "shark" => {
            let c = ctx.comp(nd, args, "c")?;
            let destab = match ctx.arg(args, "dir")? {
                "destabilize" => true,
                "stabilize" => false,
                other => return Err(ctx.err(format!("bad dir={other}"))),
            };
            let site = ctx.site(args, "at")?;
            let sign = match args.get("sign").map(String::as_str) {
                Some("+") | None => kirby::ZigzagSign::Plus,
                Some("-") => kirby::ZigzagSign::Minus,
                Some(other) => return Err(ctx.err(format!("bad sign {other}"))),
            };
            let zigzag_sign = if destab {
                classify_zigzag(sd, site).ok_or_else(|| ctx.err("no zigzag at site"))?
            } else {
                sign
            };
            let s = if zigzag_sign == kirby::ZigzagSign::Plus { 1 } else { -1 };
            let (dtb, drot) = if destab { (1, -s) } else { (-1, s) };
            let inv = sd.front.classical(ComponentRef(c)).map_err(|e| ctx.err(e))?;
            params.focus = Some(FocusParams {
                tb: inv.tb,
                rot: inv.rot,
                coefficient: sd.roles[c].coefficient(),
                dtb,
                drot,
            });
            let out =
                kirby::shark_move(sd, c, destab, site, Some(sign)).map_err(|e| ctx.err(e))?;
            Ok((
                out,
                if destab { MoveKind::SharkDestabilize } else { MoveKind::SharkStabilize },
            ))
        }
        "replacehandles" => {
            let out = kirby::replace_one_handles(sd).map_err(|e| ctx.err(e))?;
            Ok((out, MoveKind::ReplaceOneHandles))
        }
        "move4" => {
            let l0 = ctx.comp(nd, args, "l0")?;
            Ok((kirby::move4(sd, l0).map_err(|e| ctx.err(e))?, MoveKind::Move4))
        }
        "move5" => {
            let l0 = ctx.comp(nd, args, "l0")?;
            Ok((kirby::move5(sd, l0).map_err(|e| ctx.err(e))?, MoveKind::Move5))
        }
        "move6" | "lightbulb" => {
            let c = ctx.comp(nd, args, "c")?;
            let l0 = ctx.comp(nd, args, "l0")?;
            params.focus = Some(focus_of(c, -2, 0)?);
            let out = kirby::move6(sd, c, l0).map_err(|e| ctx.err(e))?;
            let kind = if step.command == "move6" { MoveKind::Move6 } else { MoveKind::LightBulb };
            Ok((out, kind))
        }
        "meridianisotopy" => {
            let kind: u8 = ctx
                .arg(args, "kind")?
                .parse()
                .map_err(|_| ctx.err("kind must be 1, 2 or 3"))?;
            let l0 = ctx.comp(nd, args, "l0")?;
            let to = if kind == 3 {
                Site::new(0, 1)
            } else {
                ctx.site(args, "to")?
            };
            let out = kirby::meridian_isotopy(sd, kind, l0, to).map_err(|e| ctx.err(e))?;
            let mk = match kind {
                1 => MoveKind::MeridianIsotopy1,
                2 => MoveKind::MeridianIsotopy2,
                _ => MoveKind::MeridianIsotopy3,
            };
            Ok((out, mk))
        }
        "onehandleslide" => {
            let a = ctx.comp(nd, args, "a")?;
            let b = ctx.comp(nd, args, "b")?;
            let orientation = match ctx.arg(args, "orient")? {
                "add" => SlideOrientation::Add,
                "subtract" => SlideOrientation::Subtract,
                other => return Err(ctx.err(format!("bad orient={other}"))),
            };
            let eps = if orientation == SlideOrientation::Add { 1 } else { -1 };
            if let (Ok(f_i), Ok(f_j)) = (
                sd.topological_coefficient(ComponentRef(a)),
                sd.topological_coefficient(ComponentRef(b)),
            ) {
                let lk = sd.front.lk(ComponentRef(a), ComponentRef(b)).map_err(|e| ctx.err(e))?;
                params.slide = Some(SlideParams { f_i, f_j, lk, eps });
            }
            let out = kirby::one_handle_slide(sd, a, b, orientation).map_err(|e| ctx.err(e))?;
            Ok((out, MoveKind::OneHandleSlide))
        }
        "rolfsen" => {
            let l0 = ctx.comp(nd, args, "l0")?;
            let c = ctx.comp(nd, args, "c")?;
            let report = kirby::rolfsen_twist_view(sd, l0, c).map_err(|e| ctx.err(e))?;
            println!(
                "rolfsen view: surface framing {} tb={} rot={} stabilization class {:?}",
                report.surface_framing_coefficient, report.tb, report.rot,
                report.stabilization_class
            );
            Ok((sd.clone(), MoveKind::RolfsenTwistView))
        }
        other => Err(ctx.err(format!("unknown move {other}"))),
    }
}

/// Classifies the zigzag starting at `site.gap` by its cusp traversal.
fn classify_zigzag(sd: &csd_core::SurgeryDiagram, site: Site) -> Option<kirby::ZigzagSign> {
    let cs = sd.front.validate().ok()?;
    let i = site.gap;
    let downs = cs
        .cusps
        .iter()
        .filter(|cu| cu.event == i || cu.event == i + 1)
        .filter(|cu| cu.down)
        .count();
    match downs {
        2 => Some(kirby::ZigzagSign::Plus),
        0 => Some(kirby::ZigzagSign::Minus),
        _ => None,
    }
}

/// JSON rendering of verification reports, schema:
/// `{"step": n, "move": "...", "clauses": [{"name", "expected", "actual", "pass"}]}`.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    fn esc(s: &str) -> String {
        s.replace('\\', "\\\\").replace('"', "\\\"")
    }
    let mut out = String::from("[");
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"step\":{},\"move\":\"{}\",\"pass\":{},\"clauses\":[",
            i,
            esc(&r.move_name),
            r.pass
        ));
        for (j, c) in r.clauses.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"name\":\"{}\",\"expected\":\"{}\",\"actual\":\"{}\",\"pass\":{}}}",
                esc(&c.name),
                esc(&c.expected),
                esc(&c.actual),
                c.pass
            ));
        }
        out.push_str("]}");
    }
    out.push(']');
    out
}

/// Checked against the shipped first-Kirby block data file.
pub fn default_block_file_matches() -> bool {
    let (block, roles) = kirby::default_first_kirby_block();
    let text = include_str!("../../core/data/first_kirby_block.txt");
    match crate::format::parse_diagram(text) {
        Ok(nd) => {
            nd.diagram.front.events == block.events && nd.diagram.roles == roles
        }
        Err(_) => false,
    }
}

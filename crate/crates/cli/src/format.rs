//! Plain-text diagram files.
//!
//! Line-based format, one diagram per file:
//!
//! ```text
//! kind: closed | long | standard(k)
//! word: L1 X2 R1 ...
//! handle <name>: left=<a>..<b> right=<c>..<d>
//! comp <name>: orient=+|- coeff=<p>/<q>|+1|-1|marked
//! ```
//!
//! `comp` lines appear in canonical component order. Serialization is
//! canonical: parsing a serialized diagram and serializing it again is a
//! byte-identity.

use csd_core::front::{DiagramKind, Event, FrontDiagram, Handle, Orientation};
use csd_core::surgery::{ComponentRole, Rational, SurgeryDiagram};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

fn syntax(line: usize, col: usize, expected: &str) -> ParseError {
    ParseError::Syntax { line, col, expected: expected.to_string() }
}

fn semantic(line: usize, message: String) -> ParseError {
    ParseError::Semantic { line, message }
}

/// A surgery diagram together with its component names, file order =
/// canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedDiagram {
    pub diagram: SurgeryDiagram,
    pub names: Vec<String>,
    pub handle_names: Vec<String>,
}

impl NamedDiagram {
    pub fn resolve(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        // cN always addresses the component at canonical index N.
        name.strip_prefix('c').and_then(|rest| rest.parse().ok()).filter(|&i| i < self.names.len())
    }

    /// Positional names for a diagram whose structure changed.
    pub fn renumbered(diagram: SurgeryDiagram) -> NamedDiagram {
        let names = (0..diagram.component_count()).map(|i| format!("c{i}")).collect();
        let handle_names =
            (0..diagram.front.handles.len()).map(|i| format!("h{i}")).collect();
        NamedDiagram { diagram, names, handle_names }
    }
}

pub fn parse_event(tok: &str, line: usize, col: usize) -> Result<Event, ParseError> {
    let (letter, digits) = tok.split_at(1);
    let pos: usize = digits
        .parse()
        .map_err(|_| syntax(line, col, "event position"))?;
    if pos == 0 {
        return Err(syntax(line, col, "positive position"));
    }
    match letter {
        "L" => Ok(Event::LeftCusp(pos)),
        "R" => Ok(Event::RightCusp(pos)),
        "X" => Ok(Event::Crossing(pos)),
        _ => Err(syntax(line, col, "event letter L, R or X")),
    }
}

fn parse_coeff(s: &str, line: usize) -> Result<ComponentRole, ParseError> {
    if s == "marked" {
        return Ok(ComponentRole::MarkedKnot);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.parse::<i64>().map_err(|_| semantic(line, format!("bad coefficient {s}")))?,
            d.parse::<i64>().map_err(|_| semantic(line, format!("bad coefficient {s}")))?,
        ),
        None => (
            s.parse::<i64>().map_err(|_| semantic(line, format!("bad coefficient {s}")))?,
            1,
        ),
    };
    if den <= 0 {
        return Err(semantic(line, format!("denominator must be positive in {s}")));
    }
    if num == 0 {
        return Err(semantic(line, "contact 0-surgery is excluded".to_string()));
    }
    Ok(ComponentRole::SurgeryCurve { coefficient: Rational::new(num, den) })
}

pub fn parse_diagram(text: &str) -> Result<NamedDiagram, ParseError> {
    let mut kind: Option<DiagramKind> = None;
    let mut word: Option<Vec<Event>> = None;
    let mut handles: Vec<Handle> = Vec::new();
    let mut handle_names: Vec<String> = Vec::new();
    let mut comps: Vec<(String, Orientation, ComponentRole)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(line_no, line.len(), "':' after the line keyword"))?;
        let rest = rest.trim();
        let mut head_words = head.split_whitespace();
        match head_words.next() {
            Some("kind") => {
                kind = Some(match rest {
                    "closed" => DiagramKind::Closed,
                    "long" => DiagramKind::Long,
                    other => {
                        let inner = other
                            .strip_prefix("standard(")
                            .and_then(|s| s.strip_suffix(')'))
                            .ok_or_else(|| {
                                syntax(line_no, head.len() + 2, "closed, long or standard(k)")
                            })?;
                        let k: usize = inner
                            .parse()
                            .map_err(|_| syntax(line_no, head.len() + 2, "boundary count"))?;
                        DiagramKind::StandardForm { boundary: k }
                    }
                });
            }
            Some("word") => {
                let mut events = Vec::new();
                let mut col = head.len() + 2;
                for tok in rest.split_whitespace() {
                    events.push(parse_event(tok, line_no, col)?);
                    col += tok.len() + 1;
                }
                word = Some(events);
            }
            Some("handle") => {
                let name = head_words
                    .next()
                    .ok_or_else(|| syntax(line_no, 7, "handle name"))?
                    .to_string();
                let mut left = None;
                let mut right = None;
                for part in rest.split_whitespace() {
                    let (key, val) = part
                        .split_once('=')
                        .ok_or_else(|| syntax(line_no, 0, "key=value"))?;
                    let (a, b) = val
                        .split_once("..")
                        .ok_or_else(|| syntax(line_no, 0, "range a..b"))?;
                    let a: usize =
                        a.parse().map_err(|_| syntax(line_no, 0, "range start"))?;
                    let b: usize = b.parse().map_err(|_| syntax(line_no, 0, "range end"))?;
                    if b < a {
                        return Err(semantic(line_no, format!("empty range {val}")));
                    }
                    match key {
                        "left" => left = Some((a, b)),
                        "right" => right = Some((a, b)),
                        other => {
                            return Err(semantic(line_no, format!("unknown handle key {other}")))
                        }
                    }
                }
                let (l, r) = match (left, right) {
                    (Some(l), Some(r)) => (l, r),
                    _ => return Err(semantic(line_no, "handle needs left= and right=".into())),
                };
                if l.1 - l.0 != r.1 - r.0 {
                    return Err(semantic(line_no, "handle blocks differ in size".into()));
                }
                handles.push(Handle {
                    left_start: l.0,
                    right_start: r.0,
                    size: l.1 - l.0 + 1,
                });
                handle_names.push(name);
            }
            Some("comp") => {
                let name = head_words
                    .next()
                    .ok_or_else(|| syntax(line_no, 5, "component name"))?
                    .to_string();
                let mut orient = None;
                let mut role = None;
                for part in rest.split_whitespace() {
                    let (key, val) = part
                        .split_once('=')
                        .ok_or_else(|| syntax(line_no, 0, "key=value"))?;
                    match key {
                        "orient" => {
                            orient = Some(match val {
                                "+" => Orientation::Plus,
                                "-" => Orientation::Minus,
                                _ => return Err(syntax(line_no, 0, "orient=+ or orient=-")),
                            })
                        }
                        "coeff" => role = Some(parse_coeff(val, line_no)?),
                        other => {
                            return Err(semantic(line_no, format!("unknown comp key {other}")))
                        }
                    }
                }
                let orient = orient
                    .ok_or_else(|| semantic(line_no, "comp needs orient=".into()))?;
                let role =
                    role.ok_or_else(|| semantic(line_no, "comp needs coeff=".into()))?;
                comps.push((name, orient, role));
            }
            Some(other) => {
                return Err(semantic(line_no, format!("unknown keyword {other}")));
            }
            None => return Err(syntax(line_no, 0, "keyword")),
        }
    }

    let kind = kind.ok_or_else(|| semantic(0, "missing kind line".into()))?;
    let word = word.ok_or_else(|| semantic(0, "missing word line".into()))?;

    // Probe the word first so component-count mismatches read clearly.
    let probe = FrontDiagram::with_kind(kind, word.clone(), handles.clone())
        .map_err(|e| semantic(0, format!("invalid word: {e}")))?;
    if probe.orientations.len() != comps.len() {
        return Err(semantic(
            0,
            format!(
                "{} comp lines for {} components",
                comps.len(),
                probe.orientations.len()
            ),
        ));
    }
    let front = FrontDiagram {
        kind,
        events: word,
        handles,
        orientations: comps.iter().map(|(_, o, _)| *o).collect(),
    };
    front.validate().map_err(|e| semantic(0, format!("invalid word: {e}")))?;
    let roles = comps.iter().map(|(_, _, r)| *r).collect();
    let diagram = SurgeryDiagram::new(front, roles)
        .map_err(|e| semantic(0, format!("invalid diagram: {e}")))?;
    let names = comps.into_iter().map(|(n, _, _)| n).collect();
    Ok(NamedDiagram { diagram, names, handle_names })
}

pub fn serialize_diagram(nd: &NamedDiagram) -> String {
    let mut out = String::new();
    let front = &nd.diagram.front;
    match front.kind {
        DiagramKind::Closed => out.push_str("kind: closed\n"),
        DiagramKind::Long => out.push_str("kind: long\n"),
        DiagramKind::StandardForm { boundary } => {
            let _ = writeln!(out, "kind: standard({boundary})");
        }
    }
    if front.events.is_empty() {
        out.push_str("word:\n");
    } else {
        out.push_str("word:");
        for e in &front.events {
            let _ = write!(out, " {e}");
        }
        out.push('\n');
    }
    for (i, h) in front.handles.iter().enumerate() {
        let name = nd.handle_names.get(i).cloned().unwrap_or_else(|| format!("h{i}"));
        let _ = writeln!(
            out,
            "handle {}: left={}..{} right={}..{}",
            name,
            h.left_start,
            h.left_start + h.size - 1,
            h.right_start,
            h.right_start + h.size - 1
        );
    }
    for (i, role) in nd.diagram.roles.iter().enumerate() {
        let name = nd.names.get(i).cloned().unwrap_or_else(|| format!("c{i}"));
        let orient = match front.orientations[i] {
            Orientation::Plus => "+",
            Orientation::Minus => "-",
        };
        let coeff = match role {
            ComponentRole::MarkedKnot => "marked".to_string(),
            ComponentRole::SurgeryCurve { coefficient } => format_coeff(*coefficient),
        };
        let _ = writeln!(out, "comp {name}: orient={orient} coeff={coeff}");
    }
    out
}

pub fn format_coeff(c: Rational) -> String {
    if c == Rational::from_integer(1) {
        "+1".to_string()
    } else if *c.denom() == 1 {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

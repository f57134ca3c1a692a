//! Static front rendering: ascii grids and SVG.
//!
//! Layout is deterministic: events occupy consecutive columns, strands
//! run at integer tracks counted from the top. Crossings keep the
//! descending (over) strand continuous; the under strand is broken. Each
//! component's coefficient is shown at its first right cusp.

use crate::format::{format_coeff, NamedDiagram};
use csd_core::front::{CuspSide, Event};
use csd_core::surgery::ComponentRole;
use std::fmt::Write as _;

/// First right cusp event index per component, if any.
fn first_right_cusps(nd: &NamedDiagram) -> Vec<Option<usize>> {
    let cs = nd.diagram.front.validate().expect("valid diagram");
    let mut out = vec![None; nd.diagram.roles.len()];
    for cusp in &cs.cusps {
        if cusp.side == CuspSide::Right && out[cusp.component].is_none() {
            out[cusp.component] = Some(cusp.event);
        }
    }
    out
}

fn label_of(nd: &NamedDiagram, comp: usize) -> String {
    let name = nd.names.get(comp).cloned().unwrap_or_else(|| format!("c{comp}"));
    match nd.diagram.roles[comp] {
        ComponentRole::MarkedKnot => format!("{name}:marked"),
        ComponentRole::SurgeryCurve { coefficient } => {
            format!("{name}:{}", format_coeff(coefficient))
        }
    }
}

pub fn render_ascii(nd: &NamedDiagram) -> String {
    let front = &nd.diagram.front;
    let counts = front.strand_counts().expect("valid diagram");
    let max = counts.iter().copied().max().unwrap_or(0);
    if front.events.is_empty() {
        let mut s = String::from("(empty diagram)\n");
        for (i, _) in nd.diagram.roles.iter().enumerate() {
            let _ = writeln!(s, "{}", label_of(nd, i));
        }
        return s;
    }
    let cusps = first_right_cusps(nd);
    let width = front.events.len() * 4 + 2;
    let mut grid = vec![vec![' '; width]; max];
    // Horizontal runs between events.
    for (g, &k) in counts.iter().enumerate() {
        let x0 = if g == 0 { 0 } else { g * 4 };
        let x1 = if g == front.events.len() { width } else { g * 4 + 2 };
        for row in 0..k {
            for x in x0..x1 {
                grid[row][x] = '-';
            }
        }
    }
    // Event cells (two columns at x = 4g + 2). Rows are 0-based strand
    // positions before the event; cusps shift the rows below them.
    for (e, ev) in front.events.iter().enumerate() {
        let x = e * 4 + 2;
        let k = counts[e];
        match *ev {
            Event::LeftCusp(p) => {
                for r in 0..p.saturating_sub(1) {
                    grid[r][x] = '-';
                    grid[r][x + 1] = '-';
                }
                for r in (p - 1)..k {
                    grid[r][x] = '\\';
                    grid[r + 1][x + 1] = '\\';
                }
                grid[p - 1][x + 1] = '/';
                grid[p][x + 1] = '\\';
            }
            Event::RightCusp(p) => {
                for r in 0..p.saturating_sub(1) {
                    grid[r][x] = '-';
                    grid[r][x + 1] = '-';
                }
                grid[p - 1][x] = '\\';
                grid[p][x] = '/';
                for r in (p + 1)..k {
                    grid[r][x] = '/';
                    grid[r - 1][x + 1] = '/';
                }
            }
            Event::Crossing(p) => {
                for r in 0..k {
                    if r + 1 < p || r > p {
                        grid[r][x] = '-';
                        grid[r][x + 1] = '-';
                    }
                }
                grid[p - 1][x] = '\\';
                grid[p - 1][x + 1] = '/';
                grid[p][x] = '/';
                grid[p][x + 1] = '\\';
            }
        }
    }
    let mut out = String::new();
    let mut labels_done = vec![false; nd.diagram.roles.len()];
    for (row, line) in grid.iter().enumerate() {
        let mut s: String = line.iter().collect();
        // Attach labels on the row of the component's first right cusp.
        for (c, cusp) in cusps.iter().enumerate() {
            if let Some(e) = cusp {
                if let Event::RightCusp(p) = front.events[*e] {
                    if p - 1 == row && !labels_done[c] {
                        let _ = write!(s, "  [{}]", label_of(nd, c));
                        labels_done[c] = true;
                    }
                }
            }
        }
        let s = s.trim_end();
        let _ = writeln!(out, "{s}");
    }
    for (c, done) in labels_done.iter().enumerate() {
        if !done {
            let _ = writeln!(out, "[{}]", label_of(nd, c));
        }
    }
    out
}

const PALETTE: [&str; 6] = ["#1f628e", "#b03a2e", "#1e8449", "#7d3c98", "#b7950b", "#34495e"];

pub fn render_svg(nd: &NamedDiagram) -> String {
    let front = &nd.diagram.front;
    let counts = front.strand_counts().expect("valid diagram");
    let cs = front.validate().expect("valid diagram");
    let n = front.events.len();
    let max = counts.iter().copied().max().unwrap_or(0);
    let cell = 36.0;
    let track = 28.0;
    let width = (n as f64 + 2.0) * cell + 120.0;
    let height = (max as f64 + 1.5) * track;
    let x_of = |g: usize| -> f64 { (g as f64 + 0.5) * cell };
    let y_of = |pos: usize| -> f64 { pos as f64 * track };
    let color = |comp: usize| PALETTE[comp % PALETTE.len()];

    let mut body = String::new();
    // Horizontal runs per gap.
    for (g, &k) in counts.iter().enumerate() {
        let x0 = if g == 0 { 0.0 } else { x_of(g - 1) + cell };
        let x1 = if g == n { width - 100.0 } else { x_of(g) };
        for pos in 1..=k {
            let comp = cs.component[g][pos - 1];
            let _ = writeln!(
                body,
                "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
                x0,
                y_of(pos),
                x1,
                y_of(pos),
                color(comp)
            );
        }
    }
    // Events.
    for (e, ev) in front.events.iter().enumerate() {
        let xa = x_of(e);
        let xb = xa + cell;
        match *ev {
            Event::LeftCusp(p) => {
                let comp = cs.component[e + 1][p - 1];
                let ya = y_of(p);
                let yb = y_of(p + 1);
                let _ = writeln!(
                    body,
                    "  <path d=\"M {:.1} {:.1} Q {:.1} {:.1} {:.1} {:.1}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
                    xb, ya, xa, (ya + yb) / 2.0, xb, yb, color(comp)
                );
            }
            Event::RightCusp(p) => {
                let comp = cs.component[e][p - 1];
                let ya = y_of(p);
                let yb = y_of(p + 1);
                let _ = writeln!(
                    body,
                    "  <path d=\"M {:.1} {:.1} Q {:.1} {:.1} {:.1} {:.1}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
                    xa, ya, xb, (ya + yb) / 2.0, xa, yb, color(comp)
                );
            }
            Event::Crossing(p) => {
                let over = cs.component[e][p - 1];
                let under = cs.component[e][p];
                let ya = y_of(p);
                let yb = y_of(p + 1);
                // Over strand: full diagonal. Under strand: broken.
                let _ = writeln!(
                    body,
                    "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
                    xa, ya, xb, yb, color(over)
                );
                let (mx, my) = ((xa + xb) / 2.0, (ya + yb) / 2.0);
                let gap = 0.18;
                let _ = writeln!(
                    body,
                    "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
                    xa,
                    yb,
                    mx - gap * cell,
                    my + gap * (ya - yb),
                    color(under)
                );
                let _ = writeln!(
                    body,
                    "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
                    mx + gap * cell,
                    my - gap * (ya - yb),
                    xb,
                    ya,
                    color(under)
                );
            }
        }
    }
    // Coefficient labels at first right cusps.
    for (c, cusp) in first_right_cusps(nd).iter().enumerate() {
        if let Some(e) = cusp {
            if let Event::RightCusp(p) = front.events[*e] {
                let _ = writeln!(
                    body,
                    "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{}\">{}</text>",
                    x_of(*e) + cell + 4.0,
                    y_of(p) + 4.0,
                    color(c),
                    label_of(nd, c)
                );
            }
        } else {
            let _ = writeln!(
                body,
                "  <text x=\"4\" y=\"{:.1}\" font-size=\"12\" fill=\"{}\">{}</text>",
                12.0 + 14.0 * c as f64,
                color(c),
                label_of(nd, c)
            );
        }
    }

    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n{}</svg>\n",
        width, height, width, height, body
    )
}

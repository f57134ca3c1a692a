use clap::{Parser, Subcommand, ValueEnum};
use csd_cli::format::{parse_diagram, serialize_diagram, NamedDiagram, ParseError};
use csd_cli::render::{render_ascii, render_svg};
use csd_cli::script::{parse_script, reports_to_json, run_script, ScriptError};
use csd_core::verify;
use csd_core::ComponentRef;
use std::path::PathBuf;
use std::process::ExitCode;

/// Contact surgery diagram toolkit: validate, compute invariants, apply
/// verified move scripts and render fronts.
#[derive(Parser)]
#[command(name = "csd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a diagram file, reporting its components.
    Check { file: PathBuf },
    /// Print the invariant ledger of a diagram.
    Invariants {
        file: PathBuf,
        /// Emit the ledger as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Apply a move script to a diagram.
    Apply {
        file: PathBuf,
        script: PathBuf,
        /// Verify each step against its move contract.
        #[arg(long)]
        verify: bool,
        /// Write the resulting diagram here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the per-step verification reports as JSON.
        #[arg(long)]
        report_json: bool,
    },
    /// Render a diagram.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate standard diagrams.
    Gen {
        #[command(subcommand)]
        what: GenWhat,
    },
}

#[derive(Subcommand)]
enum GenWhat {
    /// Legendrian unknot with the given classical invariants.
    Unknot {
        #[arg(long, allow_hyphen_values = true)]
        tb: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        rot: i64,
        /// Generate a long (rather than closed) unknot.
        #[arg(long)]
        long: bool,
        /// Contact coefficient for the component (defaults to marked).
        #[arg(long, allow_hyphen_values = true)]
        coeff: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

const EXIT_PARSE: u8 = 1;
const EXIT_SEMANTIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn load(file: &PathBuf) -> Result<NamedDiagram, u8> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        EXIT_PARSE
    })?;
    parse_diagram(&text).map_err(|e| {
        eprintln!("error: {e}");
        match e {
            ParseError::Syntax { .. } => EXIT_PARSE,
            ParseError::Semantic { .. } => EXIT_SEMANTIC,
        }
    })
}

fn ledger_text(nd: &NamedDiagram) -> Result<String, u8> {
    use std::fmt::Write as _;
    let ledger = verify::ledger(&nd.diagram).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_SEMANTIC
    })?;
    let mut out = String::new();
    for (i, c) in ledger.components.iter().enumerate() {
        let name = &nd.names[i];
        let coeff = match c.role {
            csd_core::ComponentRole::MarkedKnot => "marked".to_string(),
            csd_core::ComponentRole::SurgeryCurve { coefficient } => {
                csd_cli::format::format_coeff(coefficient)
            }
        };
        let topo = c
            .topological
            .map(|t| format!(" topological={}", csd_cli::format::format_coeff(t)))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{name}: tb={} rot={} writhe={} coeff={coeff}{topo}",
            c.tb, c.rot, c.writhe
        );
    }
    if ledger.components.len() > 1 {
        let _ = writeln!(out, "linking matrix:");
        for i in 0..ledger.components.len() {
            let row: Vec<String> = ledger.lk[i].iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "  [{}]", row.join(", "));
        }
    }
    let _ = writeln!(out, "H1 = {}", ledger.h1);
    if ledger.d3.defined {
        let _ = writeln!(
            out,
            "d3 = {} (c^2 = {}, sigma = {}, chi = {}, q+ = {})",
            ledger.d3.value, ledger.d3.c_squared, ledger.d3.sigma, ledger.d3.chi, ledger.d3.q_plus
        );
    } else {
        let _ = writeln!(
            out,
            "d3 undefined ({})",
            ledger.d3.reason.clone().unwrap_or_default()
        );
    }
    Ok(out)
}

fn ledger_json(nd: &NamedDiagram) -> Result<String, u8> {
    let ledger = verify::ledger(&nd.diagram).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_SEMANTIC
    })?;
    fn esc(s: &str) -> String {
        s.replace('\\', "\\\\").replace('"', "\\\"")
    }
    let comps: Vec<String> = ledger
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            format!(
                "{{\"name\":\"{}\",\"tb\":{},\"rot\":{},\"writhe\":{},\"coeff\":\"{}\"}}",
                esc(&nd.names[i]),
                c.tb,
                c.rot,
                c.writhe,
                match c.role {
                    csd_core::ComponentRole::MarkedKnot => "marked".to_string(),
                    csd_core::ComponentRole::SurgeryCurve { coefficient } =>
                        csd_cli::format::format_coeff(coefficient),
                }
            )
        })
        .collect();
    let torsion: Vec<String> = ledger.h1.torsion.iter().map(|t| format!("\"{t}\"")).collect();
    let d3 = if ledger.d3.defined {
        format!("\"{}\"", ledger.d3.value)
    } else {
        "null".to_string()
    };
    Ok(format!(
        "{{\"components\":[{}],\"h1\":{{\"free_rank\":{},\"torsion\":[{}]}},\"d3\":{}}}",
        comps.join(","),
        ledger.h1.free_rank,
        torsion.join(","),
        d3
    ))
}

fn run() -> Result<(), u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file } => {
            let nd = load(&file)?;
            let n = nd.diagram.component_count();
            println!("ok: {} component{}", n, if n == 1 { "" } else { "s" });
            for (i, name) in nd.names.iter().enumerate() {
                let inv = nd
                    .diagram
                    .front
                    .classical(ComponentRef(i))
                    .map_err(|e| {
                        eprintln!("error: {e}");
                        EXIT_SEMANTIC
                    })?;
                println!("  {name}: tb={} rot={}", inv.tb, inv.rot);
            }
            Ok(())
        }
        Command::Invariants { file, json } => {
            let nd = load(&file)?;
            let text = if json { ledger_json(&nd)? } else { ledger_text(&nd)? };
            print!("{text}");
            if json {
                println!();
            }
            Ok(())
        }
        Command::Apply { file, script, verify, out, report_json } => {
            let nd = load(&file)?;
            let script_text = std::fs::read_to_string(&script).map_err(|e| {
                eprintln!("error: cannot read {}: {e}", script.display());
                EXIT_PARSE
            })?;
            let parsed = parse_script(&script_text).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_PARSE
            })?;
            let (result, reports) = run_script(&nd, &parsed, verify).map_err(|e| {
                eprintln!("error: {e}");
                match e {
                    ScriptError::Parse { .. } => EXIT_PARSE,
                    ScriptError::Apply { .. } => EXIT_SEMANTIC,
                    ScriptError::Verification { report, .. } => {
                        for clause in &report.clauses {
                            if !clause.pass {
                                eprintln!(
                                    "  clause '{}': expected {}, got {}",
                                    clause.name, clause.expected, clause.actual
                                );
                            }
                        }
                        EXIT_VERIFY
                    }
                }
            })?;
            if verify {
                for (i, r) in reports.iter().enumerate() {
                    println!("step {i} {}: pass", r.move_name);
                }
            }
            if report_json {
                println!("{}", reports_to_json(&reports));
            }
            let text = serialize_diagram(&result);
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    EXIT_SEMANTIC
                })?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Render { file, format, out } => {
            let nd = load(&file)?;
            let text = match format {
                Format::Ascii => render_ascii(&nd),
                Format::Svg => render_svg(&nd),
            };
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    EXIT_SEMANTIC
                })?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Gen { what } => match what {
            GenWhat::Unknot { tb, rot, long, coeff } => {
                let front =
                    csd_core::FrontDiagram::unknot_with_invariants(tb, rot, long).map_err(|e| {
                        eprintln!("error: {e}");
                        EXIT_SEMANTIC
                    })?;
                let role = match coeff {
                    None => csd_core::ComponentRole::MarkedKnot,
                    Some(c) => {
                        let text = format!("kind: closed\nword: L1 R1\ncomp u: orient=+ coeff={c}\n");
                        parse_diagram(&text)
                            .map_err(|e| {
                                eprintln!("error: bad coefficient: {e}");
                                EXIT_SEMANTIC
                            })?
                            .diagram
                            .roles[0]
                    }
                };
                let sd = csd_core::SurgeryDiagram::new(front, vec![role]).map_err(|e| {
                    eprintln!("error: {e}");
                    EXIT_SEMANTIC
                })?;
                let nd = NamedDiagram {
                    diagram: sd,
                    names: vec!["u".to_string()],
                    handle_names: vec![],
                };
                print!("{}", serialize_diagram(&nd));
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

//! The `deltagraph` command line.
//!
//! Exit status 0 means success, 1 a domain failure reported as a
//! `FAIL <check> <detail>` line on stdout, and 2 a usage, input or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use deltagraph_core::actions::{quotient, recover, ActionError, ActionGenerator, ActionReport, GraphAction};
use deltagraph_core::builders::translation;
use deltagraph_core::cover::tracial_cover;
use deltagraph_core::graph::{validate, GraphError, TruncatedGraph};
use deltagraph_core::invariants::{t0, w_times, InvariantError, InvariantReport};
use deltagraph_core::loop_algebra::{AlgebraError, LoopAlgebra};
use deltagraph_core::weights::{Weight, DEFAULT_TOLERANCE};
use thiserror::Error;

use crate::builder::{build, BuildError, Built, GraphSpec};
use crate::dot::export_dot;
use crate::format::{serialize_graph, write_document, Document, FormatError};
use crate::with_graph;

#[derive(Debug, Parser)]
#[command(name = "deltagraph", version, about = "Fair and balanced delta-graphs: validation, tracial covers, quotients, loop algebras and invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["path", "example"])))]
pub struct Input {
    /// Graph file in the `delta-graph v1` format.
    pub path: Option<PathBuf>,
    /// Built-in example: single_chain, double_chain, grid, cycle, cayley, deformed_chain.
    #[arg(long, value_name = "NAME")]
    pub example: Option<String>,
    /// Example parameter, repeatable (`-p a=2 -p b=3`).
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE", requires = "example")]
    pub params: Vec<String>,
    /// Weight comparison tolerance for built-in examples.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Emit DOT instead of a graph document.
    #[arg(long)]
    pub export_dot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    T0,
    WTimes,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the fair and balanced axioms on a ball.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
    /// Build the tracial cover.
    Cover {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Quotient by lattice translations or by the action tables of a file.
    Quotient {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        /// Translation vector, repeatable (`--shift 3`, `--shift=1,-1`).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1)]
        shift: Vec<i64>,
        #[command(flatten)]
        output: Output,
    },
    /// Rebuild a ball from its tracial cover.
    Recover {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[command(flatten)]
        output: Output,
    },
    /// List based loops of length n with their weights.
    Loops {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        float: bool,
    },
    /// Eigenvalues of the modular operator on loops of length n.
    Spectrum {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        float: bool,
    },
    /// Check the Temperley-Lieb-Jones relations on the loop algebra.
    TlCheck {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Largest length for the Gram matrix and modular relation checks.
        #[arg(long, default_value_t = 4)]
        gram_len: usize,
    },
    /// Certified partial-automorphism invariants.
    Invariants {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[arg(long, default_value_t = 4)]
        shift_bound: usize,
        #[arg(long, value_enum, default_value_t = Kind::T0)]
        kind: Kind,
        #[arg(long)]
        float: bool,
    },
    /// Render a ball as DOT.
    ExportDot {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[arg(short, long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Materialize a built-in example as a graph document.
    Build {
        name: String,
        /// Parameters as KEY=VALUE.
        params: Vec<String>,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(short, long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl Input {
    fn load(&self) -> Result<Built, CliError> {
        let spec = match (&self.path, &self.example) {
            (Some(p), None) => {
                let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
                GraphSpec::Explicit(text)
            }
            (None, Some(name)) => GraphSpec::from_args(name, &self.params)?,
            _ => return Err(CliError::Usage("give exactly one of a file or --example".into())),
        };
        Ok(build(&spec, self.tol)?)
    }
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}

fn emit_window(out: &mut dyn Write, output: &Output, g: TruncatedGraph) -> Result<(), CliError> {
    let text = if output.export_dot { export_dot(&g) } else { write_document(&Document::from_window(g))? };
    emit(out, output.out.as_ref(), &text)
}

fn fail(out: &mut dyn Write, check: &str, detail: &str) -> Result<Status, CliError> {
    writeln!(out, "FAIL {check} {detail}").map_err(|source| CliError::Io { path: "stdout".into(), source })?;
    Ok(Status::Failed)
}

fn compact(w: &Weight, float: bool) -> String {
    if float {
        w.float_text()
    } else {
        w.compact_text()
    }
}

fn edge_labels(g: &TruncatedGraph, edges: &[usize]) -> String {
    edges.iter().map(|&e| g.edge(e).label.as_str()).collect::<Vec<_>>().join(",")
}

/// `FAIL tracial witness=<loop>` when the window has no vertex weighting.
fn tracial_gate(out: &mut dyn Write, window: &TruncatedGraph) -> Result<Option<Status>, CliError> {
    match window.vertex_weighting() {
        Ok(_) => Ok(None),
        Err(w) => {
            let loop_text = w.witness.as_ref().map_or_else(|| "?".to_string(), |p| edge_labels(window, &p.edges));
            fail(out, "tracial", &format!("witness={loop_text} weight={}", w.weight.compact_text())).map(Some)
        }
    }
}

fn action_failure(out: &mut dyn Write, e: ActionError) -> Result<Status, CliError> {
    match e {
        ActionError::Graph(g) => Err(g.into()),
        ActionError::NotTracial(w) => fail(out, "tracial", &format!("weight={}", w.weight.compact_text())),
        ActionError::Rejected(ActionReport::Fail(v)) => {
            fail(out, v.check.name(), &format!("generator={} {}", v.generator, v.detail))
        }
        ActionError::Rejected(ActionReport::Inconclusive { generator, vertex, radius }) => {
            fail(out, "inconclusive", &format!("generator={generator} vertex={vertex} radius={radius}"))
        }
        ActionError::Rejected(ActionReport::Pass { .. }) => fail(out, "action", "rejected"),
    }
}

fn print_invariants(out: &mut dyn Write, r: &InvariantReport, float: bool) -> std::io::Result<()> {
    let gens = if r.generators.is_empty() {
        "1".to_string()
    } else {
        r.generators.iter().map(|w| compact(w, float)).collect::<Vec<_>>().join(" ")
    };
    writeln!(out, "invariant {}", r.kind.name())?;
    writeln!(out, "generators {gens}")?;
    writeln!(out, "certified-radius {}", r.certified_radius)?;
    writeln!(out, "shift-bound {}", r.shift_bound)?;
    let weights: Vec<String> = r.certified_weights.iter().map(|w| compact(w, float)).collect();
    writeln!(out, "weights {}", weights.join(" "))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: "stdout".into(), source: e }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<Status, CliError> {
    match cmd {
        Command::Validate { input, radius } => {
            let built = input.load()?;
            let report = with_graph!(&built, g => validate(g, *radius)?);
            let mut status = Status::Ok;
            for c in &report.checks {
                match c.failures.first() {
                    None => writeln!(out, "PASS {}", c.check).map_err(io)?,
                    Some(first) => {
                        let more = if c.failures.len() > 1 { format!(" (+{} more)", c.failures.len() - 1) } else { String::new() };
                        status = fail(out, c.check.name(), &format!("{first}{more}"))?;
                    }
                }
            }
            Ok(status)
        }
        Command::Cover { input, radius, output } => {
            let built = input.load()?;
            let cover = with_graph!(&built, g => tracial_cover(g, *radius)?);
            emit_window(out, output, cover.into_window())?;
            Ok(Status::Ok)
        }
        Command::Quotient { input, radius, shift, output } => {
            let built = input.load()?;
            let gate = built.window(2 * (radius + 1) + 2)?;
            if let Some(s) = tracial_gate(out, &gate)? {
                return Ok(s);
            }
            let result = match (&built, shift.is_empty()) {
                (Built::Lattice(l), false) => {
                    if shift.len() != l.rank() {
                        return Err(CliError::Usage(format!("--shift needs {} components", l.rank())));
                    }
                    let act = GraphAction::new(vec![translation(l, "h", shift)?]);
                    quotient(l, &act, *radius).map(|q| q.window)
                }
                (Built::Window(doc), true) if !doc.actions.is_empty() => {
                    let gens = doc
                        .actions
                        .iter()
                        .map(|a| ActionGenerator::from_table(a.label.clone(), a.weight.clone(), a.map.iter().copied()))
                        .collect();
                    quotient(&doc.graph, &GraphAction::new(gens), *radius).map(|q| q.window)
                }
                (Built::Lattice(_), true) => return Err(CliError::Usage("lattice quotients need --shift".into())),
                _ => return Err(CliError::Usage("--shift applies to lattice examples; files need action records".into())),
            };
            match result {
                Ok(w) => {
                    emit_window(out, output, w)?;
                    Ok(Status::Ok)
                }
                Err(e) => action_failure(out, e),
            }
        }
        Command::Recover { input, radius, output } => {
            let built = input.load()?;
            let q = with_graph!(&built, g => recover(g, *radius)?);
            emit_window(out, output, q.window)?;
            Ok(Status::Ok)
        }
        Command::Loops { input, n, float } => {
            let built = input.load()?;
            let b = built.window(n.div_ceil(2))?;
            let loops = b.loops(*n)?;
            for l in &loops {
                let labels = if l.is_empty() { "-".to_string() } else { edge_labels(&b, &l.edges) };
                writeln!(out, "{}\t{labels}", compact(&b.path_weight(l), *float)).map_err(io)?;
            }
            Ok(Status::Ok)
        }
        Command::Spectrum { input, n, float } => {
            let built = input.load()?;
            let window = built.window(n.div_ceil(2))?;
            let spectrum = LoopAlgebra::new(&window).spectrum(*n)?;
            let pairs: Vec<String> = spectrum.eigenvalues.iter().map(|(w, m)| format!("{}:{m}", compact(w, *float))).collect();
            writeln!(out, "{}", pairs.join(" ")).map_err(io)?;
            Ok(Status::Ok)
        }
        Command::TlCheck { input, max_len, gram_len } => {
            let built = input.load()?;
            let window = built.window(max_len / 2 + 1)?;
            let alg = LoopAlgebra::new(&window);
            let mut status = Status::Ok;
            for c in alg.check_relations(*max_len, *gram_len)? {
                match &c.failure {
                    None => writeln!(out, "PASS {} n={} cases={}", c.relation, c.length, c.cases).map_err(io)?,
                    Some(f) => status = fail(out, c.relation, &format!("n={} {f}", c.length))?,
                }
            }
            Ok(status)
        }
        Command::Invariants { input, radius, shift_bound, kind, float } => {
            let built = input.load()?;
            let gate = built.window(radius + shift_bound + 1)?;
            if let Some(s) = tracial_gate(out, &gate)? {
                return Ok(s);
            }
            let report = with_graph!(&built, g => match kind {
                Kind::T0 => t0(g, *radius, *shift_bound),
                Kind::WTimes => w_times(g, *radius, *shift_bound),
            });
            match report {
                Ok(r) => {
                    print_invariants(out, &r, *float).map_err(io)?;
                    Ok(Status::Ok)
                }
                Err(InvariantError::Graph(e)) => Err(e.into()),
                Err(InvariantError::NotTracial(w)) => fail(out, "tracial", &format!("weight={}", w.weight.compact_text())),
            }
        }
        Command::ExportDot { input, radius, out: path } => {
            let built = input.load()?;
            emit(out, path.as_ref(), &export_dot(&built.window(*radius)?))?;
            Ok(Status::Ok)
        }
        Command::Build { name, params, radius, tol, out: path } => {
            let built = build(&GraphSpec::from_args(name, params)?, *tol)?;
            let text = with_graph!(&built, g => serialize_graph(g, *radius)?);
            emit(out, path.as_ref(), &text)?;
            Ok(Status::Ok)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match execute(&cli.command, out) {
        Ok(Status::Ok) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

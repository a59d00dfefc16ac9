//! The line-oriented `delta-graph v1` document format.
//!
//! ```text
//! delta-graph v1
//! delta 2.5
//! generator q 2
//! tolerance 1e-9
//! radius 1
//! vertex 0 weight 1
//! vertex 1 weight q
//! vertex -1 weight q^-1
//! edge 0:0 0 1 weight q conjugate 1:1
//! edge 0:1 0 -1 weight q^-1 conjugate -1:0
//! edge 1:1 1 0 weight q^-1 conjugate 0:0
//! edge -1:0 -1 0 weight q conjugate 0:1
//! basepoint 0
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. The optional `radius`
//! line marks the vertices at that distance as boundary; without it the
//! document describes a complete finite graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use deltagraph_core::graph::{ball, DeltaGraph, EdgeRecord, FiniteGraph, GraphError, TruncatedGraph};
use deltagraph_core::weights::{Context, GeneratorContext, Weight, WeightError, DEFAULT_TOLERANCE};
use thiserror::Error;

pub const HEADER: &str = "delta-graph v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: edge {edge} has no conjugate field")]
    MissingConjugate { line: usize, edge: String },
    #[error("line {line}: edge {edge} names unknown conjugate {conjugate}")]
    DanglingConjugate { line: usize, edge: String, conjugate: String },
    #[error("line {line}: unknown generator {name}")]
    UnknownGenerator { line: usize, name: String },
    #[error("document has no {0} line")]
    Missing(&'static str),
    #[error("cannot serialize: {0}")]
    Unserializable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A vertex table `map v v'` attached to an `action` line, in vertex indices.
#[derive(Debug, Clone)]
pub struct ActionRecord {
    pub label: String,
    pub weight: Weight,
    pub map: Vec<(usize, usize)>,
}

/// A parsed document: the window, optional vertex weights and action tables.
#[derive(Debug, Clone)]
pub struct Document {
    pub graph: TruncatedGraph,
    pub vertex_weights: Vec<Option<Weight>>,
    pub actions: Vec<ActionRecord>,
}

impl Document {
    /// Wraps a window, attaching its vertex weighting when it has one.
    pub fn from_window(graph: TruncatedGraph) -> Self {
        let vertex_weights = match graph.vertex_weighting() {
            Ok(w) => w.weights().iter().cloned().map(Some).collect(),
            Err(_) => vec![None; graph.vertex_count()],
        };
        Document { graph, vertex_weights, actions: Vec::new() }
    }
}

fn malformed(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, message: message.into() }
}

fn weight_error(line: usize, e: WeightError) -> FormatError {
    match e {
        WeightError::UnknownGenerator(name) => FormatError::UnknownGenerator { line, name },
        other => malformed(line, other.to_string()),
    }
}

fn parse_float(line: usize, field: &str, text: &str) -> Result<f64, FormatError> {
    text.parse().map_err(|_| malformed(line, format!("{field}: `{text}` is not a number")))
}

fn parse_weight(ctx: &Context, line: usize, tokens: &[&str]) -> Result<Weight, FormatError> {
    if tokens.is_empty() {
        return Err(malformed(line, "missing weight text"));
    }
    Weight::parse(ctx, &tokens.join(" ")).map_err(|e| weight_error(line, e))
}

struct PendingEdge<'a> {
    line: usize,
    label: &'a str,
    source: &'a str,
    target: &'a str,
    weight: Vec<&'a str>,
    conjugate: &'a str,
}

struct PendingAction<'a> {
    line: usize,
    label: &'a str,
    weight: Vec<&'a str>,
    map: Vec<(usize, &'a str, &'a str)>,
}

pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == HEADER => {}
        Some((n, l)) => return Err(malformed(n, format!("expected `{HEADER}`, found `{l}`"))),
        None => return Err(FormatError::Missing("header")),
    }

    let mut delta = None;
    let mut generators: Vec<(String, f64)> = Vec::new();
    let mut tolerance = None;
    let mut radius = None;
    let mut vertices: Vec<(usize, &str, Vec<&str>)> = Vec::new();
    let mut edges: Vec<PendingEdge> = Vec::new();
    let mut basepoint = None;
    let mut actions: Vec<PendingAction> = Vec::new();

    for (n, l) in lines {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        match tokens[0] {
            "delta" => {
                let [_, v] = tokens[..] else { return Err(malformed(n, "expected `delta <float>`")) };
                if delta.replace(parse_float(n, "delta", v)?).is_some() {
                    return Err(malformed(n, "duplicate delta line"));
                }
            }
            "generator" => {
                let [_, name, v] = tokens[..] else { return Err(malformed(n, "expected `generator <name> <float>`")) };
                generators.push((name.to_string(), parse_float(n, "generator", v)?));
            }
            "tolerance" => {
                let [_, v] = tokens[..] else { return Err(malformed(n, "expected `tolerance <float>`")) };
                if tolerance.replace(parse_float(n, "tolerance", v)?).is_some() {
                    return Err(malformed(n, "duplicate tolerance line"));
                }
            }
            "radius" => {
                let [_, v] = tokens[..] else { return Err(malformed(n, "expected `radius <integer>`")) };
                let r: usize = v.parse().map_err(|_| malformed(n, format!("radius: `{v}` is not a nonnegative integer")))?;
                if radius.replace(r).is_some() {
                    return Err(malformed(n, "duplicate radius line"));
                }
            }
            "vertex" => match tokens[..] {
                [_, id] => vertices.push((n, id, Vec::new())),
                [_, id, "weight", ref rest @ ..] if !rest.is_empty() => vertices.push((n, id, rest.to_vec())),
                _ => return Err(malformed(n, "expected `vertex <id> [weight <text>]`")),
            },
            "edge" => {
                if tokens.len() < 6 || tokens[4] != "weight" {
                    return Err(malformed(n, "expected `edge <id> <src> <dst> weight <text> conjugate <id>`"));
                }
                let label = tokens[1];
                let rest = &tokens[5..];
                let Some(c) = rest.iter().position(|t| *t == "conjugate") else {
                    return Err(FormatError::MissingConjugate { line: n, edge: label.to_string() });
                };
                let [conjugate] = rest[c + 1..] else {
                    return Err(malformed(n, format!("edge {label}: expected one conjugate id")));
                };
                edges.push(PendingEdge {
                    line: n,
                    label,
                    source: tokens[2],
                    target: tokens[3],
                    weight: rest[..c].to_vec(),
                    conjugate,
                });
            }
            "basepoint" => {
                let [_, id] = tokens[..] else { return Err(malformed(n, "expected `basepoint <id>`")) };
                if basepoint.replace((n, id)).is_some() {
                    return Err(malformed(n, "duplicate basepoint line"));
                }
            }
            "action" => match tokens[..] {
                [_, label, "weight", ref rest @ ..] if !rest.is_empty() => {
                    actions.push(PendingAction { line: n, label, weight: rest.to_vec(), map: Vec::new() })
                }
                _ => return Err(malformed(n, "expected `action <label> weight <text>`")),
            },
            "map" => {
                let [_, a, b] = tokens[..] else { return Err(malformed(n, "expected `map <v> <v'>`")) };
                let Some(act) = actions.last_mut() else {
                    return Err(malformed(n, "map line before any action line"));
                };
                act.map.push((n, a, b));
            }
            other => return Err(malformed(n, format!("unknown record `{other}`"))),
        }
    }

    let delta = delta.ok_or(FormatError::Missing("delta"))?;
    let (bp_line, bp) = basepoint.ok_or(FormatError::Missing("basepoint"))?;
    let ctx = GeneratorContext::new(generators)
        .and_then(|c| c.with_tolerance(tolerance.unwrap_or(DEFAULT_TOLERANCE)))
        .map_err(|e| malformed(0, e.to_string()))?
        .into_shared();

    let mut vertex_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut labels = Vec::with_capacity(vertices.len());
    let mut vertex_weights = Vec::with_capacity(vertices.len());
    for (n, id, w) in &vertices {
        if vertex_index.insert(id, labels.len()).is_some() {
            return Err(malformed(*n, format!("duplicate vertex {id}")));
        }
        labels.push(id.to_string());
        vertex_weights.push(if w.is_empty() { None } else { Some(parse_weight(&ctx, *n, w)?) });
    }
    let vertex = |line: usize, id: &str| {
        vertex_index.get(id).copied().ok_or_else(|| malformed(line, format!("unknown vertex {id}")))
    };

    let mut edge_index: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        if edge_index.insert(e.label, k).is_some() {
            return Err(malformed(e.line, format!("duplicate edge {}", e.label)));
        }
    }
    let mut records = Vec::with_capacity(edges.len());
    for e in &edges {
        let conjugate = edge_index.get(e.conjugate).copied().ok_or_else(|| FormatError::DanglingConjugate {
            line: e.line,
            edge: e.label.to_string(),
            conjugate: e.conjugate.to_string(),
        })?;
        records.push(EdgeRecord {
            label: e.label.to_string(),
            source: vertex(e.line, e.source)?,
            target: vertex(e.line, e.target)?,
            weight: parse_weight(&ctx, e.line, &e.weight)?,
            conjugate: Some(conjugate),
        });
    }
    let basepoint = vertex(bp_line, bp)?;

    let mut parsed_actions = Vec::with_capacity(actions.len());
    for a in &actions {
        let weight = parse_weight(&ctx, a.line, &a.weight)?;
        let mut map = Vec::with_capacity(a.map.len());
        for &(n, x, y) in &a.map {
            map.push((vertex(n, x)?, vertex(n, y)?));
        }
        parsed_actions.push(ActionRecord { label: a.label.to_string(), weight, map });
    }

    let graph = FiniteGraph::new(delta, ctx, labels, records, basepoint)?;
    Ok(Document { graph: TruncatedGraph::new(graph, radius), vertex_weights, actions: parsed_actions })
}

fn check_token(kind: &str, label: &str) -> Result<(), FormatError> {
    if label.is_empty() || label.chars().any(char::is_whitespace) || label.starts_with('#') {
        return Err(FormatError::Unserializable(format!("{kind} label `{label}` is not a single token")));
    }
    Ok(())
}

/// Writes the canonical text of a document.
pub fn write_document(doc: &Document) -> Result<String, FormatError> {
    let g = &doc.graph;
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "delta {}", g.delta());
    for (name, v) in g.context().generators() {
        let _ = writeln!(out, "generator {name} {v}");
    }
    let _ = writeln!(out, "tolerance {:e}", g.context().tolerance());
    if let Some(r) = g.radius() {
        let _ = writeln!(out, "radius {r}");
    }
    for (v, label) in g.vertex_labels().iter().enumerate() {
        check_token("vertex", label)?;
        match doc.vertex_weights.get(v).and_then(Option::as_ref) {
            Some(w) => writeln!(out, "vertex {label} weight {}", w.compact_text()),
            None => writeln!(out, "vertex {label}"),
        }
        .expect("writing to a string");
    }
    for e in g.edges() {
        check_token("edge", &e.label)?;
        let Some(c) = e.conjugate else {
            return Err(FormatError::Unserializable(format!("edge {} has no conjugate", e.label)));
        };
        let _ = writeln!(
            out,
            "edge {} {} {} weight {} conjugate {}",
            e.label,
            g.vertex_label(e.source),
            g.vertex_label(e.target),
            e.weight.compact_text(),
            g.edge(c).label
        );
    }
    let _ = writeln!(out, "basepoint {}", g.vertex_label(g.basepoint()));
    for a in &doc.actions {
        check_token("action", &a.label)?;
        let _ = writeln!(out, "action {} weight {}", a.label, a.weight.compact_text());
        for &(x, y) in &a.map {
            let _ = writeln!(out, "map {} {}", g.vertex_label(x), g.vertex_label(y));
        }
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<Document, FormatError> {
    parse_document(text)
}

/// Materializes the ball of `radius` and writes it as a document.
pub fn serialize_graph<G: DeltaGraph>(g: &G, radius: usize) -> Result<String, FormatError> {
    let b = ball(g, radius)?;
    write_document(&Document::from_window(b.into_window()))
}

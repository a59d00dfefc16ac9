//! Named example graphs and file inputs behind one type.

use deltagraph_core::builders::{cycle, DeformedChain, LatticeGraph};
use deltagraph_core::graph::{ball, GraphError, TruncatedGraph};
use deltagraph_core::weights::{Context, GeneratorContext, WeightError};
use thiserror::Error;

use crate::format::{parse_document, Document, FormatError};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    SingleChain { q: f64 },
    DoubleChain { a: f64, b: f64 },
    Grid { a: f64, b: f64 },
    Cycle { n: usize, q: f64 },
    /// Standard generators of `Z^k`, each with a named weight.
    Cayley { generators: Vec<(String, f64)> },
    DeformedChain { q: f64, x: f64 },
    /// Contents of a `delta-graph v1` document.
    Explicit(String),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("unknown example `{0}` (expected single_chain, double_chain, grid, cycle, cayley or deformed_chain)")]
    UnknownExample(String),
    #[error("parameter `{0}`: expected KEY=VALUE")]
    BadParameter(String),
    #[error("{example}: missing parameter `{key}`")]
    MissingParameter { example: &'static str, key: &'static str },
    #[error("{example}: unexpected parameter `{key}`")]
    UnexpectedParameter { example: &'static str, key: String },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

struct Params {
    example: &'static str,
    pairs: Vec<(String, String)>,
}

impl Params {
    fn parse(example: &'static str, raw: &[String]) -> Result<Self, BuildError> {
        let mut pairs = Vec::with_capacity(raw.len());
        for p in raw {
            let (k, v) = p.split_once('=').ok_or_else(|| BuildError::BadParameter(p.clone()))?;
            if k.is_empty() || v.is_empty() {
                return Err(BuildError::BadParameter(p.clone()));
            }
            pairs.push((k.to_string(), v.to_string()));
        }
        Ok(Params { example, pairs })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &'static str) -> Result<T, BuildError> {
        let i = self
            .pairs
            .iter()
            .position(|(k, _)| k == key)
            .ok_or(BuildError::MissingParameter { example: self.example, key })?;
        let (k, v) = self.pairs.remove(i);
        v.parse().map_err(|_| BuildError::BadParameter(format!("{k}={v}")))
    }

    fn finish(self) -> Result<(), BuildError> {
        match self.pairs.into_iter().next() {
            Some((key, _)) => Err(BuildError::UnexpectedParameter { example: self.example, key }),
            None => Ok(()),
        }
    }
}

impl GraphSpec {
    /// Reads an example name and `KEY=VALUE` parameters, e.g.
    /// `double_chain a=2 b=3` or `cayley a=2 b=3 c=5`.
    pub fn from_args(name: &str, raw: &[String]) -> Result<Self, BuildError> {
        let spec = match name {
            "single_chain" => {
                let mut p = Params::parse("single_chain", raw)?;
                let spec = GraphSpec::SingleChain { q: p.take("q")? };
                p.finish()?;
                spec
            }
            "double_chain" | "grid" => {
                let mut p = Params::parse(if name == "grid" { "grid" } else { "double_chain" }, raw)?;
                let (a, b) = (p.take("a")?, p.take("b")?);
                p.finish()?;
                if name == "grid" {
                    GraphSpec::Grid { a, b }
                } else {
                    GraphSpec::DoubleChain { a, b }
                }
            }
            "cycle" => {
                let mut p = Params::parse("cycle", raw)?;
                let spec = GraphSpec::Cycle { n: p.take("n")?, q: p.take("q")? };
                p.finish()?;
                spec
            }
            "cayley" => {
                let p = Params::parse("cayley", raw)?;
                let mut generators = Vec::with_capacity(p.pairs.len());
                for (k, v) in p.pairs {
                    let x = v.parse().map_err(|_| BuildError::BadParameter(format!("{k}={v}")))?;
                    generators.push((k, x));
                }
                GraphSpec::Cayley { generators }
            }
            "deformed_chain" => {
                let mut p = Params::parse("deformed_chain", raw)?;
                let spec = GraphSpec::DeformedChain { q: p.take("q")?, x: p.take("x")? };
                p.finish()?;
                spec
            }
            other => return Err(BuildError::UnknownExample(other.to_string())),
        };
        Ok(spec)
    }
}

/// A built graph: procedural for the lattices, a window for cycles and files.
#[derive(Debug, Clone)]
pub enum Built {
    Lattice(LatticeGraph),
    Deformed(DeformedChain),
    Window(Document),
}

/// Runs `$body` with `$g` bound to the underlying [`DeltaGraph`](deltagraph_core::graph::DeltaGraph).
#[macro_export]
macro_rules! with_graph {
    ($built:expr, $g:ident => $body:expr) => {
        match $built {
            $crate::builder::Built::Lattice($g) => $body,
            $crate::builder::Built::Deformed($g) => $body,
            $crate::builder::Built::Window(doc) => {
                let $g = &doc.graph;
                $body
            }
        }
    };
}

fn context(generators: &[(String, f64)], tolerance: f64) -> Result<Context, WeightError> {
    Ok(GeneratorContext::new(generators.iter().cloned())?.with_tolerance(tolerance)?.into_shared())
}

fn named(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
}

/// Builds `spec`; `tolerance` applies to the generator context of the
/// procedural examples (files carry their own).
pub fn build(spec: &GraphSpec, tolerance: f64) -> Result<Built, BuildError> {
    Ok(match spec {
        GraphSpec::SingleChain { q } => {
            Built::Lattice(LatticeGraph::single_chain(&context(&named(&[("q", *q)]), tolerance)?, "q")?)
        }
        GraphSpec::DoubleChain { a, b } => {
            Built::Lattice(LatticeGraph::double_chain(&context(&named(&[("a", *a), ("b", *b)]), tolerance)?, "a", "b")?)
        }
        GraphSpec::Grid { a, b } => {
            Built::Lattice(LatticeGraph::grid(&context(&named(&[("a", *a), ("b", *b)]), tolerance)?, "a", "b")?)
        }
        GraphSpec::Cayley { generators } => {
            let ctx = context(generators, tolerance)?;
            let names: Vec<&str> = generators.iter().map(|(n, _)| n.as_str()).collect();
            Built::Lattice(LatticeGraph::cayley(&ctx, &names)?)
        }
        GraphSpec::Cycle { n, q } => Built::Window(Document::from_window(TruncatedGraph::complete(cycle(*n, *q)?))),
        GraphSpec::DeformedChain { q, x } => Built::Deformed(DeformedChain::new(*q, *x)?),
        GraphSpec::Explicit(text) => Built::Window(parse_document(text)?),
    })
}

impl Built {
    /// The ball of `radius` around the basepoint.
    pub fn window(&self, radius: usize) -> Result<TruncatedGraph, GraphError> {
        with_graph!(self, g => Ok(ball(g, radius)?.into_window()))
    }

    pub fn context(&self) -> &Context {
        use deltagraph_core::graph::DeltaGraph;
        with_graph!(self, g => g.context())
    }

    pub fn document(&self) -> Option<&Document> {
        match self {
            Built::Window(d) => Some(d),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use deltagraph_core::graph::validate;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_parameters() {
        assert_eq!(GraphSpec::from_args("double_chain", &args(&["b=3", "a=2"])).unwrap(), GraphSpec::DoubleChain { a: 2.0, b: 3.0 });
        assert_eq!(
            GraphSpec::from_args("cayley", &args(&["x=2", "y=3"])).unwrap(),
            GraphSpec::Cayley { generators: vec![("x".into(), 2.0), ("y".into(), 3.0)] }
        );
        assert!(matches!(GraphSpec::from_args("single_chain", &[]), Err(BuildError::MissingParameter { key: "q", .. })));
        assert!(matches!(GraphSpec::from_args("single_chain", &args(&["q=2", "r=1"])), Err(BuildError::UnexpectedParameter { .. })));
        assert!(matches!(GraphSpec::from_args("single_chain", &args(&["q"])), Err(BuildError::BadParameter(_))));
        assert!(matches!(GraphSpec::from_args("tree", &[]), Err(BuildError::UnknownExample(_))));
    }

    #[test]
    fn every_example_validates_at_six() {
        let specs = [
            GraphSpec::SingleChain { q: 2.0 },
            GraphSpec::DoubleChain { a: 2.0, b: 3.0 },
            GraphSpec::Grid { a: 2.0, b: 3.0 },
            GraphSpec::Cycle { n: 3, q: 2.0 },
            GraphSpec::Cycle { n: 4, q: 1.0 },
            GraphSpec::Cayley { generators: vec![("a".into(), 2.0), ("b".into(), 3.0), ("c".into(), 5.0)] },
            GraphSpec::DeformedChain { q: 1.05, x: 0.3 },
        ];
        for s in &specs {
            let b = build(s, 1e-9).unwrap();
            let report = with_graph!(&b, g => validate(g, 6).unwrap());
            assert!(report.passed(), "{s:?}: {report:?}");
        }
    }

    #[test]
    fn out_of_domain() {
        assert!(build(&GraphSpec::SingleChain { q: 1.0 }, 1e-9).is_err());
        assert!(build(&GraphSpec::DoubleChain { a: 1.0, b: 1.0 }, 1e-9).is_err());
        assert!(build(&GraphSpec::Cycle { n: 0, q: 2.0 }, 1e-9).is_err());
        assert!(build(&GraphSpec::DeformedChain { q: -1.0, x: 0.0 }, 1e-9).is_err());
    }
}

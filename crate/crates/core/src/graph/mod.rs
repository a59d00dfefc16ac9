//! Fair and balanced δ-graphs.
//!
//! A graph is presented to the algorithms through the [`DeltaGraph`] trait: a
//! basepoint plus a pure neighbour function. Infinite examples implement the
//! trait procedurally; everything downstream works on finite windows
//! ([`TruncatedGraph`]) materialized by [`ball`].

mod finite;
mod iso;
mod loops;
mod validate;
mod weighting;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use finite::{ball, Ball, EdgeRecord, FiniteGraph, TruncatedGraph};
pub use iso::{iso_check, IsoError, Isomorphism};
pub use loops::{enumerate_loops, Path};
pub use validate::{validate, Check, CheckOutcome, ValidationReport};
pub use weighting::{vertex_weighting, NonTracialWitness, VertexWeighting};

use crate::weights::{Context, Weight, WeightError};

/// One outgoing edge as reported by a neighbour function.
#[derive(Debug, Clone)]
pub struct OutEdge<V, E> {
    pub id: E,
    pub target: V,
    pub weight: Weight,
    /// `None` only for graphs that genuinely lack an involution (the path graph).
    pub conjugate: Option<E>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    /// The neighbour function could not produce the edges of a vertex.
    Neighbour { vertex: String, reason: String },
    /// An operation needed edges of a vertex the window does not fully contain.
    NotMaterialized { vertex: String },
    Weight(WeightError),
    Invalid(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Neighbour { vertex, reason } => write!(f, "neighbours of {vertex} unavailable: {reason}"),
            GraphError::NotMaterialized { vertex } => write!(f, "vertex {vertex} is not fully materialized"),
            GraphError::Weight(e) => write!(f, "{e}"),
            GraphError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for GraphError {}

impl From<WeightError> for GraphError {
    fn from(e: WeightError) -> Self {
        GraphError::Weight(e)
    }
}

/// A locally finite weighted directed multigraph with a basepoint.
///
/// `out_edges` must be pure, return edges sorted by id, and keep ids stable
/// across calls. The conjugate of an edge must be reported among the outgoing
/// edges of its target.
pub trait DeltaGraph {
    type Vertex: Clone + Ord + fmt::Debug;
    type Edge: Clone + Ord + fmt::Debug;

    fn delta(&self) -> f64;
    fn context(&self) -> &Context;
    fn basepoint(&self) -> Self::Vertex;
    fn out_edges(&self, v: &Self::Vertex) -> Result<Vec<OutEdge<Self::Vertex, Self::Edge>>, GraphError>;

    /// Vertices whose outgoing edges are known to be incomplete.
    fn is_boundary(&self, _v: &Self::Vertex) -> bool {
        false
    }

    /// All vertices, for graphs that are finite and fully known.
    fn vertices(&self) -> Option<Vec<Self::Vertex>> {
        None
    }

    fn vertex_name(&self, v: &Self::Vertex) -> String {
        alloc::format!("{v:?}")
    }

    fn edge_name(&self, e: &Self::Edge) -> String {
        alloc::format!("{e:?}")
    }
}

impl<G: DeltaGraph + ?Sized> DeltaGraph for &G {
    type Vertex = G::Vertex;
    type Edge = G::Edge;

    fn delta(&self) -> f64 {
        (**self).delta()
    }
    fn context(&self) -> &Context {
        (**self).context()
    }
    fn basepoint(&self) -> Self::Vertex {
        (**self).basepoint()
    }
    fn out_edges(&self, v: &Self::Vertex) -> Result<Vec<OutEdge<Self::Vertex, Self::Edge>>, GraphError> {
        (**self).out_edges(v)
    }
    fn is_boundary(&self, v: &Self::Vertex) -> bool {
        (**self).is_boundary(v)
    }
    fn vertices(&self) -> Option<Vec<Self::Vertex>> {
        (**self).vertices()
    }
    fn vertex_name(&self, v: &Self::Vertex) -> String {
        (**self).vertex_name(v)
    }
    fn edge_name(&self, e: &Self::Edge) -> String {
        (**self).edge_name(e)
    }
}

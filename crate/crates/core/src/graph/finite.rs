use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use super::{DeltaGraph, GraphError, OutEdge, Path};
use crate::weights::{Context, Weight};

#[derive(Debug, Clone)]
pub struct EdgeRecord {
    pub label: String,
    pub source: usize,
    pub target: usize,
    pub weight: Weight,
    pub conjugate: Option<usize>,
}

/// A finite, fully materialized graph with dense vertex and edge indices.
///
/// Vertex and edge labels are kept for display and serialization; algorithms
/// only use indices. Outgoing edges of a vertex are listed in edge-index order.
#[derive(Debug, Clone)]
pub struct FiniteGraph {
    delta: f64,
    ctx: Context,
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    out: Vec<Vec<usize>>,
    basepoint: usize,
}

impl FiniteGraph {
    pub fn new(
        delta: f64,
        ctx: Context,
        vertices: Vec<String>,
        edges: Vec<EdgeRecord>,
        basepoint: usize,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        if basepoint >= n {
            return Err(GraphError::Invalid(alloc::format!("basepoint index {basepoint} out of range")));
        }
        let mut out = alloc::vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.source >= n || e.target >= n {
                return Err(GraphError::Invalid(alloc::format!("edge {} has an endpoint out of range", e.label)));
            }
            if e.conjugate.is_some_and(|c| c >= edges.len()) {
                return Err(GraphError::Invalid(alloc::format!("edge {} has a conjugate out of range", e.label)));
            }
            if *e.weight.context() != ctx {
                return Err(GraphError::Weight(crate::weights::WeightError::MismatchedContexts));
            }
            out[e.source].push(i);
        }
        Ok(FiniteGraph { delta, ctx, vertices, edges, out, basepoint })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertices
    }

    pub fn find_vertex(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|l| l == label)
    }

    pub fn edge(&self, e: usize) -> &EdgeRecord {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn conjugate(&self, e: usize) -> Option<usize> {
        self.edges[e].conjugate
    }

    /// Ordered product of the edge weights along `path`.
    pub fn path_weight(&self, path: &Path) -> Weight {
        path.edges
            .iter()
            .fold(Weight::one(&self.ctx), |acc, &e| &acc * &self.edges[e].weight)
    }

    /// Sum of the outgoing weight values at `v`.
    pub fn out_weight_sum(&self, v: usize) -> f64 {
        self.out[v].iter().map(|&e| self.edges[e].weight.value()).sum()
    }

    /// Breadth-first distances from the basepoint; `None` for unreachable vertices.
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = alloc::vec![None; self.vertices.len()];
        dist[self.basepoint] = Some(0);
        let mut queue = VecDeque::from([self.basepoint]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &e in &self.out[v] {
                let t = self.edges[e].target;
                if dist[t].is_none() {
                    dist[t] = Some(d + 1);
                    queue.push_back(t);
                }
            }
        }
        dist
    }
}

impl DeltaGraph for FiniteGraph {
    type Vertex = usize;
    type Edge = usize;

    fn delta(&self) -> f64 {
        self.delta
    }
    fn context(&self) -> &Context {
        &self.ctx
    }
    fn basepoint(&self) -> usize {
        self.basepoint
    }
    fn out_edges(&self, v: &usize) -> Result<Vec<OutEdge<usize, usize>>, GraphError> {
        let list = self.out.get(*v).ok_or_else(|| GraphError::Neighbour {
            vertex: alloc::format!("#{v}"),
            reason: String::from("no such vertex"),
        })?;
        Ok(list
            .iter()
            .map(|&e| {
                let r = &self.edges[e];
                OutEdge { id: e, target: r.target, weight: r.weight.clone(), conjugate: r.conjugate }
            })
            .collect())
    }
    fn vertices(&self) -> Option<Vec<usize>> {
        Some((0..self.vertices.len()).collect())
    }
    fn vertex_name(&self, v: &usize) -> String {
        self.vertices[*v].clone()
    }
    fn edge_name(&self, e: &usize) -> String {
        self.edges[*e].label.clone()
    }
}

/// A finite window onto a graph: the ball of some radius around the basepoint,
/// or a complete finite graph (`radius == None`).
///
/// Boundary vertices may be missing outgoing edges and are exempt from
/// fairness; every edge has both endpoints inside the window.
#[derive(Debug, Clone)]
pub struct TruncatedGraph {
    graph: FiniteGraph,
    radius: Option<usize>,
    distance: Vec<Option<usize>>,
    boundary: Vec<bool>,
}

impl TruncatedGraph {
    /// Wraps a finite graph; with a radius, vertices at exactly that distance
    /// become the boundary.
    pub fn new(graph: FiniteGraph, radius: Option<usize>) -> Self {
        let distance = graph.distances();
        let boundary = distance.iter().map(|d| radius.is_some() && *d == radius).collect();
        TruncatedGraph { graph, radius, distance, boundary }
    }

    pub fn with_boundary(graph: FiniteGraph, radius: Option<usize>, boundary: Vec<bool>) -> Self {
        let distance = graph.distances();
        assert_eq!(boundary.len(), graph.vertex_count(), "boundary flags must cover every vertex");
        TruncatedGraph { graph, radius, distance, boundary }
    }

    /// A complete finite graph viewed as an untruncated window.
    pub fn complete(graph: FiniteGraph) -> Self {
        TruncatedGraph::new(graph, None)
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn into_graph(self) -> FiniteGraph {
        self.graph
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    pub fn distance(&self, v: usize) -> Option<usize> {
        self.distance[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.vertex_count()).filter(|&v| !self.boundary[v])
    }

    /// Largest `d` such that every vertex within distance `d` of the basepoint,
    /// and every edge among them, is present.
    pub fn complete_radius(&self) -> usize {
        self.boundary
            .iter()
            .zip(&self.distance)
            .filter(|(b, _)| **b)
            .filter_map(|(_, d)| *d)
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Fails unless `v` has all of its outgoing edges.
    pub fn require_interior(&self, v: usize) -> Result<(), GraphError> {
        if self.boundary[v] {
            Err(GraphError::NotMaterialized { vertex: String::from(self.graph.vertex_label(v)) })
        } else {
            Ok(())
        }
    }
}

impl Deref for TruncatedGraph {
    type Target = FiniteGraph;
    fn deref(&self) -> &FiniteGraph {
        &self.graph
    }
}

impl DeltaGraph for TruncatedGraph {
    type Vertex = usize;
    type Edge = usize;

    fn delta(&self) -> f64 {
        self.graph.delta
    }
    fn context(&self) -> &Context {
        &self.graph.ctx
    }
    fn basepoint(&self) -> usize {
        self.graph.basepoint
    }
    fn out_edges(&self, v: &usize) -> Result<Vec<OutEdge<usize, usize>>, GraphError> {
        self.graph.out_edges(v)
    }
    fn is_boundary(&self, v: &usize) -> bool {
        self.boundary[*v]
    }
    fn vertices(&self) -> Option<Vec<usize>> {
        Some((0..self.graph.vertex_count()).collect())
    }
    fn vertex_name(&self, v: &usize) -> String {
        self.graph.vertex_name(v)
    }
    fn edge_name(&self, e: &usize) -> String {
        self.graph.edge_name(e)
    }
}

/// A materialized ball together with the source graph's vertex and edge ids.
#[derive(Debug, Clone)]
pub struct Ball<V, E> {
    window: TruncatedGraph,
    origin: Vec<V>,
    edge_origin: Vec<E>,
    index: BTreeMap<V, usize>,
}

impl<V: Ord + Clone, E> Ball<V, E> {
    pub fn window(&self) -> &TruncatedGraph {
        &self.window
    }

    pub fn into_window(self) -> TruncatedGraph {
        self.window
    }

    pub fn origin(&self, v: usize) -> &V {
        &self.origin[v]
    }

    pub fn edge_origin(&self, e: usize) -> &E {
        &self.edge_origin[e]
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.index.get(v).copied()
    }
}

impl<V, E> Deref for Ball<V, E> {
    type Target = TruncatedGraph;
    fn deref(&self) -> &TruncatedGraph {
        &self.window
    }
}

/// Materializes every vertex within `radius` of the basepoint and every edge
/// among them. Vertices are numbered in breadth-first order (basepoint = 0),
/// edges by source then by edge id.
pub fn ball<G: DeltaGraph>(g: &G, radius: usize) -> Result<Ball<G::Vertex, G::Edge>, GraphError> {
    let bp = g.basepoint();
    let mut index = BTreeMap::new();
    index.insert(bp.clone(), 0usize);
    let mut origin = alloc::vec![bp];
    let mut dist = alloc::vec![0usize];
    let mut fetched: Vec<Vec<OutEdge<G::Vertex, G::Edge>>> = Vec::new();
    let mut i = 0;
    while i < origin.len() {
        let mut edges = g.out_edges(&origin[i])?;
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        if dist[i] < radius {
            for e in &edges {
                if !index.contains_key(&e.target) {
                    index.insert(e.target.clone(), origin.len());
                    origin.push(e.target.clone());
                    dist.push(dist[i] + 1);
                }
            }
        }
        fetched.push(edges);
        i += 1;
    }

    let mut kept: Vec<(usize, OutEdge<G::Vertex, G::Edge>, usize)> = Vec::new();
    for (s, edges) in fetched.into_iter().enumerate() {
        for e in edges {
            if let Some(&t) = index.get(&e.target) {
                kept.push((s, e, t));
            }
        }
    }
    let edge_index: BTreeMap<G::Edge, usize> =
        kept.iter().enumerate().map(|(k, (_, e, _))| (e.id.clone(), k)).collect();
    let mut records = Vec::with_capacity(kept.len());
    let mut edge_origin = Vec::with_capacity(kept.len());
    for (s, e, t) in kept {
        records.push(EdgeRecord {
            label: g.edge_name(&e.id),
            source: s,
            target: t,
            weight: e.weight,
            conjugate: e.conjugate.as_ref().and_then(|c| edge_index.get(c).copied()),
        });
        edge_origin.push(e.id);
    }
    let labels = origin.iter().map(|v| g.vertex_name(v)).collect();
    let graph = FiniteGraph::new(g.delta(), g.context().clone(), labels, records, 0)?;
    let boundary = origin
        .iter()
        .zip(&dist)
        .map(|(v, &d)| d == radius || g.is_boundary(v))
        .collect();
    let window = TruncatedGraph::with_boundary(graph, Some(radius), boundary);
    Ok(Ball { window, origin, edge_origin, index })
}

use alloc::vec::Vec;

use super::{ball, Ball, DeltaGraph, FiniteGraph, GraphError, TruncatedGraph};

/// A sequence of composable edges (indices into a [`FiniteGraph`]).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Path {
    pub edges: Vec<usize>,
}

impl Path {
    pub fn new(edges: Vec<usize>) -> Self {
        Path { edges }
    }

    pub fn empty() -> Self {
        Path { edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Start vertex; the basepoint for the empty path.
    pub fn source(&self, g: &FiniteGraph) -> usize {
        self.edges.first().map_or(g.basepoint(), |&e| g.edge(e).source)
    }

    pub fn target(&self, g: &FiniteGraph) -> usize {
        self.edges.last().map_or(g.basepoint(), |&e| g.edge(e).target)
    }

    /// Consecutive edges compose.
    pub fn is_composable(&self, g: &FiniteGraph) -> bool {
        self.edges.windows(2).all(|w| g.edge(w[0]).target == g.edge(w[1]).source)
    }

    pub fn is_based_loop(&self, g: &FiniteGraph) -> bool {
        self.is_composable(g) && self.source(g) == g.basepoint() && self.target(g) == g.basepoint()
    }

    pub fn concat(&self, other: &Path) -> Path {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Path { edges }
    }

    /// The path traversed backwards along conjugate edges, `ē_k ... ē_1`.
    pub fn reversed(&self, g: &FiniteGraph) -> Option<Path> {
        self.edges.iter().rev().map(|&e| g.conjugate(e)).collect::<Option<Vec<_>>>().map(Path::new)
    }
}

impl TruncatedGraph {
    /// Every based loop of length exactly `n`, in lexicographic order of edge
    /// sequences (per-vertex edge order).
    pub fn loops(&self, n: usize) -> Result<Vec<Path>, GraphError> {
        if n / 2 > self.complete_radius() {
            return Err(GraphError::NotMaterialized {
                vertex: alloc::format!("ball of radius {} (loops of length {n})", self.complete_radius()),
            });
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(n);
        self.loop_dfs(self.basepoint(), n, &mut stack, &mut out);
        Ok(out)
    }

    fn loop_dfs(&self, v: usize, remaining: usize, stack: &mut Vec<usize>, out: &mut Vec<Path>) {
        if remaining == 0 {
            if v == self.basepoint() {
                out.push(Path::new(stack.clone()));
            }
            return;
        }
        for &e in self.out(v) {
            let t = self.edge(e).target;
            if self.distance(t).is_some_and(|d| d < remaining) {
                stack.push(e);
                self.loop_dfs(t, remaining - 1, stack, out);
                stack.pop();
            }
        }
    }
}

/// Materializes the ball of radius `ceil(n / 2)` and lists the based loops of
/// length `n` in it.
#[allow(clippy::type_complexity)]
pub fn enumerate_loops<G: DeltaGraph>(g: &G, n: usize) -> Result<(Ball<G::Vertex, G::Edge>, Vec<Path>), GraphError> {
    let b = ball(g, n.div_ceil(2))?;
    let loops = b.loops(n)?;
    Ok((b, loops))
}

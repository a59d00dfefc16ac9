use alloc::vec::Vec;

use super::{ball, Ball, DeltaGraph, GraphError, Path, TruncatedGraph};
use crate::weights::Weight;

/// Vertex weights `w_V` with `w_V(*) = 1` and `w(e) = w_V(t(e)) / w_V(s(e))`.
#[derive(Debug, Clone)]
pub struct VertexWeighting {
    weights: Vec<Weight>,
}

impl VertexWeighting {
    pub fn new(weights: Vec<Weight>) -> Self {
        VertexWeighting { weights }
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// A based loop of non-identity weight, proving a window is not tracial.
#[derive(Debug, Clone)]
pub struct NonTracialWitness {
    /// `None` when the reversal of a tree path is unavailable (missing conjugates).
    pub witness: Option<Path>,
    pub weight: Weight,
}

impl TruncatedGraph {
    /// Breadth-first vertex weighting; fails with a witness loop when some
    /// edge of the window is inconsistent with it.
    pub fn vertex_weighting(&self) -> Result<VertexWeighting, NonTracialWitness> {
        let n = self.vertex_count();
        let mut weight: Vec<Option<Weight>> = alloc::vec![None; n];
        let mut parent: Vec<Option<usize>> = alloc::vec![None; n];
        let bp = self.basepoint();
        weight[bp] = Some(Weight::one(self.context()));
        let mut order = alloc::vec![bp];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &e in self.out(v) {
                let t = self.edge(e).target;
                if weight[t].is_none() {
                    let w = weight[v].as_ref().expect("assigned before queued") * &self.edge(e).weight;
                    weight[t] = Some(w);
                    parent[t] = Some(e);
                    order.push(t);
                }
            }
            i += 1;
        }
        let tree_path = |mut v: usize| {
            let mut edges = Vec::new();
            while let Some(e) = parent[v] {
                edges.push(e);
                v = self.edge(e).source;
            }
            edges.reverse();
            Path::new(edges)
        };
        for (e, rec) in self.edges().iter().enumerate() {
            let (Some(ws), Some(wt)) = (&weight[rec.source], &weight[rec.target]) else { continue };
            let mismatch = &(ws * &rec.weight) * &wt.inv();
            if !mismatch.is_identity() {
                let witness = tree_path(rec.target)
                    .reversed(self)
                    .map(|back| tree_path(rec.source).concat(&Path::new(alloc::vec![e])).concat(&back));
                return Err(NonTracialWitness { witness, weight: mismatch });
            }
        }
        let one = Weight::one(self.context());
        Ok(VertexWeighting::new(weight.into_iter().map(|w| w.unwrap_or_else(|| one.clone())).collect()))
    }
}

/// Vertex weighting on the ball of `radius`, returned together with the ball
/// whose indices it uses.
#[allow(clippy::type_complexity)]
pub fn vertex_weighting<G: DeltaGraph>(
    g: &G,
    radius: usize,
) -> Result<(Ball<G::Vertex, G::Edge>, Result<VertexWeighting, NonTracialWitness>), GraphError> {
    let b = ball(g, radius)?;
    let w = b.vertex_weighting();
    Ok((b, w))
}

//! The path graph, the tracial cover and the loop lift.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::graph::{ball, DeltaGraph, EdgeRecord, FiniteGraph, GraphError, Path, TruncatedGraph, VertexWeighting};
use crate::weights::{reduce_generators, Weight, WeightMap};

/// A class `[λ, v]` of based paths sharing target `v` and weight `λ`.
#[derive(Debug, Clone)]
pub struct CoverVertex {
    pub target: usize,
    pub weight: Weight,
}

/// The tracial cover of a window, built breadth-first over `[λ, v]` states.
#[derive(Debug, Clone)]
pub struct TracialCover {
    base: TruncatedGraph,
    window: TruncatedGraph,
    vertices: Vec<CoverVertex>,
    weighting: VertexWeighting,
    base_edge: Vec<usize>,
    edge_at: BTreeMap<(usize, usize), usize>,
}

impl TracialCover {
    /// Cover vertices reachable by based paths of length `<= radius`, and the
    /// lifts of every base edge between them.
    ///
    /// Fails if a cover vertex short of the radius lies over a boundary vertex
    /// of `base`, whose outgoing edges are unknown.
    pub fn build(base: TruncatedGraph, radius: usize) -> Result<Self, GraphError> {
        let ctx = base.context().clone();
        let tol = ctx.tolerance();
        let mut lookup: BTreeMap<usize, WeightMap<usize>> = BTreeMap::new();
        let mut vertices = alloc::vec![CoverVertex { target: base.basepoint(), weight: Weight::one(&ctx) }];
        let mut dist = alloc::vec![0usize];
        lookup.entry(base.basepoint()).or_insert_with(|| WeightMap::new(tol)).get_or_insert(&vertices[0].weight, 0);

        let mut i = 0;
        while i < vertices.len() {
            if dist[i] < radius {
                let v = vertices[i].target;
                base.require_interior(v)?;
                for &e in base.out(v) {
                    let rec = base.edge(e);
                    let w = vertices[i].weight.checked_mul(&rec.weight)?;
                    let map = lookup.entry(rec.target).or_insert_with(|| WeightMap::new(tol));
                    let fresh = vertices.len();
                    if *map.get_or_insert(&w, fresh) == fresh {
                        vertices.push(CoverVertex { target: rec.target, weight: w });
                        dist.push(dist[i] + 1);
                    }
                }
            }
            i += 1;
        }

        let mut raw: Vec<(usize, usize, usize)> = Vec::new();
        for (s, cv) in vertices.iter().enumerate() {
            for &e in base.out(cv.target) {
                let rec = base.edge(e);
                let w = &cv.weight * &rec.weight;
                if let Some(&t) = lookup.get(&rec.target).and_then(|m| m.get(&w)) {
                    raw.push((s, e, t));
                }
            }
        }
        let edge_at: BTreeMap<(usize, usize), usize> =
            raw.iter().enumerate().map(|(k, &(s, e, _))| ((s, e), k)).collect();
        let labels: Vec<String> = vertices
            .iter()
            .map(|cv| alloc::format!("[{},{}]", cv.weight.compact_text(), base.vertex_label(cv.target)))
            .collect();
        let mut records = Vec::with_capacity(raw.len());
        let mut base_edge = Vec::with_capacity(raw.len());
        for &(s, e, t) in &raw {
            let rec = base.edge(e);
            let conjugate = rec.conjugate.and_then(|c| edge_at.get(&(t, c)).copied());
            records.push(EdgeRecord {
                label: alloc::format!("{}~{}", labels[s], rec.label),
                source: s,
                target: t,
                weight: rec.weight.clone(),
                conjugate,
            });
            base_edge.push(e);
        }
        let boundary = dist.iter().map(|&d| d == radius).collect();
        let graph = FiniteGraph::new(base.delta(), ctx, labels, records, 0)?;
        let window = TruncatedGraph::with_boundary(graph, Some(radius), boundary);
        let weighting = VertexWeighting::new(vertices.iter().map(|cv| cv.weight.clone()).collect());
        Ok(TracialCover { base, window, vertices, weighting, base_edge, edge_at })
    }

    pub fn base(&self) -> &TruncatedGraph {
        &self.base
    }

    pub fn window(&self) -> &TruncatedGraph {
        &self.window
    }

    pub fn into_window(self) -> TruncatedGraph {
        self.window
    }

    pub fn vertex(&self, v: usize) -> &CoverVertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[CoverVertex] {
        &self.vertices
    }

    /// `ν([λ, v]) = λ`.
    pub fn weighting(&self) -> &VertexWeighting {
        &self.weighting
    }

    /// The base edge a cover edge lies over.
    pub fn base_edge(&self, e: usize) -> usize {
        self.base_edge[e]
    }

    pub fn find(&self, target: usize, weight: &Weight) -> Option<usize> {
        self.vertices.iter().position(|cv| cv.target == target && cv.weight.loosely_eq(weight))
    }

    /// Traces a weight-1 based loop of the base through the cover.
    pub fn lift_loop(&self, l: &Path) -> Result<Path, LiftError> {
        if !l.is_based_loop(&self.base) {
            return Err(LiftError::NotALoop);
        }
        let w = self.base.path_weight(l);
        if !w.is_identity() {
            return Err(LiftError::NonIdentityWeight(w));
        }
        let mut at = self.window.basepoint();
        let mut edges = Vec::with_capacity(l.len());
        for &e in &l.edges {
            let lifted = *self.edge_at.get(&(at, e)).ok_or(LiftError::OutsideCover)?;
            edges.push(lifted);
            at = self.window.edge(lifted).target;
        }
        Ok(Path::new(edges))
    }

    /// Projects a cover path to the base.
    pub fn project(&self, p: &Path) -> Path {
        Path::new(p.edges.iter().map(|&e| self.base_edge[e]).collect())
    }
}

impl Deref for TracialCover {
    type Target = TruncatedGraph;
    fn deref(&self) -> &TruncatedGraph {
        &self.window
    }
}

#[derive(Debug, Clone)]
pub enum LiftError {
    NotALoop,
    /// Only loops of identity weight lift to loops.
    NonIdentityWeight(Weight),
    OutsideCover,
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::NotALoop => f.write_str("path is not a based loop"),
            LiftError::NonIdentityWeight(w) => write!(f, "loop has weight {w}, not 1"),
            LiftError::OutsideCover => f.write_str("loop leaves the materialized cover"),
        }
    }
}

impl core::error::Error for LiftError {}

/// Tracial cover of the ball of `radius`.
pub fn tracial_cover<G: DeltaGraph>(g: &G, radius: usize) -> Result<TracialCover, GraphError> {
    TracialCover::build(ball(g, radius)?.into_window(), radius)
}

/// The graph of based paths of length `<= radius`, with an edge `p -> p e` of
/// weight `w(e)` for every base edge `e`.
///
/// Paths have no reversal inside this graph, so its edges carry no conjugates.
pub fn path_graph(base: &TruncatedGraph, radius: usize) -> Result<TruncatedGraph, GraphError> {
    let mut paths: Vec<(Vec<usize>, usize)> = alloc::vec![(Vec::new(), base.basepoint())];
    let mut records = Vec::new();
    let mut i = 0;
    while i < paths.len() {
        if paths[i].0.len() < radius {
            let v = paths[i].1;
            base.require_interior(v)?;
            for &e in base.out(v) {
                let rec = base.edge(e);
                let mut p = paths[i].0.clone();
                p.push(e);
                records.push(EdgeRecord {
                    label: alloc::format!("p{}", records.len()),
                    source: i,
                    target: paths.len(),
                    weight: rec.weight.clone(),
                    conjugate: None,
                });
                paths.push((p, rec.target));
            }
        }
        i += 1;
    }
    let labels = paths
        .iter()
        .map(|(p, _)| {
            let names: Vec<&str> = p.iter().map(|&e| base.edge(e).label.as_str()).collect();
            alloc::format!("({})", names.join("."))
        })
        .collect();
    let boundary = paths.iter().map(|(p, _)| p.len() == radius).collect();
    let graph = FiniteGraph::new(base.delta(), base.context().clone(), labels, records, 0)?;
    Ok(TruncatedGraph::with_boundary(graph, Some(radius), boundary))
}

/// Independent generators of the non-identity loop weights seen up to `search_depth`.
#[derive(Debug, Clone)]
pub struct LoopWeightGroup {
    pub generators: Vec<Weight>,
    pub search_depth: usize,
}

/// Collects the weights of every based loop of length `<= max_len` and
/// reduces them to generators. A lower approximation of the loop-weight group.
pub fn loop_weight_group<G: DeltaGraph>(g: &G, max_len: usize) -> Result<LoopWeightGroup, GraphError> {
    let b = ball(g, max_len.div_ceil(2))?;
    let mut seen = WeightMap::new(b.context().tolerance());
    let mut weights = Vec::new();
    for n in 1..=max_len {
        for l in b.loops(n)? {
            let w = b.path_weight(&l);
            if !w.is_identity() {
                let fresh = seen.len();
                if *seen.get_or_insert(&w, fresh) == fresh {
                    weights.push(w);
                }
            }
        }
    }
    Ok(LoopWeightGroup { generators: reduce_generators(b.context(), &weights), search_depth: max_len })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{cycle, LatticeGraph};
    use crate::graph::{iso_check, validate};
    use crate::weights::{Context, GeneratorContext};
    use proptest::prelude::*;

    fn ctx2() -> Context {
        GeneratorContext::new([("a", 2.0), ("b", 3.0)]).unwrap().into_shared()
    }

    #[test]
    fn path_graph_sizes() {
        let q: Context = GeneratorContext::new([("q", 2.0)]).unwrap().into_shared();
        let chain = LatticeGraph::single_chain(&q, "q").unwrap();
        let b = ball(&chain, 2).unwrap().into_window();
        assert_eq!(path_graph(&b, 0).unwrap().vertex_count(), 1);
        assert_eq!(path_graph(&b, 2).unwrap().vertex_count(), 7);
        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let b = ball(&dc, 2).unwrap().into_window();
        let p = path_graph(&b, 2).unwrap();
        assert_eq!(p.vertex_count(), 21);
        let report = validate(&p, 2).unwrap();
        assert!(report.outcome(crate::graph::Check::Fairness).passed());
    }

    /// Quotienting the path graph by (target, weight) yields the cover: the
    /// out-edge data of a class never depends on the representative path.
    #[test]
    fn cover_is_path_graph_quotient() {
        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let base = ball(&dc, 3).unwrap().into_window();
        let paths = path_graph(&base, 3).unwrap();
        let cover = TracialCover::build(base.clone(), 3).unwrap();
        let mut target = alloc::vec![base.basepoint(); paths.vertex_count()];
        let mut weight = alloc::vec![Weight::one(base.context()); paths.vertex_count()];
        for (i, rec) in paths.edges().iter().enumerate() {
            let base_e = base.out(target[rec.source]).iter().copied().nth(
                paths.out(rec.source).iter().position(|&x| x == i).unwrap(),
            );
            let be = base.edge(base_e.unwrap());
            target[rec.target] = be.target;
            weight[rec.target] = &weight[rec.source] * &be.weight;
        }
        let mut classes = alloc::collections::BTreeSet::new();
        for p in 0..paths.vertex_count() {
            let c = cover.find(target[p], &weight[p]).expect("every path class is a cover vertex");
            classes.insert(c);
            if !paths.is_boundary(p) {
                let mut a: Vec<f64> = paths.out(p).iter().map(|&e| paths.edge(e).weight.value()).collect();
                let mut b: Vec<f64> = cover.out(c).iter().map(|&e| cover.edge(e).weight.value()).collect();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                assert_eq!(a, b);
            }
        }
        assert_eq!(classes.len(), cover.vertex_count());
    }

    #[test]
    fn double_chain_cover_is_grid() {
        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let grid = LatticeGraph::grid(&ctx2(), "a", "b").unwrap();
        for r in 0..=3 {
            let c = tracial_cover(&dc, r).unwrap();
            let gb = ball(&grid, r).unwrap();
            assert!(iso_check(&c, &gb, true).unwrap().is_some(), "radius {r}");
        }
    }

    #[test]
    fn tracial_graphs_are_fixed_points() {
        let q: Context = GeneratorContext::new([("q", 2.0)]).unwrap().into_shared();
        let chain = LatticeGraph::single_chain(&q, "q").unwrap();
        let c = tracial_cover(&chain, 4).unwrap();
        assert!(iso_check(&c, &ball(&chain, 4).unwrap(), true).unwrap().is_some());
    }

    #[test]
    fn three_cycle_cover_is_chain() {
        let tri = cycle(3, 2.0).unwrap();
        let q = tri.context().clone();
        let chain = LatticeGraph::single_chain(&q, "q").unwrap();
        let c = tracial_cover(&tri, 3).unwrap();
        assert!(iso_check(&c, &ball(&chain, 3).unwrap(), true).unwrap().is_some());
    }

    #[test]
    fn cover_is_tracial_with_its_weighting() {
        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let c = tracial_cover(&dc, 3).unwrap();
        let w = c.window().vertex_weighting().expect("cover is tracial");
        for (x, y) in w.weights().iter().zip(c.weighting().weights()) {
            assert!(x.weight_eq(y).unwrap());
        }
        assert!(validate(c.window(), 3).unwrap().passed());
    }

    #[test]
    fn cover_is_idempotent() {
        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let c = tracial_cover(&dc, 3).unwrap();
        let cc = TracialCover::build(c.window().clone(), 3).unwrap();
        assert!(iso_check(&cc, &c, true).unwrap().is_some());
    }

    #[test]
    fn lifting() {
        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let c = tracial_cover(&dc, 2).unwrap();
        let base = c.base();
        assert_eq!(c.lift_loop(&Path::empty()).unwrap(), Path::empty());

        let a_out = base.out(0).iter().copied().find(|&e| base.edge(e).weight.compact_text() == "a").unwrap();
        let back = base.conjugate(a_out).unwrap();
        let lifted = c.lift_loop(&Path::new(alloc::vec![a_out, back])).unwrap();
        let mid = c.edge(lifted.edges[0]).target;
        assert_eq!(c.vertex(mid).weight.compact_text(), "a");
        assert_eq!(c.vertex(mid).target, base.edge(a_out).target);
        assert_eq!(c.edge(lifted.edges[1]).target, 0);

        let b_back = base
            .out(base.edge(a_out).target)
            .iter()
            .copied()
            .find(|&e| base.edge(e).weight.compact_text() == "b^-1")
            .unwrap();
        match c.lift_loop(&Path::new(alloc::vec![a_out, b_back])) {
            Err(LiftError::NonIdentityWeight(w)) => assert_eq!(w.compact_text(), "a*b^-1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn loop_weight_groups() {
        let q: Context = GeneratorContext::new([("q", 2.0)]).unwrap().into_shared();
        let chain = LatticeGraph::single_chain(&q, "q").unwrap();
        assert!(loop_weight_group(&chain, 6).unwrap().generators.is_empty());

        let dc = LatticeGraph::double_chain(&ctx2(), "a", "b").unwrap();
        let t = loop_weight_group(&dc, 4).unwrap();
        assert_eq!(t.generators.len(), 1);
        let g = &t.generators[0];
        assert!(g.compact_text() == "a*b^-1" || g.compact_text() == "a^-1*b");

        let tri = cycle(3, 2.0).unwrap();
        let t = loop_weight_group(&tri, 3).unwrap();
        assert_eq!(t.generators.len(), 1);
        assert_eq!(*t.generators[0].exponents().unwrap()[0].numer(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Weight-1 loops of the base and based loops of the cover are equinumerous.
        #[test]
        fn lift_counts_match(a in 2u32..6, db in 1u32..4, half in 1usize..3) {
            let n = 2 * half;
            let ctx: Context = GeneratorContext::new([("a", a as f64), ("b", (a + db) as f64)]).unwrap().into_shared();
            let dc = LatticeGraph::double_chain(&ctx, "a", "b").unwrap();
            let c = tracial_cover(&dc, n).unwrap();
            let base = c.base();
            let unit: Vec<Path> = base.loops(n).unwrap().into_iter().filter(|l| base.path_weight(l).is_identity()).collect();
            let lifted: alloc::collections::BTreeSet<Path> = unit.iter().map(|l| c.lift_loop(l).unwrap()).collect();
            prop_assert_eq!(lifted.len(), unit.len());
            prop_assert_eq!(c.window().loops(n).unwrap().len(), unit.len());
        }
    }
}

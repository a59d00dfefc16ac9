//! Weight-preserving partial automorphisms and the invariant `W×(Γ) = T₀(Γ)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{ball, Ball, DeltaGraph, GraphError, NonTracialWitness, VertexWeighting};
use crate::weights::{reduce_generators, Weight, WeightMap};

/// A map from the ball of `certified_radius` into the graph preserving
/// weighted adjacency, with `w_V(α(v)) = λ_α w_V(v)`.
#[derive(Debug, Clone)]
pub struct PartialAutomorphism<V> {
    pub mapping: Vec<(V, V)>,
    pub certified_radius: usize,
    /// `λ_α = w_V(α(*))`.
    pub star_image_weight: Weight,
}

#[derive(Debug, Clone)]
pub enum InvariantError {
    Graph(GraphError),
    NotTracial(NonTracialWitness),
}

impl fmt::Display for InvariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantError::Graph(e) => write!(f, "{e}"),
            InvariantError::NotTracial(w) => write!(f, "graph is not tracial: a loop has weight {}", w.weight),
        }
    }
}

impl core::error::Error for InvariantError {}

impl From<GraphError> for InvariantError {
    fn from(e: GraphError) -> Self {
        InvariantError::Graph(e)
    }
}

struct Search<'a, V, E> {
    target: &'a Ball<V, E>,
    weighting: &'a VertexWeighting,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    signature: Vec<Vec<Weight>>,
    between: BTreeMap<(usize, usize), Vec<Weight>>,
    nbrs: Vec<Vec<usize>>,
    in_domain: Vec<bool>,
    map: Vec<Option<usize>>,
    inverse: Vec<Option<usize>>,
    lambda: Option<Weight>,
    found: Vec<(Vec<usize>, Weight)>,
}

fn same(a: &[Weight], b: &[Weight]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.loosely_eq(y))
}

impl<V: Ord + Clone, E> Search<'_, V, E> {
    fn between(&self, u: usize, v: usize) -> &[Weight] {
        self.between.get(&(u, v)).map_or(&[], Vec::as_slice)
    }

    fn fits(&self, v: usize, c: usize) -> bool {
        if self.inverse[c].is_some() || !same(&self.signature[v], &self.signature[c]) {
            return false;
        }
        if let Some(l) = &self.lambda {
            if !(l * self.weighting.weight(v)).loosely_eq(self.weighting.weight(c)) {
                return false;
            }
        }
        let image = |u: usize| if u == v { Some(c) } else { self.map[u] };
        let preimage = |x: usize| if x == c { Some(v) } else { self.inverse[x] };
        for &u in &self.nbrs[v] {
            if !self.in_domain[u] {
                continue;
            }
            if let Some(fu) = image(u) {
                if !same(self.between(v, u), self.between(c, fu)) || !same(self.between(u, v), self.between(fu, c)) {
                    return false;
                }
            }
        }
        for &x in &self.nbrs[c] {
            if let Some(u) = preimage(x) {
                if !same(self.between(v, u), self.between(c, x)) || !same(self.between(u, v), self.between(x, c)) {
                    return false;
                }
            }
        }
        true
    }

    fn extend(&mut self, k: usize) {
        if k == self.order.len() {
            let images = self.order.iter().map(|&v| self.map[v].expect("mapped")).collect();
            self.found.push((images, self.lambda.clone().expect("set with the root")));
            return;
        }
        let v = self.order[k];
        let candidates: Vec<usize> = match self.parent[v] {
            Some(p) => self.nbrs[self.map[p].expect("parent first")].clone(),
            None => Vec::new(),
        };
        for c in candidates {
            if self.fits(v, c) {
                self.map[v] = Some(c);
                self.inverse[c] = Some(v);
                self.extend(k + 1);
                self.map[v] = None;
                self.inverse[c] = None;
            }
        }
    }
}

/// Every map from the ball of `radius` that sends `*` within `shift_bound` of
/// itself and preserves weighted adjacency, found by backtracking in
/// breadth-first order. Each is certified on the ball only.
pub fn partial_automorphisms<G: DeltaGraph>(
    g: &G,
    radius: usize,
    shift_bound: usize,
) -> Result<Vec<PartialAutomorphism<G::Vertex>>, InvariantError> {
    let t = ball(g, radius + shift_bound + 1)?;
    let weighting = t.vertex_weighting().map_err(InvariantError::NotTracial)?;
    let n = t.vertex_count();
    let mut signature = alloc::vec![Vec::new(); n];
    let mut between: BTreeMap<(usize, usize), Vec<Weight>> = BTreeMap::new();
    let mut nbrs = alloc::vec![Vec::new(); n];
    for rec in t.edges() {
        signature[rec.source].push(rec.weight.clone());
        between.entry((rec.source, rec.target)).or_default().push(rec.weight.clone());
        nbrs[rec.source].push(rec.target);
        nbrs[rec.target].push(rec.source);
    }
    for s in &mut signature {
        s.sort_by(|a, b| a.cmp_value(b));
    }
    for w in between.values_mut() {
        w.sort_by(|a, b| a.cmp_value(b));
    }
    for l in &mut nbrs {
        l.sort_unstable();
        l.dedup();
    }
    let in_domain: Vec<bool> = (0..n).map(|v| t.distance(v).is_some_and(|d| d <= radius)).collect();
    // Ball indices are breadth-first, so the domain is a prefix and parents precede children.
    let order: Vec<usize> = (0..n).filter(|&v| in_domain[v]).collect();
    let mut parent = alloc::vec![None; n];
    for rec in t.edges() {
        if in_domain[rec.target] && parent[rec.target].is_none() && t.distance(rec.source).map(|d| d + 1) == t.distance(rec.target) {
            parent[rec.target] = Some(rec.source);
        }
    }
    let bp = t.basepoint();
    let mut search = Search {
        target: &t,
        weighting: &weighting,
        order,
        parent,
        signature,
        between,
        nbrs,
        in_domain,
        map: alloc::vec![None; n],
        inverse: alloc::vec![None; n],
        lambda: None,
        found: Vec::new(),
    };
    for c in 0..n {
        if t.distance(c).is_none_or(|d| d > shift_bound) {
            continue;
        }
        search.lambda = Some(weighting.weight(c).clone());
        if search.fits(bp, c) {
            search.map[bp] = Some(c);
            search.inverse[c] = Some(bp);
            search.extend(1);
            search.map[bp] = None;
            search.inverse[c] = None;
        }
    }
    let order = search.order.clone();
    let target = search.target;
    Ok(search
        .found
        .into_iter()
        .map(|(images, lambda)| PartialAutomorphism {
            mapping: order.iter().zip(images).map(|(&v, c)| (target.origin(v).clone(), target.origin(c).clone())).collect(),
            certified_radius: radius,
            star_image_weight: lambda,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    WTimes,
    T0,
}

impl InvariantKind {
    pub fn name(self) -> &'static str {
        match self {
            InvariantKind::WTimes => "W×",
            InvariantKind::T0 => "T0",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub kind: InvariantKind,
    /// Distinct `λ_α`, in increasing order; always contains 1.
    pub certified_weights: Vec<Weight>,
    /// Generators of the subgroup spanned by `certified_weights`; empty for the trivial group.
    pub generators: Vec<Weight>,
    pub certified_radius: usize,
    pub shift_bound: usize,
}

fn report<G: DeltaGraph>(g: &G, radius: usize, shift_bound: usize, kind: InvariantKind) -> Result<InvariantReport, InvariantError> {
    let autos = partial_automorphisms(g, radius, shift_bound)?;
    let mut seen = WeightMap::new(g.context().tolerance());
    let mut weights = Vec::new();
    for a in autos {
        let fresh = seen.len();
        if *seen.get_or_insert(&a.star_image_weight, fresh) == fresh {
            weights.push(a.star_image_weight);
        }
    }
    weights.sort_by(|a, b| a.cmp_value(b));
    let generators = reduce_generators(g.context(), &weights);
    Ok(InvariantReport { kind, certified_weights: weights, generators, certified_radius: radius, shift_bound })
}

/// `W×(Γ) = {w_V(α(*))}` over partial automorphisms certified to `radius`.
pub fn w_times<G: DeltaGraph>(g: &G, radius: usize, shift_bound: usize) -> Result<InvariantReport, InvariantError> {
    report(g, radius, shift_bound, InvariantKind::WTimes)
}

/// `T₀(Γ)`, computed as `W×(Γ)`.
pub fn t0<G: DeltaGraph>(g: &G, radius: usize, shift_bound: usize) -> Result<InvariantReport, InvariantError> {
    report(g, radius, shift_bound, InvariantKind::T0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{cycle, DeformedChain, LatticeGraph, Point};
    use crate::weights::{Context, GeneratorContext};
    use alloc::string::String;
    use proptest::prelude::*;

    fn ab(a: f64, b: f64) -> Context {
        GeneratorContext::new([("a", a), ("b", b)]).unwrap().into_shared()
    }

    fn texts(ws: &[Weight]) -> Vec<String> {
        ws.iter().map(Weight::compact_text).collect()
    }

    #[test]
    fn chain_shifts_only() {
        let ctx: Context = GeneratorContext::new([("q", 2.0)]).unwrap().into_shared();
        let chain = LatticeGraph::single_chain(&ctx, "q").unwrap();
        let autos = partial_automorphisms(&chain, 3, 3).unwrap();
        assert_eq!(autos.len(), 7);
        for a in &autos {
            let m = a.mapping[0].1 .0[0];
            assert_eq!(a.star_image_weight.exponents().unwrap()[0], m.into());
            assert!(a.mapping.iter().all(|(v, w)| w.0[0] == v.0[0] + m));
        }
        let r = t0(&chain, 3, 3).unwrap();
        assert_eq!(texts(&r.generators), ["q"]);
        assert_eq!(r.certified_weights.len(), 7);
    }

    #[test]
    fn grid_translations_only() {
        let grid = LatticeGraph::grid(&ab(2.0, 3.0), "a", "b").unwrap();
        let autos = partial_automorphisms(&grid, 2, 2).unwrap();
        assert_eq!(autos.len(), 13);
        for a in &autos {
            let Point(s) = &a.mapping[0].1;
            assert!(s[0].abs() + s[1].abs() <= 2);
            assert!(a.mapping.iter().all(|(v, w)| w.0[0] == v.0[0] + s[0] && w.0[1] == v.0[1] + s[1]));
        }
        let mut g = texts(&w_times(&grid, 2, 2).unwrap().generators);
        g.sort();
        assert_eq!(g, ["a", "b"]);
    }

    #[test]
    fn cayley_rank_three() {
        let ctx = GeneratorContext::new([("a", 2.0), ("b", 3.0), ("c", 5.0)]).unwrap().into_shared();
        let g = LatticeGraph::cayley(&ctx, &["a", "b", "c"]).unwrap();
        let mut gens = texts(&t0(&g, 1, 1).unwrap().generators);
        gens.sort();
        assert_eq!(gens, ["a", "b", "c"]);
    }

    #[test]
    fn finite_unit_cycle_is_trivial() {
        let c = cycle(4, 1.0).unwrap();
        let autos = partial_automorphisms(&c, 2, 2).unwrap();
        assert_eq!(autos.len(), 8);
        let r = t0(&c, 2, 2).unwrap();
        assert!(r.generators.is_empty());
        assert_eq!(r.certified_weights.len(), 1);
        assert!(r.certified_weights[0].is_identity());
    }

    #[test]
    fn non_tracial_inputs_are_refused() {
        let dc = LatticeGraph::double_chain(&ab(2.0, 3.0), "a", "b").unwrap();
        assert!(matches!(t0(&dc, 2, 2), Err(InvariantError::NotTracial(_))));
    }

    #[test]
    fn deformed_chain_is_rigid() {
        let g = DeformedChain::new(1.05, 0.3).unwrap();
        let r = w_times(&g, 3, 3).unwrap();
        assert_eq!(r.certified_weights.len(), 1);
        assert!(r.certified_weights[0].is_identity());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn certified_sets_behave(a in 2u32..5, db in 1u32..3, r in 1usize..3, s in 0usize..3) {
            let grid = LatticeGraph::grid(&ab(a as f64, (a + db) as f64), "a", "b").unwrap();
            let here = w_times(&grid, r, s).unwrap();
            let further = w_times(&grid, r + 1, s).unwrap();
            prop_assert!(here.certified_weights.iter().any(Weight::is_identity));
            for w in &here.certified_weights {
                prop_assert!(here.certified_weights.iter().any(|x| x.loosely_eq(&w.inv())));
            }
            for w in &further.certified_weights {
                prop_assert!(here.certified_weights.iter().any(|x| x.loosely_eq(w)));
            }
        }

        /// Composites of certified maps, restricted to a smaller ball, are found again.
        #[test]
        fn composition_is_certified(q in 2u32..5) {
            let ctx: Context = GeneratorContext::new([("q", q as f64)]).unwrap().into_shared();
            let chain = LatticeGraph::single_chain(&ctx, "q").unwrap();
            let autos = partial_automorphisms(&chain, 3, 2).unwrap();
            let small = partial_automorphisms(&chain, 1, 4).unwrap();
            for x in &autos {
                for y in &autos {
                    let lam = &x.star_image_weight * &y.star_image_weight;
                    let fx: BTreeMap<&Point, &Point> = x.mapping.iter().map(|(a, b)| (a, b)).collect();
                    let composite: Vec<(Point, Point)> = y.mapping.iter()
                        .filter(|(v, _)| v.0[0].abs() <= 1)
                        .map(|(v, w)| (v.clone(), (*fx.get(w).unwrap()).clone()))
                        .collect();
                    let hit = small.iter().find(|z| z.star_image_weight.loosely_eq(&lam)).unwrap();
                    let mut got = hit.mapping.clone();
                    got.sort();
                    let mut want = composite;
                    want.sort();
                    prop_assert_eq!(got, want);
                }
            }
        }
    }
}

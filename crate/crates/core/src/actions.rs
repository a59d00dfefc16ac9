//! Weight-scaling group actions, the quotient `Γ^H`, and recovery of a graph
//! from its tracial cover.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::cover::tracial_cover;
use crate::graph::{ball, Ball, DeltaGraph, EdgeRecord, FiniteGraph, GraphError, NonTracialWitness, TruncatedGraph, VertexWeighting};
use crate::weights::Weight;

type VertexMap<V> = Box<dyn Fn(&V) -> Option<V> + Send + Sync>;
type VertexFn<'a, V> = &'a dyn Fn(&V) -> Option<V>;

/// One generator `h` of the acting group, given by its action on vertices.
///
/// The maps may return `None` where the action is unknown (outside a finite
/// table, for instance).
pub struct ActionGenerator<V> {
    pub label: String,
    pub weight: Weight,
    forward: VertexMap<V>,
    inverse: VertexMap<V>,
}

impl<V> ActionGenerator<V> {
    pub fn new(
        label: impl Into<String>,
        weight: Weight,
        forward: impl Fn(&V) -> Option<V> + Send + Sync + 'static,
        inverse: impl Fn(&V) -> Option<V> + Send + Sync + 'static,
    ) -> Self {
        ActionGenerator { label: label.into(), weight, forward: Box::new(forward), inverse: Box::new(inverse) }
    }

    pub fn apply(&self, v: &V) -> Option<V> {
        (self.forward)(v)
    }

    pub fn apply_inverse(&self, v: &V) -> Option<V> {
        (self.inverse)(v)
    }
}

impl<V: Ord + Clone + Send + Sync + 'static> ActionGenerator<V> {
    /// A generator defined by an explicit vertex table; the inverse is the
    /// reversed table.
    pub fn from_table(label: impl Into<String>, weight: Weight, pairs: impl IntoIterator<Item = (V, V)>) -> Self {
        let forward: BTreeMap<V, V> = pairs.into_iter().collect();
        let inverse: BTreeMap<V, V> = forward.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        ActionGenerator::new(label, weight, move |v| forward.get(v).cloned(), move |v| inverse.get(v).cloned())
    }
}

impl<V> fmt::Debug for ActionGenerator<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionGenerator").field("label", &self.label).field("weight", &self.weight).finish()
    }
}

#[derive(Debug)]
pub struct GraphAction<V> {
    pub generators: Vec<ActionGenerator<V>>,
}

impl<V> GraphAction<V> {
    pub fn new(generators: Vec<ActionGenerator<V>>) -> Self {
        GraphAction { generators }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionCheck {
    Tracial,
    WeightScaling,
    Adjacency,
    Inverse,
    /// A generator of weight 1 moved a vertex.
    Free,
}

impl ActionCheck {
    pub fn name(self) -> &'static str {
        match self {
            ActionCheck::Tracial => "tracial",
            ActionCheck::WeightScaling => "weight-scaling",
            ActionCheck::Adjacency => "adjacency",
            ActionCheck::Inverse => "inverse",
            ActionCheck::Free => "free",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionViolation {
    pub generator: String,
    pub check: ActionCheck,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionReport {
    Pass { radius: usize },
    Fail(ActionViolation),
    /// The action could not be evaluated inside the materialized region.
    Inconclusive { generator: String, vertex: String, radius: usize },
}

impl ActionReport {
    pub fn passed(&self) -> bool {
        matches!(self, ActionReport::Pass { .. })
    }
}

#[derive(Debug, Clone)]
pub enum ActionError {
    Graph(GraphError),
    NotTracial(NonTracialWitness),
    Rejected(ActionReport),
}

impl fmt::Display for ActionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionError::Graph(e) => write!(f, "{e}"),
            ActionError::NotTracial(w) => write!(f, "graph is not tracial: a loop has weight {}", w.weight),
            ActionError::Rejected(ActionReport::Fail(v)) => {
                write!(f, "generator {} fails {}: {}", v.generator, v.check.name(), v.detail)
            }
            ActionError::Rejected(ActionReport::Inconclusive { generator, vertex, radius }) => {
                write!(f, "generator {generator} leaves the materialized region at {vertex} (radius {radius})")
            }
            ActionError::Rejected(ActionReport::Pass { .. }) => f.write_str("action rejected"),
        }
    }
}

impl core::error::Error for ActionError {}

impl From<GraphError> for ActionError {
    fn from(e: GraphError) -> Self {
        ActionError::Graph(e)
    }
}

/// Radius of the region in which images of the radius-`r` ball are looked up.
fn work_radius(r: usize) -> usize {
    2 * r + 2
}

struct Work<V, E> {
    ball: Ball<V, E>,
    weighting: VertexWeighting,
}

fn materialize<G: DeltaGraph>(g: &G, radius: usize) -> Result<Work<G::Vertex, G::Edge>, ActionError> {
    let b = ball(g, radius)?;
    let weighting = b.vertex_weighting().map_err(ActionError::NotTracial)?;
    Ok(Work { ball: b, weighting })
}

fn check_on<G: DeltaGraph>(
    g: &G,
    act: &GraphAction<G::Vertex>,
    radius: usize,
    work: &Work<G::Vertex, G::Edge>,
) -> Result<ActionReport, GraphError> {
    let b = &work.ball;
    let fail = |generator: &str, check, detail| {
        Ok(ActionReport::Fail(ActionViolation { generator: String::from(generator), check, detail }))
    };
    for gen in &act.generators {
        let directions: [(String, Weight, VertexFn<G::Vertex>, VertexFn<G::Vertex>); 2] = [
            (gen.label.clone(), gen.weight.clone(), &|v| gen.apply(v), &|v| gen.apply_inverse(v)),
            (alloc::format!("{}^-1", gen.label), gen.weight.inv(), &|v| gen.apply_inverse(v), &|v| gen.apply(v)),
        ];
        for (label, h, fwd, back) in &directions {
            for i in 0..b.vertex_count() {
                if b.distance(i).is_none_or(|d| d > radius) {
                    continue;
                }
                let v = b.origin(i);
                let inconclusive =
                    || ActionReport::Inconclusive { generator: label.clone(), vertex: g.vertex_name(v), radius };
                let Some(u) = fwd(v) else { return Ok(inconclusive()) };
                let Some(j) = b.index_of(&u) else { return Ok(inconclusive()) };
                if h.is_identity() && u != *v {
                    return fail(label, ActionCheck::Free, alloc::format!("weight-1 generator moves {}", g.vertex_name(v)));
                }
                let expected = h.checked_mul(work.weighting.weight(i))?;
                if !expected.weight_eq(work.weighting.weight(j))? {
                    return fail(
                        label,
                        ActionCheck::WeightScaling,
                        alloc::format!(
                            "w_V({}) = {} but h * w_V({}) = {}",
                            g.vertex_name(&u),
                            work.weighting.weight(j),
                            g.vertex_name(v),
                            expected
                        ),
                    );
                }
                if back(&u).as_ref() != Some(v) {
                    return fail(label, ActionCheck::Inverse, alloc::format!("inverse does not return {}", g.vertex_name(v)));
                }
                let mut image = Vec::new();
                for e in g.out_edges(v)? {
                    let Some(t) = fwd(&e.target) else { return Ok(inconclusive()) };
                    image.push((t, e.weight));
                }
                let mut actual: Vec<(G::Vertex, Weight)> = g.out_edges(&u)?.into_iter().map(|e| (e.target, e.weight)).collect();
                let key = |a: &(G::Vertex, Weight), b: &(G::Vertex, Weight)| a.0.cmp(&b.0).then(a.1.cmp_value(&b.1));
                image.sort_by(key);
                actual.sort_by(key);
                let same = image.len() == actual.len()
                    && image.iter().zip(&actual).all(|(x, y)| x.0 == y.0 && x.1.loosely_eq(&y.1));
                if !same {
                    return fail(
                        label,
                        ActionCheck::Adjacency,
                        alloc::format!("edges at {} do not map onto edges at {}", g.vertex_name(v), g.vertex_name(&u)),
                    );
                }
            }
        }
    }
    Ok(ActionReport::Pass { radius })
}

/// Verifies weight scaling, adjacency preservation and inverse consistency of
/// every generator and its inverse on the ball of `radius`.
pub fn check_action<G: DeltaGraph>(
    g: &G,
    act: &GraphAction<G::Vertex>,
    radius: usize,
) -> Result<ActionReport, ActionError> {
    let work = materialize(g, work_radius(radius))?;
    Ok(check_on(g, act, radius, &work)?)
}

#[derive(Debug, Clone)]
pub struct Orbit<V> {
    pub representative: V,
    /// Members found inside the materialized region, closest to the basepoint first.
    pub members: Vec<V>,
}

/// A quotient window together with the orbits its vertices stand for.
#[derive(Debug, Clone)]
pub struct QuotientGraph<V> {
    pub window: TruncatedGraph,
    pub orbits: Vec<Orbit<V>>,
}

impl<V> Deref for QuotientGraph<V> {
    type Target = TruncatedGraph;
    fn deref(&self) -> &TruncatedGraph {
        &self.window
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Assembles a quotient window from orbit labels on a materialized region.
///
/// `orbit_of[i]` names the orbit of region vertex `i`; each orbit takes the
/// member with the smallest region index as representative, and its edges are
/// the outgoing edges of that representative. Edges between the same orbits
/// with mutually inverse weights are paired as conjugates in order.
fn assemble(
    region: &TruncatedGraph,
    orbit_of: &[usize],
    radius: usize,
    labels: impl Fn(usize) -> String,
) -> Result<(TruncatedGraph, Vec<usize>), GraphError> {
    let mut rep_of_orbit: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &o) in orbit_of.iter().enumerate() {
        rep_of_orbit.entry(o).or_insert(i);
    }
    // Breadth-first over orbits, following representative edges.
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut reps: Vec<usize> = alloc::vec![rep_of_orbit[&orbit_of[region.basepoint()]]];
    let mut dist = alloc::vec![0usize];
    index.insert(orbit_of[region.basepoint()], 0);
    let mut i = 0;
    while i < reps.len() {
        if dist[i] < radius {
            region.require_interior(reps[i])?;
            for &e in region.out(reps[i]) {
                let o = orbit_of[region.edge(e).target];
                if let alloc::collections::btree_map::Entry::Vacant(slot) = index.entry(o) {
                    slot.insert(reps.len());
                    reps.push(rep_of_orbit[&o]);
                    dist.push(dist[i] + 1);
                }
            }
        }
        i += 1;
    }

    let mut records: Vec<EdgeRecord> = Vec::new();
    for (s, &rep) in reps.iter().enumerate() {
        for &e in region.out(rep) {
            let rec = region.edge(e);
            if let Some(&t) = index.get(&orbit_of[rec.target]) {
                records.push(EdgeRecord { label: rec.label.clone(), source: s, target: t, weight: rec.weight.clone(), conjugate: None });
            }
        }
    }
    // Group parallel edges by (source, target, weight) in index order.
    let mut groups: Vec<(usize, usize, Weight, Vec<usize>)> = Vec::new();
    for (k, r) in records.iter().enumerate() {
        match groups.iter_mut().find(|g| g.0 == r.source && g.1 == r.target && g.2.loosely_eq(&r.weight)) {
            Some(g) => g.3.push(k),
            None => groups.push((r.source, r.target, r.weight.clone(), alloc::vec![k])),
        }
    }
    for g in &groups {
        let inv = g.2.inv();
        if let Some(partner) = groups.iter().find(|h| h.0 == g.1 && h.1 == g.0 && h.2.loosely_eq(&inv)) {
            for (&a, &b) in g.3.iter().zip(&partner.3) {
                records[a].conjugate = Some(b);
            }
        }
    }
    let names = reps.iter().map(|&r| labels(r)).collect();
    let boundary = dist.iter().map(|&d| d == radius).collect();
    let graph = FiniteGraph::new(region.delta(), region.context().clone(), names, records, 0)?;
    Ok((TruncatedGraph::with_boundary(graph, Some(radius), boundary), reps))
}

/// The quotient `Γ^H` truncated to `radius`: vertices are orbits, and each
/// orbit carries the outgoing edges of its representative.
///
/// The action must pass [`check_action`] at `radius + 1`. Orbits are closed
/// under the generators inside the region used by that check, and each orbit
/// is represented by its member closest to the basepoint.
pub fn quotient<G: DeltaGraph>(
    g: &G,
    act: &GraphAction<G::Vertex>,
    radius: usize,
) -> Result<QuotientGraph<G::Vertex>, ActionError> {
    let work = materialize(g, work_radius(radius + 1))?;
    let report = check_on(g, act, radius + 1, &work)?;
    if !report.passed() {
        return Err(ActionError::Rejected(report));
    }
    let b = &work.ball;
    let n = b.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for gen in &act.generators {
            for image in [gen.apply(b.origin(i)), gen.apply_inverse(b.origin(i))].into_iter().flatten() {
                if let Some(j) = b.index_of(&image) {
                    let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let orbit_of: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let (window, reps) = assemble(b, &orbit_of, radius, |r| g.vertex_name(b.origin(r)))?;
    let orbits = reps
        .iter()
        .map(|&r| Orbit {
            representative: b.origin(r).clone(),
            members: (0..n).filter(|&i| orbit_of[i] == orbit_of[r]).map(|i| b.origin(i).clone()).collect(),
        })
        .collect();
    Ok(QuotientGraph { window, orbits })
}

/// Reconstructs the ball of `radius` from the tracial cover by collapsing
/// cover vertices with a common target, which are exactly the orbits of the
/// loop-weight action `[ω, v] -> [ω w(l), v]`.
///
/// Orbits are indices of cover vertices.
pub fn recover<G: DeltaGraph>(g: &G, radius: usize) -> Result<QuotientGraph<usize>, GraphError> {
    let cover = tracial_cover(g, radius + 1)?;
    let orbit_of: Vec<usize> = cover.vertices().iter().map(|cv| cv.target).collect();
    let base = cover.base();
    let mut window = assemble(cover.window(), &orbit_of, radius, |r| String::from(base.vertex_label(cover.vertex(r).target)))?;
    // Edges keep the base labels and base conjugation.
    let mut relabeled = Vec::with_capacity(window.0.edge_count());
    let mut at: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (k, rec) in window.0.edges().iter().enumerate() {
        let rep = window.1[rec.source];
        let cover_edge = cover.out(rep).iter().copied().find(|&e| cover.edge(e).label == rec.label).expect("edge of the representative");
        at.insert((rec.source, cover.base_edge(cover_edge)), k);
        relabeled.push((rec.clone(), cover.base_edge(cover_edge)));
    }
    let records = relabeled
        .iter()
        .map(|(rec, be)| EdgeRecord {
            label: base.edge(*be).label.clone(),
            conjugate: base.conjugate(*be).and_then(|c| at.get(&(rec.target, c)).copied()),
            ..rec.clone()
        })
        .collect();
    let graph = FiniteGraph::new(
        window.0.delta(),
        window.0.context().clone(),
        window.0.vertex_labels().to_vec(),
        records,
        0,
    )?;
    let boundary = window.0.boundary_flags().to_vec();
    window.0 = TruncatedGraph::with_boundary(graph, Some(radius), boundary);
    let orbits = window
        .1
        .iter()
        .map(|&r| Orbit {
            representative: r,
            members: (0..cover.vertex_count()).filter(|&i| orbit_of[i] == orbit_of[r]).collect(),
        })
        .collect();
    Ok(QuotientGraph { window: window.0, orbits })
}

//! The example graphs: chains, grids, Cayley graphs of free abelian groups,
//! the deformed `A∞,∞` chain and weighted cycles.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::actions::ActionGenerator;
use crate::graph::{DeltaGraph, EdgeRecord, FiniteGraph, GraphError, OutEdge};
use crate::weights::{Context, GeneratorContext, Weight};

/// A lattice point; rank-1 points print as plain integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn origin(rank: usize) -> Self {
        Point(alloc::vec![0; rank])
    }

    fn shifted(&self, by: &[i64]) -> Point {
        Point(self.0.iter().zip(by).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [x] = self.0.as_slice() {
            return write!(f, "{x}");
        }
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// The edge leaving `from` along step `step` of its lattice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeEdge {
    pub from: Point,
    pub step: usize,
}

impl fmt::Display for LatticeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.from, self.step)
    }
}

#[derive(Debug, Clone)]
struct Step {
    shift: Vec<i64>,
    weight: Weight,
    conjugate: usize,
}

/// A translation-invariant graph on `Z^k`: every vertex has the same list of
/// steps.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    ctx: Context,
    delta: f64,
    rank: usize,
    steps: Vec<Step>,
    /// Translations are automorphisms that scale vertex weights by the product
    /// of the axis weights; `None` when no such reading applies.
    axis_weights: Option<Vec<Weight>>,
}

fn out_of_domain(msg: impl Into<String>) -> GraphError {
    GraphError::Invalid(msg.into())
}

impl LatticeGraph {
    fn from_pairs(ctx: &Context, rank: usize, pairs: Vec<(Vec<i64>, Weight)>, axis_weights: Option<Vec<Weight>>) -> Self {
        let mut steps = Vec::with_capacity(2 * pairs.len());
        for (k, (shift, w)) in pairs.into_iter().enumerate() {
            let back: Vec<i64> = shift.iter().map(|x| -x).collect();
            steps.push(Step { shift, weight: w.clone(), conjugate: 2 * k + 1 });
            steps.push(Step { shift: back, weight: w.inv(), conjugate: 2 * k });
        }
        let delta = steps.iter().map(|s| s.weight.value()).sum();
        LatticeGraph { ctx: ctx.clone(), delta, rank, steps, axis_weights }
    }

    /// The chain on `Z` with weight `q` to the right and `q^-1` to the left.
    pub fn single_chain(ctx: &Context, q: &str) -> Result<Self, GraphError> {
        let w = Weight::generator(ctx, q)?;
        if (w.value() - 1.0).abs() <= ctx.tolerance() {
            return Err(out_of_domain("single chain needs q != 1 (delta > 2)"));
        }
        Ok(Self::from_pairs(ctx, 1, alloc::vec![(alloc::vec![1], w.clone())], Some(alloc::vec![w])))
    }

    /// The chain on `Z` with two edges to each neighbour, weighted `a, b` to
    /// the right and `a^-1, b^-1` to the left.
    pub fn double_chain(ctx: &Context, a: &str, b: &str) -> Result<Self, GraphError> {
        let wa = Weight::generator(ctx, a)?;
        let wb = Weight::generator(ctx, b)?;
        let g = LatticeGraph {
            ctx: ctx.clone(),
            delta: wa.value() + 1.0 / wa.value() + wb.value() + 1.0 / wb.value(),
            rank: 1,
            steps: alloc::vec![
                Step { shift: alloc::vec![-1], weight: wa.inv(), conjugate: 2 },
                Step { shift: alloc::vec![-1], weight: wb.inv(), conjugate: 3 },
                Step { shift: alloc::vec![1], weight: wa, conjugate: 0 },
                Step { shift: alloc::vec![1], weight: wb, conjugate: 1 },
            ],
            axis_weights: None,
        };
        if g.delta <= 4.0 + ctx.tolerance() {
            return Err(out_of_domain("double chain needs delta > 4"));
        }
        Ok(g)
    }

    /// The grid `Z^2` with weight `a` horizontally and `b` vertically.
    pub fn grid(ctx: &Context, a: &str, b: &str) -> Result<Self, GraphError> {
        Self::cayley(ctx, &[a, b])
    }

    /// The Cayley graph of `Z^k` for the standard generators, the `i`-th
    /// generator's edges all weighted by `names[i]` (and inverses backwards).
    pub fn cayley(ctx: &Context, names: &[&str]) -> Result<Self, GraphError> {
        if names.is_empty() {
            return Err(out_of_domain("cayley graph needs at least one generator"));
        }
        let k = names.len();
        let mut pairs = Vec::with_capacity(k);
        for (i, name) in names.iter().enumerate() {
            let mut shift = alloc::vec![0; k];
            shift[i] = 1;
            pairs.push((shift, Weight::generator(ctx, name)?));
        }
        let axis = pairs.iter().map(|p| p.1.clone()).collect();
        Ok(Self::from_pairs(ctx, k, pairs, Some(axis)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The weight by which translation by `shift` scales vertex weights.
    pub fn translation_weight(&self, shift: &[i64]) -> Result<Weight, GraphError> {
        let axis = self
            .axis_weights
            .as_ref()
            .ok_or_else(|| out_of_domain("translations of this graph do not scale vertex weights"))?;
        if shift.len() != self.rank {
            return Err(out_of_domain(alloc::format!("shift needs {} components", self.rank)));
        }
        Ok(axis.iter().zip(shift).fold(Weight::one(&self.ctx), |acc, (w, &s)| &acc * &w.pow(s.into())))
    }
}

impl DeltaGraph for LatticeGraph {
    type Vertex = Point;
    type Edge = LatticeEdge;

    fn delta(&self) -> f64 {
        self.delta
    }
    fn context(&self) -> &Context {
        &self.ctx
    }
    fn basepoint(&self) -> Point {
        Point::origin(self.rank)
    }
    fn out_edges(&self, v: &Point) -> Result<Vec<OutEdge<Point, LatticeEdge>>, GraphError> {
        if v.0.len() != self.rank {
            return Err(GraphError::Neighbour { vertex: v.to_string(), reason: String::from("wrong rank") });
        }
        Ok(self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let target = v.shifted(&s.shift);
                OutEdge {
                    id: LatticeEdge { from: v.clone(), step: k },
                    conjugate: Some(LatticeEdge { from: target.clone(), step: s.conjugate }),
                    target,
                    weight: s.weight.clone(),
                }
            })
            .collect())
    }
    fn vertex_name(&self, v: &Point) -> String {
        v.to_string()
    }
    fn edge_name(&self, e: &LatticeEdge) -> String {
        e.to_string()
    }
}

/// Translation by `shift` as an action generator.
pub fn translation(g: &LatticeGraph, label: &str, shift: &[i64]) -> Result<ActionGenerator<Point>, GraphError> {
    let weight = g.translation_weight(shift)?;
    let fwd: Vec<i64> = shift.to_vec();
    let back: Vec<i64> = shift.iter().map(|x| -x).collect();
    Ok(ActionGenerator::new(label, weight, move |p: &Point| Some(p.shifted(&fwd)), move |p: &Point| Some(p.shifted(&back))))
}

/// The `A∞,∞` chain with float weights `c(m±1)/c(m)`, where
/// `c(k) = q^(x+k) + q^(-x-k)`. Each vertex's outgoing sum is `q + q^-1`.
#[derive(Debug, Clone)]
pub struct DeformedChain {
    ctx: Context,
    q: f64,
    x: f64,
}

impl DeformedChain {
    pub fn new(q: f64, x: f64) -> Result<Self, GraphError> {
        if !(q.is_finite() && q > 0.0 && x.is_finite()) {
            return Err(out_of_domain("deformed chain needs finite q > 0 and finite x"));
        }
        Ok(DeformedChain { ctx: Context::empty(), q, x })
    }

    fn c(&self, k: i64) -> f64 {
        let e = self.x + k as f64;
        libm::pow(self.q, e) + libm::pow(self.q, -e)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

impl DeltaGraph for DeformedChain {
    type Vertex = Point;
    type Edge = LatticeEdge;

    fn delta(&self) -> f64 {
        self.q + 1.0 / self.q
    }
    fn context(&self) -> &Context {
        &self.ctx
    }
    fn basepoint(&self) -> Point {
        Point::origin(1)
    }
    fn out_edges(&self, v: &Point) -> Result<Vec<OutEdge<Point, LatticeEdge>>, GraphError> {
        let [m] = v.0.as_slice() else {
            return Err(GraphError::Neighbour { vertex: v.to_string(), reason: String::from("wrong rank") });
        };
        let m = *m;
        let mut out = Vec::with_capacity(2);
        for (step, d) in [(0usize, 1i64), (1, -1)] {
            let w = Weight::float(&self.ctx, self.c(m + d) / self.c(m))?;
            let target = Point(alloc::vec![m + d]);
            out.push(OutEdge {
                id: LatticeEdge { from: v.clone(), step },
                conjugate: Some(LatticeEdge { from: target.clone(), step: 1 - step }),
                target,
                weight: w,
            });
        }
        Ok(out)
    }
    fn vertex_name(&self, v: &Point) -> String {
        v.to_string()
    }
    fn edge_name(&self, e: &LatticeEdge) -> String {
        e.to_string()
    }
}

/// The `n`-cycle with weight `q` forwards and `q^-1` backwards, in a context
/// with the single generator `q` (or no generator when `q == 1`).
pub fn cycle(n: usize, q: f64) -> Result<FiniteGraph, GraphError> {
    if n == 0 {
        return Err(out_of_domain("cycle needs at least one vertex"));
    }
    let (ctx, fwd) = if q == 1.0 {
        let ctx = Context::empty();
        let one = Weight::one(&ctx);
        (ctx, one)
    } else {
        let ctx = GeneratorContext::new([("q", q)])?.into_shared();
        let w = Weight::generator(&ctx, "q")?;
        (ctx, w)
    };
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        edges.push(EdgeRecord { label: alloc::format!("f{i}"), source: i, target: j, weight: fwd.clone(), conjugate: Some(2 * i + 1) });
        edges.push(EdgeRecord { label: alloc::format!("b{i}"), source: j, target: i, weight: fwd.inv(), conjugate: Some(2 * i) });
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteGraph::new(q + 1.0 / q, ctx, labels, edges, 0)
}

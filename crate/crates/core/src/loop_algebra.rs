//! The loop spaces `ℂ[L_n]` of a window with cup and cap maps, the star
//! structure, concatenation, the two inner products and the modular operator.
//!
//! Index conventions: `cup(v, i)` inserts a conjugate pair after edge `i`
//! (`0 <= i <= n`, with `i = 0` inserting at the basepoint); `cap(v, i)`
//! contracts edges `i` and `i + 1` (`1 <= i <= n - 1`). Delooping is then
//! `cap_{i+1} ∘ cup_i = δ`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::graph::{GraphError, Path, TruncatedGraph};
use crate::weights::{rel_close, Context, Exponent, Weight};

/// A scalar of the loop algebra: a finite sum of rational multiples of exact
/// monomials, or a complex float.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Exact(BTreeMap<Vec<Exponent>, Ratio<i64>>),
    Float(Complex64),
}

impl Coefficient {
    pub fn zero_exact() -> Self {
        Coefficient::Exact(BTreeMap::new())
    }

    /// `r · g^exponents`.
    pub fn term(exponents: Vec<Exponent>, r: Ratio<i64>) -> Self {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert(exponents, r);
        }
        Coefficient::Exact(m)
    }

    pub fn from_weight(w: &Weight) -> Self {
        match w.exponents() {
            Some(e) => Coefficient::Exact(BTreeMap::from([(e.to_vec(), Ratio::one())])),
            None => Coefficient::Float(Complex64::new(w.value(), 0.0)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(m) => m.is_empty(),
            Coefficient::Float(z) => z.is_zero(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Exact(_))
    }

    pub fn conj(&self) -> Self {
        match self {
            Coefficient::Exact(_) => self.clone(),
            Coefficient::Float(z) => Coefficient::Float(z.conj()),
        }
    }

    /// Numeric value, evaluating monomials at the generator values of `ctx`.
    pub fn value(&self, ctx: &Context) -> Complex64 {
        match self {
            Coefficient::Float(z) => *z,
            Coefficient::Exact(m) => {
                let re: f64 = m
                    .iter()
                    .map(|(exps, r)| {
                        let mono: f64 = exps
                            .iter()
                            .zip(ctx.generators())
                            .map(|(e, (_, g))| libm::pow(*g, *e.numer() as f64 / *e.denom() as f64))
                            .product();
                        mono * (*r.numer() as f64 / *r.denom() as f64)
                    })
                    .sum();
                Complex64::new(re, 0.0)
            }
        }
    }

    /// Exact comparison when both sides are exact, relative tolerance otherwise.
    pub fn approx_eq(&self, other: &Coefficient, ctx: &Context) -> bool {
        if let (Coefficient::Exact(a), Coefficient::Exact(b)) = (self, other) {
            return a == b;
        }
        let (x, y) = (self.value(ctx), other.value(ctx));
        let scale = x.norm().max(y.norm());
        (x - y).norm() <= ctx.tolerance() * scale
    }

    pub fn text(&self, ctx: &Context) -> String {
        match self {
            Coefficient::Float(z) if z.im == 0.0 => alloc::format!("{}", z.re),
            Coefficient::Float(z) => alloc::format!("{}{:+}i", z.re, z.im),
            Coefficient::Exact(m) if m.is_empty() => String::from("0"),
            Coefficient::Exact(m) => {
                let terms: Vec<String> = m
                    .iter()
                    .map(|(exps, r)| {
                        let mono = Weight::monomial(ctx, exps.clone()).map(|w| w.compact_text()).unwrap_or_default();
                        match (mono.as_str(), r.is_one()) {
                            ("1", _) => r.to_string(),
                            (_, true) => mono,
                            _ => alloc::format!("{r}*{mono}"),
                        }
                    })
                    .collect();
                terms.join(" + ")
            }
        }
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => {
                let mut out = a.clone();
                for (k, v) in b {
                    let e = out.entry(k.clone()).or_insert_with(Ratio::zero);
                    *e += v;
                    if e.is_zero() {
                        out.remove(k);
                    }
                }
                Coefficient::Exact(out)
            }
            (Coefficient::Float(a), Coefficient::Float(b)) => Coefficient::Float(a + b),
            (Coefficient::Exact(a), f) | (f, Coefficient::Exact(a)) if a.is_empty() => f.clone(),
            _ => panic!("mixed exact and float coefficients"),
        }
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => {
                let mut out: BTreeMap<Vec<Exponent>, Ratio<i64>> = BTreeMap::new();
                for (ka, va) in a {
                    for (kb, vb) in b {
                        let k: Vec<Exponent> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                        let e = out.entry(k).or_insert_with(Ratio::zero);
                        *e += va * vb;
                    }
                }
                out.retain(|_, v| !v.is_zero());
                Coefficient::Exact(out)
            }
            (Coefficient::Float(a), Coefficient::Float(b)) => Coefficient::Float(a * b),
            (Coefficient::Exact(a), _) | (_, Coefficient::Exact(a)) if a.is_empty() => Coefficient::zero_exact(),
            _ => panic!("mixed exact and float coefficients"),
        }
    }
}

/// An element of `ℂ[L_n]`: a finitely supported combination of based loops
/// of one length. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopVector {
    length: usize,
    terms: BTreeMap<Path, Coefficient>,
}

impl LoopVector {
    pub fn zero(length: usize) -> Self {
        LoopVector { length, terms: BTreeMap::new() }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn terms(&self) -> &BTreeMap<Path, Coefficient> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, l: &Path) -> Option<&Coefficient> {
        self.terms.get(l)
    }

    /// Adds `c · l`.
    pub fn add_term(&mut self, l: Path, c: Coefficient) {
        assert_eq!(l.len(), self.length, "loop length does not match the vector");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&l) {
            Some(old) => {
                let sum = old.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&l);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(l, c);
            }
        }
    }

    pub fn add(&self, other: &LoopVector) -> LoopVector {
        assert_eq!(self.length, other.length, "adding loop vectors of different lengths");
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Coefficient) -> LoopVector {
        let mut out = LoopVector::zero(self.length);
        for (l, x) in &self.terms {
            out.add_term(l.clone(), x.mul(c));
        }
        out
    }

    /// Same support and coefficients, compared with [`Coefficient::approx_eq`].
    pub fn approx_eq(&self, other: &LoopVector, ctx: &Context) -> bool {
        self.length == other.length
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|(l, c)| other.terms.get(l).is_some_and(|d| c.approx_eq(d, ctx)))
    }

    /// `(coefficient, edge labels)` pairs in loop order.
    pub fn serialize(&self, g: &TruncatedGraph) -> Vec<(String, Vec<String>)> {
        self.terms
            .iter()
            .map(|(l, c)| (c.text(g.context()), l.edges.iter().map(|&e| g.edge(e).label.clone()).collect()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraError {
    Graph(GraphError),
    IndexOutOfRange { op: &'static str, index: usize, length: usize },
    LengthMismatch { left: usize, right: usize },
    MissingConjugate { edge: String },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::Graph(e) => write!(f, "{e}"),
            AlgebraError::IndexOutOfRange { op, index, length } => {
                write!(f, "{op} index {index} out of range for loops of length {length}")
            }
            AlgebraError::LengthMismatch { left, right } => write!(f, "loop lengths {left} and {right} differ"),
            AlgebraError::MissingConjugate { edge } => write!(f, "edge {edge} has no conjugate"),
        }
    }
}

impl core::error::Error for AlgebraError {}

impl From<GraphError> for AlgebraError {
    fn from(e: GraphError) -> Self {
        AlgebraError::Graph(e)
    }
}

/// The eigenvalues of `Δ(l) = w(l) l` on `ℂ[L_n]` with multiplicities,
/// in increasing order of value.
#[derive(Debug, Clone)]
pub struct ModularSpectrum {
    pub length: usize,
    pub eigenvalues: Vec<(Weight, usize)>,
}

impl ModularSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|(_, m)| m).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.eigenvalues.iter().all(|(w, _)| w.is_identity())
    }
}

/// Outcome of one relation family at one loop length.
#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub length: usize,
    pub cases: usize,
    /// First counterexample, if any.
    pub failure: Option<String>,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// The loop algebra of a window. Exact when every edge weight is exact.
#[derive(Debug, Clone)]
pub struct LoopAlgebra<'g> {
    graph: &'g TruncatedGraph,
    exact: bool,
    sqrt_weight: Vec<Coefficient>,
}

impl<'g> LoopAlgebra<'g> {
    pub fn new(graph: &'g TruncatedGraph) -> Self {
        let exact = graph.edges().iter().all(|e| e.weight.is_exact());
        let sqrt_weight = graph
            .edges()
            .iter()
            .map(|e| {
                let s = e.weight.sqrt();
                Coefficient::from_weight(&if exact { s } else { s.to_float() })
            })
            .collect();
        LoopAlgebra { graph, exact, sqrt_weight }
    }

    pub fn graph(&self) -> &TruncatedGraph {
        self.graph
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    fn ctx(&self) -> &Context {
        self.graph.context()
    }

    pub fn one(&self) -> Coefficient {
        self.weight_coefficient(&Weight::one(self.ctx()))
    }

    pub fn zero(&self) -> Coefficient {
        if self.exact {
            Coefficient::zero_exact()
        } else {
            Coefficient::Float(Complex64::zero())
        }
    }

    pub fn weight_coefficient(&self, w: &Weight) -> Coefficient {
        if self.exact {
            Coefficient::from_weight(w)
        } else {
            Coefficient::from_weight(&w.to_float())
        }
    }

    pub fn basis(&self, l: &Path) -> LoopVector {
        let mut v = LoopVector::zero(l.len());
        v.add_term(l.clone(), self.one());
        v
    }

    /// The based loops of length `n`.
    pub fn loops(&self, n: usize) -> Result<Vec<Path>, AlgebraError> {
        Ok(self.graph.loops(n)?)
    }

    /// `Σ_{s(e) = x} w(e)`, kept symbolic in exact mode.
    pub fn local_delta(&self, x: usize) -> Coefficient {
        self.graph
            .out(x)
            .iter()
            .fold(self.zero(), |acc, &e| acc.add(&self.weight_coefficient(&self.graph.edge(e).weight)))
    }

    fn conjugate(&self, e: usize) -> Result<usize, AlgebraError> {
        self.graph
            .conjugate(e)
            .ok_or_else(|| AlgebraError::MissingConjugate { edge: self.graph.edge(e).label.clone() })
    }

    pub fn cup(&self, v: &LoopVector, i: usize) -> Result<LoopVector, AlgebraError> {
        let n = v.length;
        if i > n {
            return Err(AlgebraError::IndexOutOfRange { op: "cup", index: i, length: n });
        }
        let mut out = LoopVector::zero(n + 2);
        for (l, c) in &v.terms {
            let x = if i == 0 { self.graph.basepoint() } else { self.graph.edge(l.edges[i - 1]).target };
            self.graph.require_interior(x)?;
            for &e in self.graph.out(x) {
                let mut edges = Vec::with_capacity(n + 2);
                edges.extend_from_slice(&l.edges[..i]);
                edges.push(e);
                edges.push(self.conjugate(e)?);
                edges.extend_from_slice(&l.edges[i..]);
                out.add_term(Path::new(edges), c.mul(&self.sqrt_weight[e]));
            }
        }
        Ok(out)
    }

    pub fn cap(&self, v: &LoopVector, i: usize) -> Result<LoopVector, AlgebraError> {
        let n = v.length;
        if n < 2 || i == 0 || i >= n {
            return Err(AlgebraError::IndexOutOfRange { op: "cap", index: i, length: n });
        }
        let mut out = LoopVector::zero(n - 2);
        for (l, c) in &v.terms {
            let (a, b) = (l.edges[i - 1], l.edges[i]);
            if self.graph.conjugate(a) == Some(b) {
                let mut edges = Vec::with_capacity(n - 2);
                edges.extend_from_slice(&l.edges[..i - 1]);
                edges.extend_from_slice(&l.edges[i + 1..]);
                out.add_term(Path::new(edges), c.mul(&self.sqrt_weight[a]));
            }
        }
        Ok(out)
    }

    /// `j(c l) = c̄ w(l̄)^{1/2} l̄`, where `l̄` runs the conjugate edges backwards.
    pub fn star(&self, v: &LoopVector) -> Result<LoopVector, AlgebraError> {
        let mut out = LoopVector::zero(v.length);
        for (l, c) in &v.terms {
            let mut rev = Vec::with_capacity(l.len());
            let mut factor = self.one();
            for &e in l.edges.iter().rev() {
                let ce = self.conjugate(e)?;
                factor = factor.mul(&self.sqrt_weight[ce]);
                rev.push(ce);
            }
            out.add_term(Path::new(rev), c.conj().mul(&factor));
        }
        Ok(out)
    }

    pub fn concat(&self, u: &LoopVector, v: &LoopVector) -> LoopVector {
        let mut out = LoopVector::zero(u.length + v.length);
        for (a, x) in &u.terms {
            for (b, y) in &v.terms {
                out.add_term(a.concat(b), x.mul(y));
            }
        }
        out
    }

    /// Caps at the middle of a loop word until it is empty; the coefficient of
    /// the empty loop.
    fn close(&self, mut w: LoopVector) -> Result<Coefficient, AlgebraError> {
        let n = w.length / 2;
        for k in (1..=n).rev() {
            w = self.cap(&w, k)?;
        }
        Ok(w.terms.get(&Path::empty()).cloned().unwrap_or_else(|| self.zero()))
    }

    /// Left: `f · j(g)` closed up; right: `j(g) · f` closed up.
    pub fn inner(&self, f: &LoopVector, g: &LoopVector, side: Side) -> Result<Coefficient, AlgebraError> {
        if f.length != g.length {
            return Err(AlgebraError::LengthMismatch { left: f.length, right: g.length });
        }
        let sg = self.star(g)?;
        let word = match side {
            Side::Left => self.concat(f, &sg),
            Side::Right => self.concat(&sg, f),
        };
        self.close(word)
    }

    /// `Δ(l) = w(l) l`.
    pub fn delta_op(&self, v: &LoopVector) -> LoopVector {
        let mut out = LoopVector::zero(v.length);
        for (l, c) in &v.terms {
            out.add_term(l.clone(), c.mul(&self.weight_coefficient(&self.graph.path_weight(l))));
        }
        out
    }

    pub fn spectrum(&self, n: usize) -> Result<ModularSpectrum, AlgebraError> {
        let mut eigen: Vec<(Weight, usize)> = Vec::new();
        for l in self.loops(n)? {
            let w = self.graph.path_weight(&l);
            match eigen.iter_mut().find(|(x, _)| x.loosely_eq(&w)) {
                Some(slot) => slot.1 += 1,
                None => eigen.push((w, 1)),
            }
        }
        eigen.sort_by(|a, b| a.0.cmp_value(&b.0));
        Ok(ModularSpectrum { length: n, eigenvalues: eigen })
    }

    /// Checks `left⟨f, g⟩ = right⟨g, Δf⟩` for every pair of basis loops of length `n`.
    pub fn check_modular_relation(&self, n: usize) -> Result<RelationCheck, AlgebraError> {
        let basis: Vec<LoopVector> = self.loops(n)?.iter().map(|l| self.basis(l)).collect();
        let mut check = RelationCheck { relation: "modular", length: n, cases: 0, failure: None };
        for f in &basis {
            let df = self.delta_op(f);
            for g in &basis {
                check.cases += 1;
                let lhs = self.inner(f, g, Side::Left)?;
                let rhs = self.inner(g, &df, Side::Right)?;
                if check.failure.is_none() && !lhs.approx_eq(&rhs, self.ctx()) {
                    check.failure = Some(alloc::format!(
                        "{} vs {}: left {} != right {}",
                        self.describe(f),
                        self.describe(g),
                        lhs.text(self.ctx()),
                        rhs.text(self.ctx())
                    ));
                }
            }
        }
        Ok(check)
    }

    fn describe(&self, v: &LoopVector) -> String {
        let parts: Vec<String> = v
            .terms
            .keys()
            .map(|l| {
                let labels: Vec<&str> = l.edges.iter().map(|&e| self.graph.edge(e).label.as_str()).collect();
                alloc::format!("({})", labels.join(","))
            })
            .collect();
        parts.join("+")
    }

    /// The relation suite on basis loops of length `<= max_n`: delooping, the
    /// two zig-zags, star involution and anti-multiplicativity, and, for
    /// lengths `<= gram_max_n`, the Gram matrices and the modular relation.
    pub fn check_relations(&self, max_n: usize, gram_max_n: usize) -> Result<Vec<RelationCheck>, AlgebraError> {
        let ctx = self.ctx().clone();
        let delta = self.graph.delta();
        let mut out = Vec::new();
        let mut by_length: Vec<Vec<Path>> = Vec::new();
        for n in 0..=max_n {
            by_length.push(self.loops(n)?);
        }
        for n in 0..=max_n {
            let basis: Vec<LoopVector> = by_length[n].iter().map(|l| self.basis(l)).collect();
            let mut checks = [
                RelationCheck { relation: "delooping", length: n, cases: 0, failure: None },
                RelationCheck { relation: "zigzag-left", length: n, cases: 0, failure: None },
                RelationCheck { relation: "zigzag-right", length: n, cases: 0, failure: None },
                RelationCheck { relation: "star-involution", length: n, cases: 0, failure: None },
            ];
            let record = |c: &mut RelationCheck, ok: bool, what: &dyn Fn() -> String| {
                c.cases += 1;
                if !ok && c.failure.is_none() {
                    c.failure = Some(what());
                }
            };
            for (l, v) in by_length[n].iter().zip(&basis) {
                for i in 0..=n {
                    let x = if i == 0 { self.graph.basepoint() } else { self.graph.edge(l.edges[i - 1]).target };
                    let local = self.local_delta(x);
                    let fair = rel_close(local.value(&ctx).re, delta, ctx.tolerance());
                    let cup = self.cup(v, i)?;
                    let got = self.cap(&cup, i + 1)?;
                    let ok = fair && got.approx_eq(&v.scale(&local), &ctx);
                    record(&mut checks[0], ok, &|| alloc::format!("cap_{} cup_{} on {}", i + 1, i, self.describe(v)));
                    if i >= 1 {
                        let ok = self.cap(&cup, i)?.approx_eq(v, &ctx);
                        record(&mut checks[1], ok, &|| alloc::format!("cap_{i} cup_{i} on {}", self.describe(v)));
                    }
                    if i < n {
                        let ok = self.cap(&cup, i + 2)?.approx_eq(v, &ctx);
                        record(&mut checks[2], ok, &|| alloc::format!("cap_{} cup_{i} on {}", i + 2, self.describe(v)));
                    }
                }
                let ss = self.star(&self.star(v)?)?;
                record(&mut checks[3], ss.approx_eq(v, &ctx), &|| alloc::format!("star star {}", self.describe(v)));
            }
            out.extend(checks);

            if n <= 4 {
                let mut mono = RelationCheck { relation: "star-monoidal", length: n, cases: 0, failure: None };
                for a in 0..=n {
                    for u in &by_length[a] {
                        for w in &by_length[n - a] {
                            let (u, w) = (self.basis(u), self.basis(w));
                            let lhs = self.star(&self.concat(&u, &w))?;
                            let rhs = self.concat(&self.star(&w)?, &self.star(&u)?);
                            mono.cases += 1;
                            if !lhs.approx_eq(&rhs, &ctx) && mono.failure.is_none() {
                                mono.failure = Some(alloc::format!("{} * {}", self.describe(&u), self.describe(&w)));
                            }
                        }
                    }
                }
                out.push(mono);
            }

            if n <= gram_max_n {
                let mut left = RelationCheck { relation: "gram-left", length: n, cases: 0, failure: None };
                let mut right = RelationCheck { relation: "gram-right", length: n, cases: 0, failure: None };
                for (l, f) in by_length[n].iter().zip(&basis) {
                    let inv_w = self.weight_coefficient(&self.graph.path_weight(l).inv());
                    for (m, g) in by_length[n].iter().zip(&basis) {
                        let (one, zero) = (self.one(), self.zero());
                        let expect_left = if l == m { &one } else { &zero };
                        let expect_right = if l == m { &inv_w } else { &zero };
                        left.cases += 1;
                        right.cases += 1;
                        if !self.inner(f, g, Side::Left)?.approx_eq(expect_left, &ctx) && left.failure.is_none() {
                            left.failure = Some(alloc::format!("{} vs {}", self.describe(f), self.describe(g)));
                        }
                        if !self.inner(f, g, Side::Right)?.approx_eq(expect_right, &ctx) && right.failure.is_none() {
                            right.failure = Some(alloc::format!("{} vs {}", self.describe(f), self.describe(g)));
                        }
                    }
                }
                out.push(left);
                out.push(right);
                out.push(self.check_modular_relation(n)?);
            }
        }
        Ok(out)
    }
}

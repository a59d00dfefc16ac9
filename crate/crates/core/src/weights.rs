//! Multiplicative weights.
//!
//! A [`Weight`] is an element of a finitely generated subgroup of the positive
//! reals. Exact weights are monomials `g1^r1 * ... * gk^rk` with rational
//! exponents over the generators declared in a [`GeneratorContext`]; float
//! weights are plain positive doubles compared with the context tolerance.
//!
//! Exact arithmetic assumes the declared generator values are multiplicatively
//! independent: `a^1 * b^-1` is never treated as the identity, whatever the
//! numeric values of `a` and `b`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Deref, Mul};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Rational exponent of a generator.
pub type Exponent = Ratio<i64>;

/// Default relative tolerance for float comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightError {
    MismatchedContexts,
    DuplicateGenerator(String),
    InvalidGeneratorValue { name: String, value: f64 },
    InvalidTolerance(f64),
    UnknownGenerator(String),
    NonPositive(f64),
    ExponentLength { expected: usize, found: usize },
    Parse { text: String, reason: String },
}

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightError::MismatchedContexts => write!(f, "weights belong to different generator contexts"),
            WeightError::DuplicateGenerator(name) => write!(f, "generator `{name}` declared twice"),
            WeightError::InvalidGeneratorValue { name, value } => {
                write!(f, "generator `{name}` has non-positive or non-finite value {value}")
            }
            WeightError::InvalidTolerance(t) => write!(f, "tolerance must be positive and finite, got {t}"),
            WeightError::UnknownGenerator(name) => write!(f, "unknown generator `{name}`"),
            WeightError::NonPositive(v) => write!(f, "weights must be positive and finite, got {v}"),
            WeightError::ExponentLength { expected, found } => {
                write!(f, "expected {expected} exponents, found {found}")
            }
            WeightError::Parse { text, reason } => write!(f, "cannot parse weight `{text}`: {reason}"),
        }
    }
}

impl core::error::Error for WeightError {}

/// The ambient generator set and comparison tolerance shared by a family of weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorContext {
    generators: Vec<(String, f64)>,
    tolerance: f64,
}

impl GeneratorContext {
    pub fn new<N: Into<String>>(generators: impl IntoIterator<Item = (N, f64)>) -> Result<Self, WeightError> {
        let mut out: Vec<(String, f64)> = Vec::new();
        for (name, value) in generators {
            let name = name.into();
            if !is_generator_name(&name) {
                return Err(WeightError::Parse { text: name, reason: "invalid generator name".to_string() });
            }
            if !(value.is_finite() && value > 0.0) {
                return Err(WeightError::InvalidGeneratorValue { name, value });
            }
            if out.iter().any(|(n, _)| *n == name) {
                return Err(WeightError::DuplicateGenerator(name));
            }
            out.push((name, value));
        }
        Ok(GeneratorContext { generators: out, tolerance: DEFAULT_TOLERANCE })
    }

    /// A context with no generators: only the identity is exact.
    pub fn empty() -> Self {
        GeneratorContext { generators: Vec::new(), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, WeightError> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(WeightError::InvalidTolerance(tolerance));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn generators(&self) -> &[(String, f64)] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|(n, _)| n == name)
    }

    pub fn into_shared(self) -> Context {
        Context(Arc::new(self))
    }
}

fn is_generator_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Shared handle to a [`GeneratorContext`]. Two handles are equal when they
/// point to the same context or to structurally identical ones.
#[derive(Debug, Clone)]
pub struct Context(Arc<GeneratorContext>);

impl Context {
    pub fn empty() -> Self {
        GeneratorContext::empty().into_shared()
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Deref for Context {
    type Target = GeneratorContext;
    fn deref(&self) -> &GeneratorContext {
        &self.0
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Exact { exponents: Vec<Exponent>, value: f64 },
    Float(f64),
}

/// A positive real weight, exact (monomial) or float.
#[derive(Debug, Clone)]
pub struct Weight {
    ctx: Context,
    repr: Repr,
}

fn monomial_value(ctx: &GeneratorContext, exponents: &[Exponent]) -> f64 {
    let log: f64 = ctx
        .generators
        .iter()
        .zip(exponents)
        .filter(|(_, e)| !e.is_zero())
        .map(|((_, v), e)| libm::log(*v) * (*e.numer() as f64) / (*e.denom() as f64))
        .sum();
    libm::exp(log)
}

impl Weight {
    pub fn one(ctx: &Context) -> Weight {
        Weight { ctx: ctx.clone(), repr: Repr::Exact { exponents: alloc::vec![Exponent::zero(); ctx.rank()], value: 1.0 } }
    }

    pub fn generator(ctx: &Context, name: &str) -> Result<Weight, WeightError> {
        let idx = ctx.index_of(name).ok_or_else(|| WeightError::UnknownGenerator(name.to_string()))?;
        let mut exponents = alloc::vec![Exponent::zero(); ctx.rank()];
        exponents[idx] = Exponent::one();
        Weight::monomial(ctx, exponents)
    }

    pub fn monomial(ctx: &Context, exponents: Vec<Exponent>) -> Result<Weight, WeightError> {
        if exponents.len() != ctx.rank() {
            return Err(WeightError::ExponentLength { expected: ctx.rank(), found: exponents.len() });
        }
        let value = monomial_value(ctx, &exponents);
        Ok(Weight { ctx: ctx.clone(), repr: Repr::Exact { exponents, value } })
    }

    /// Monomial with integer exponents.
    pub fn from_powers(ctx: &Context, powers: &[i64]) -> Result<Weight, WeightError> {
        Weight::monomial(ctx, powers.iter().map(|&p| Exponent::from_integer(p)).collect())
    }

    pub fn float(ctx: &Context, value: f64) -> Result<Weight, WeightError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(WeightError::NonPositive(value));
        }
        Ok(Weight { ctx: ctx.clone(), repr: Repr::Float(value) })
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn value(&self) -> f64 {
        match &self.repr {
            Repr::Exact { value, .. } => *value,
            Repr::Float(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact { .. })
    }

    pub fn exponents(&self) -> Option<&[Exponent]> {
        match &self.repr {
            Repr::Exact { exponents, .. } => Some(exponents),
            Repr::Float(_) => None,
        }
    }

    /// The same weight in float mode.
    pub fn to_float(&self) -> Weight {
        Weight { ctx: self.ctx.clone(), repr: Repr::Float(self.value()) }
    }

    pub fn is_identity(&self) -> bool {
        match &self.repr {
            Repr::Exact { exponents, .. } => exponents.iter().all(Zero::is_zero),
            Repr::Float(v) => rel_close(*v, 1.0, self.ctx.tolerance),
        }
    }

    pub fn checked_mul(&self, other: &Weight) -> Result<Weight, WeightError> {
        if self.ctx != other.ctx {
            return Err(WeightError::MismatchedContexts);
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Exact { exponents: a, .. }, Repr::Exact { exponents: b, .. }) => {
                let exponents: Vec<Exponent> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let value = monomial_value(&self.ctx, &exponents);
                Repr::Exact { exponents, value }
            }
            _ => Repr::Float(self.value() * other.value()),
        };
        Ok(Weight { ctx: self.ctx.clone(), repr })
    }

    pub fn inv(&self) -> Weight {
        let repr = match &self.repr {
            Repr::Exact { exponents, value } => {
                Repr::Exact { exponents: exponents.iter().map(|e| -e).collect(), value: 1.0 / value }
            }
            Repr::Float(v) => Repr::Float(1.0 / v),
        };
        Weight { ctx: self.ctx.clone(), repr }
    }

    pub fn checked_div(&self, other: &Weight) -> Result<Weight, WeightError> {
        self.checked_mul(&other.inv())
    }

    /// Rational power; exact weights stay exact.
    pub fn pow(&self, p: Exponent) -> Weight {
        let repr = match &self.repr {
            Repr::Exact { exponents, .. } => {
                let exponents: Vec<Exponent> = exponents.iter().map(|e| e * p).collect();
                let value = monomial_value(&self.ctx, &exponents);
                Repr::Exact { exponents, value }
            }
            Repr::Float(v) => Repr::Float(libm::pow(*v, *p.numer() as f64 / *p.denom() as f64)),
        };
        Weight { ctx: self.ctx.clone(), repr }
    }

    pub fn sqrt(&self) -> Weight {
        match &self.repr {
            Repr::Exact { .. } => self.pow(Exponent::new(1, 2)),
            Repr::Float(v) => Weight { ctx: self.ctx.clone(), repr: Repr::Float(libm::sqrt(*v)) },
        }
    }

    /// Exact exponent comparison when both weights are exact, relative
    /// tolerance on values otherwise.
    pub fn weight_eq(&self, other: &Weight) -> Result<bool, WeightError> {
        if self.ctx != other.ctx {
            return Err(WeightError::MismatchedContexts);
        }
        Ok(self.same_as(other))
    }

    fn same_as(&self, other: &Weight) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Exact { exponents: a, .. }, Repr::Exact { exponents: b, .. }) => a == b,
            _ => rel_close(self.value(), other.value(), self.ctx.tolerance),
        }
    }

    /// Comparison that also works across contexts: exact when the contexts
    /// agree and both weights are exact, by value with the looser of the two
    /// tolerances otherwise.
    pub fn loosely_eq(&self, other: &Weight) -> bool {
        if self.ctx == other.ctx {
            return self.same_as(other);
        }
        let tol = self.ctx.tolerance.max(other.ctx.tolerance);
        rel_close(self.value(), other.value(), tol)
    }

    /// Total order by value, then by exponents; used for deterministic output.
    pub fn cmp_value(&self, other: &Weight) -> Ordering {
        self.value()
            .partial_cmp(&other.value())
            .unwrap_or(Ordering::Equal)
            .then_with(|| match (self.exponents(), other.exponents()) {
                (Some(a), Some(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }

    /// Numeric rendering (17 significant digits).
    pub fn float_text(&self) -> String {
        format_float(self.value())
    }

    /// Text form without blanks, usable inside identifiers.
    pub fn compact_text(&self) -> String {
        self.to_string().chars().filter(|c| !c.is_whitespace()).collect()
    }

    /// Parses the text form: `1`, `q`, `q^2`, `a^1/2 * b^-1`, or a decimal float.
    pub fn parse(ctx: &Context, text: &str) -> Result<Weight, WeightError> {
        let trimmed = text.trim();
        let err = |reason: &str| WeightError::Parse { text: text.to_string(), reason: reason.to_string() };
        if trimmed.is_empty() {
            return Err(err("empty weight"));
        }
        if trimmed == "1" {
            return Ok(Weight::one(ctx));
        }
        let first = trimmed.chars().next().unwrap_or(' ');
        if first.is_ascii_digit() || first == '.' || first == '+' || first == '-' {
            let v: f64 = trimmed.parse().map_err(|_| err("not a decimal number"))?;
            return Weight::float(ctx, v);
        }
        let mut exponents = alloc::vec![Exponent::zero(); ctx.rank()];
        for factor in trimmed.split('*') {
            let factor = factor.trim();
            let factor = factor.replace(' ', "");
            if factor == "1" {
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n, parse_exponent(e).ok_or_else(|| err("malformed exponent"))?),
                None => (factor.as_str(), Exponent::one()),
            };
            if name.is_empty() {
                return Err(err("missing generator name"));
            }
            let idx = ctx.index_of(name).ok_or_else(|| WeightError::UnknownGenerator(name.to_string()))?;
            exponents[idx] += exp;
        }
        Weight::monomial(ctx, exponents)
    }
}

fn parse_exponent(text: &str) -> Option<Exponent> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().ok()?;
            let d: i64 = d.parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Exponent::new(n, d))
        }
        None => text.parse::<i64>().ok().map(Exponent::from_integer),
    }
}

pub(crate) fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Decimal rendering with 17 significant digits.
pub fn format_float(v: f64) -> String {
    alloc::format!("{v:.16e}")
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Float(v) => f.write_str(&format_float(*v)),
            Repr::Exact { exponents, .. } => {
                let mut first = true;
                for ((name, _), e) in self.ctx.generators.iter().zip(exponents) {
                    if e.is_zero() {
                        continue;
                    }
                    if !first {
                        f.write_str(" * ")?;
                    }
                    first = false;
                    if e.is_one() {
                        write!(f, "{name}")?;
                    } else if e.is_integer() {
                        write!(f, "{name}^{}", e.numer())?;
                    } else {
                        write!(f, "{name}^{}/{}", e.numer(), e.denom())?;
                    }
                }
                if first {
                    f.write_str("1")?;
                }
                Ok(())
            }
        }
    }
}

impl Mul for &Weight {
    type Output = Weight;
    /// Panics when the operands come from different contexts; use
    /// [`weight_mul`] for a fallible product.
    fn mul(self, rhs: &Weight) -> Weight {
        self.checked_mul(rhs).expect("weights from different generator contexts")
    }
}

pub fn weight_mul(a: &Weight, b: &Weight) -> Result<Weight, WeightError> {
    a.checked_mul(b)
}

pub fn weight_sqrt(w: &Weight) -> Weight {
    w.sqrt()
}

pub fn weight_eq(a: &Weight, b: &Weight) -> Result<bool, WeightError> {
    a.weight_eq(b)
}

/// A map keyed by weights that honours [`Weight::weight_eq`].
///
/// Exact weights are keyed by exponent vector. Float weights are bucketed by
/// `floor(ln(value) / tolerance)`; lookups also probe the two adjacent buckets so
/// values straddling a bucket edge still merge.
#[derive(Debug, Clone)]
pub struct WeightMap<T> {
    exact: BTreeMap<Vec<Exponent>, (Weight, T)>,
    float: BTreeMap<i64, Vec<(Weight, T)>>,
    tolerance: f64,
}

impl<T> WeightMap<T> {
    pub fn new(tolerance: f64) -> Self {
        WeightMap { exact: BTreeMap::new(), float: BTreeMap::new(), tolerance }
    }

    fn bucket(&self, w: &Weight) -> i64 {
        libm::floor(libm::log(w.value()) / self.tolerance) as i64
    }

    pub fn get(&self, w: &Weight) -> Option<&T> {
        match w.exponents() {
            Some(e) => self.exact.get(e).map(|(_, t)| t),
            None => {
                let b = self.bucket(w);
                (b - 1..=b + 1)
                    .filter_map(|k| self.float.get(&k))
                    .flatten()
                    .find(|(k, _)| rel_close(k.value(), w.value(), self.tolerance))
                    .map(|(_, t)| t)
            }
        }
    }

    /// Inserts unless an equal key is present; returns the stored value.
    pub fn get_or_insert(&mut self, w: &Weight, value: T) -> &T {
        if let Some(e) = w.exponents() {
            return &self.exact.entry(e.to_vec()).or_insert_with(|| (w.clone(), value)).1;
        }
        let b = self.bucket(w);
        let mut found = None;
        for k in b - 1..=b + 1 {
            if let Some(list) = self.float.get(&k) {
                if let Some(i) = list.iter().position(|(key, _)| rel_close(key.value(), w.value(), self.tolerance)) {
                    found = Some((k, i));
                    break;
                }
            }
        }
        let (k, i) = match found {
            Some(hit) => hit,
            None => {
                let list = self.float.entry(b).or_default();
                list.push((w.clone(), value));
                (b, list.len() - 1)
            }
        };
        &self.float[&k][i].1
    }

    pub fn len(&self) -> usize {
        self.exact.len() + self.float.values().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reduces a list of weights to a generating set of the subgroup they generate.
///
/// Exact weights go through a Hermite normal form of their (integer-scaled)
/// exponent vectors, so the result is a basis with positive leading exponents.
/// Float weights are deduplicated up to tolerance and inversion, keeping the
/// representative that is at least 1. Identity weights are dropped.
pub fn reduce_generators(ctx: &Context, weights: &[Weight]) -> Vec<Weight> {
    let exact: Vec<&[Exponent]> = weights.iter().filter_map(|w| w.exponents()).collect();
    let mut out = Vec::new();
    if !exact.is_empty() {
        let scale = exact
            .iter()
            .flat_map(|e| e.iter())
            .fold(1i64, |acc, e| acc.lcm(e.denom()));
        let rows: Vec<Vec<i64>> = exact
            .iter()
            .map(|e| e.iter().map(|x| (x * scale).to_integer()).collect())
            .collect();
        for row in hermite_basis(rows) {
            let exps = row.iter().map(|&x| Exponent::new(x, scale)).collect();
            out.push(Weight::monomial(ctx, exps).expect("exponent vector matches context rank"));
        }
    }
    let mut floats: Vec<Weight> = Vec::new();
    for w in weights.iter().filter(|w| !w.is_exact()) {
        let rep = if w.value() < 1.0 { w.inv() } else { w.clone() };
        if rep.is_identity() {
            continue;
        }
        if !floats.iter().any(|f| rel_close(f.value(), rep.value(), ctx.tolerance)) {
            floats.push(rep);
        }
    }
    floats.sort_by(|a, b| a.cmp_value(b));
    out.extend(floats);
    out
}

/// Row-style Hermite normal form over the integers; returns the nonzero rows.
///
/// The rows span the same lattice as the input, are in echelon form, have
/// positive pivots, and entries above each pivot are reduced into `[0, pivot)`.
pub fn hermite_basis(rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<i128>> = rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row >= m.len() {
            break;
        }
        // Euclid on column c among rows pivot_row.. until one nonzero remains.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..m.len() {
                if m[r][c] != 0 && best.is_none_or(|b| m[r][c].abs() < m[b][c].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if m[r][c] != 0 {
                    let q = m[r][c].div_euclid(m[pivot_row][c]);
                    let pivot = m[pivot_row].clone();
                    for (x, p) in m[r][c..].iter_mut().zip(&pivot[c..]) {
                        *x -= q * p;
                    }
                    if m[r][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][c] == 0 {
            continue;
        }
        if m[pivot_row][c] < 0 {
            for x in &mut m[pivot_row][c..] {
                *x = -*x;
            }
        }
        let p = m[pivot_row][c];
        for r in 0..pivot_row {
            let q = m[r][c].div_euclid(p);
            if q != 0 {
                let pivot = m[pivot_row].clone();
                for (x, p) in m[r][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= q * p;
                }
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m.into_iter()
        .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("lattice entry overflow")).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx_q() -> Context {
        GeneratorContext::new([("q", 2.0)]).unwrap().into_shared()
    }

    fn ctx_ab() -> Context {
        GeneratorContext::new([("a", 2.0), ("b", 3.0)]).unwrap().into_shared()
    }

    #[test]
    fn half_powers_add_to_q() {
        let ctx = ctx_q();
        let h = Weight::parse(&ctx, "q^1/2").unwrap();
        let q = Weight::generator(&ctx, "q").unwrap();
        assert!((&h * &h).weight_eq(&q).unwrap());
    }

    #[test]
    fn inverse_pair_is_identity() {
        let ctx = ctx_ab();
        let x = Weight::from_powers(&ctx, &[1, -1]).unwrap();
        let y = Weight::from_powers(&ctx, &[-1, 1]).unwrap();
        assert!((&x * &y).is_identity());
        assert_eq!((&x * &y).to_string(), "1");
    }

    #[test]
    fn float_identity_product() {
        let ctx = Context::empty();
        let p = &Weight::float(&ctx, 2.0).unwrap() * &Weight::float(&ctx, 0.5).unwrap();
        assert!(p.weight_eq(&Weight::float(&ctx, 1.0).unwrap()).unwrap());
        assert!(!p.is_exact());
    }

    #[test]
    fn sqrt_examples() {
        let ctx = ctx_q();
        let q2 = Weight::from_powers(&ctx, &[2]).unwrap();
        assert_eq!(q2.sqrt().to_string(), "q");
        let ab = ctx_ab();
        let w = Weight::from_powers(&ab, &[1, -1]).unwrap();
        assert_eq!(w.sqrt().to_string(), "a^1/2 * b^-1/2");
        let f = Weight::float(&ab, 4.0).unwrap().sqrt();
        assert!((f.value() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn equality_examples() {
        let ctx = ctx_q();
        let q = Weight::generator(&ctx, "q").unwrap();
        assert!(q.weight_eq(&q.clone()).unwrap());
        assert!(!q.weight_eq(&Weight::from_powers(&ctx, &[2]).unwrap()).unwrap());
        let loose = GeneratorContext::empty().with_tolerance(1e-6).unwrap().into_shared();
        let a = Weight::float(&loose, 1.0000000001).unwrap();
        let b = Weight::float(&loose, 1.0).unwrap();
        assert!(a.weight_eq(&b).unwrap());
    }

    #[test]
    fn mismatched_contexts_are_rejected() {
        let q = Weight::generator(&ctx_q(), "q").unwrap();
        let a = Weight::generator(&ctx_ab(), "a").unwrap();
        assert_eq!(weight_mul(&q, &a).unwrap_err(), WeightError::MismatchedContexts);
        assert_eq!(weight_eq(&q, &a).unwrap_err(), WeightError::MismatchedContexts);
    }

    #[test]
    fn structurally_equal_contexts_are_compatible() {
        let q1 = Weight::generator(&ctx_q(), "q").unwrap();
        let q2 = Weight::generator(&ctx_q(), "q").unwrap();
        assert!(q1.weight_eq(&q2).unwrap());
    }

    #[test]
    fn text_forms() {
        let ctx = ctx_ab();
        for text in ["1", "a", "a^-1", "a^1/2 * b^-3/4", "a^2 * b"] {
            assert_eq!(Weight::parse(&ctx, text).unwrap().to_string(), text);
        }
        assert_eq!(Weight::parse(&ctx, "b * a").unwrap().to_string(), "a * b");
        assert_eq!(Weight::parse(&ctx, "a^2/4").unwrap().to_string(), "a^1/2");
        let f = Weight::parse(&ctx, "2.5000000000000000e0").unwrap();
        assert!(!f.is_exact());
        assert_eq!(f.to_string(), "2.5000000000000000e0");
        assert_eq!(Weight::parse(&ctx, "c").unwrap_err(), WeightError::UnknownGenerator("c".into()));
        assert!(Weight::parse(&ctx, "a^x").is_err());
        assert!(Weight::parse(&ctx, "-1.0").is_err());
        assert!(Weight::parse(&ctx, "").is_err());
    }

    #[test]
    fn bad_contexts() {
        assert!(GeneratorContext::new([("q", 0.0)]).is_err());
        assert!(GeneratorContext::new([("q", 2.0), ("q", 3.0)]).is_err());
        assert!(GeneratorContext::new([("1q", 2.0)]).is_err());
        assert!(GeneratorContext::empty().with_tolerance(-1.0).is_err());
    }

    #[test]
    fn weight_map_merges_float_neighbours() {
        let ctx = Context::empty();
        let mut map = WeightMap::new(1e-9);
        let a = Weight::float(&ctx, 1.5).unwrap();
        let b = Weight::float(&ctx, 1.5 * (1.0 + 1e-12)).unwrap();
        assert_eq!(*map.get_or_insert(&a, 1), 1);
        assert_eq!(*map.get_or_insert(&b, 2), 1);
        assert_eq!(map.len(), 1);
        assert!(map.get(&Weight::float(&ctx, 1.6).unwrap()).is_none());
    }

    #[test]
    fn generator_reduction_examples() {
        let ctx = ctx_ab();
        let ws: Vec<Weight> = [[1, -1], [-1, 1], [2, -2], [0, 0]]
            .iter()
            .map(|p| Weight::from_powers(&ctx, p).unwrap())
            .collect();
        let gens = reduce_generators(&ctx, &ws);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].to_string(), "a * b^-1");

        let ws: Vec<Weight> = [[1, 1], [1, -1], [2, 0], [0, 2], [1, 0]]
            .iter()
            .map(|p| Weight::from_powers(&ctx, p).unwrap())
            .collect();
        let texts: Vec<String> = reduce_generators(&ctx, &ws).iter().map(|w| w.to_string()).collect();
        assert_eq!(texts, ["a", "b"]);

        assert!(reduce_generators(&ctx, &[Weight::one(&ctx)]).is_empty());
    }

    #[test]
    fn generator_reduction_rational_exponents() {
        let ctx = ctx_q();
        let ws = [Weight::parse(&ctx, "q^1/2").unwrap(), Weight::parse(&ctx, "q^1/3").unwrap()];
        let gens = reduce_generators(&ctx, &ws);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].to_string(), "q^1/6");
    }

    #[test]
    fn float_generator_dedup_up_to_inversion() {
        let ctx = Context::empty();
        let ws: Vec<Weight> = [1.5, 1.0 / 1.5, 1.0, 2.0].iter().map(|&v| Weight::float(&ctx, v).unwrap()).collect();
        let gens = reduce_generators(&ctx, &ws);
        let vals: Vec<f64> = gens.iter().map(Weight::value).collect();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] - 1.5).abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12);
    }

    fn gcd_oracle(xs: &[i64]) -> i64 {
        xs.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    /// Solve `target = sum c_i basis_i` over the integers for an echelon basis.
    fn in_echelon_lattice(basis: &[Vec<i64>], target: &[i64]) -> bool {
        let mut t: Vec<i64> = target.to_vec();
        for row in basis {
            let c = row.iter().position(|&x| x != 0).unwrap();
            if t[c] % row[c] != 0 {
                return false;
            }
            let k = t[c] / row[c];
            for (ti, ri) in t.iter_mut().zip(row) {
                *ti -= k * ri;
            }
        }
        t.iter().all(|&x| x == 0)
    }

    proptest! {
        #[test]
        fn group_laws(a in prop::collection::vec(-3i64..=3, 2), b in prop::collection::vec(-3i64..=3, 2),
                      c in prop::collection::vec(-3i64..=3, 2)) {
            let ctx = ctx_ab();
            let (x, y, z) = (Weight::from_powers(&ctx, &a).unwrap(), Weight::from_powers(&ctx, &b).unwrap(),
                             Weight::from_powers(&ctx, &c).unwrap());
            let one = Weight::one(&ctx);
            prop_assert!((&(&x * &y) * &z).weight_eq(&(&x * &(&y * &z))).unwrap());
            prop_assert!((&x * &one).weight_eq(&x).unwrap());
            prop_assert!((&x * &x.inv()).is_identity());
        }

        #[test]
        fn sqrt_consistency(p in -6i64..=6, r in -6i64..=6, d in 1i64..=4) {
            let ctx = ctx_ab();
            let w = Weight::monomial(&ctx, alloc::vec![Exponent::new(p, d), Exponent::new(r, d)]).unwrap();
            let s = w.sqrt();
            prop_assert!((&s * &s).weight_eq(&w).unwrap());
        }

        #[test]
        fn mode_coherence(a in prop::collection::vec(-3i64..=3, 2), b in prop::collection::vec(-3i64..=3, 2)) {
            let ctx = ctx_ab();
            let (x, y) = (Weight::from_powers(&ctx, &a).unwrap(), Weight::from_powers(&ctx, &b).unwrap());
            let exact_then_float = (&x * &y).value();
            let float_then_mul = (&x.to_float() * &y.to_float()).value();
            prop_assert!(rel_close(exact_then_float, float_then_mul, 1e-12));
            let direct = libm::pow(2.0, (a[0] + b[0]) as f64) * libm::pow(3.0, (a[1] + b[1]) as f64);
            prop_assert!(rel_close(exact_then_float, direct, 1e-12));
        }

        #[test]
        fn text_roundtrip(p in -5i64..=5, r in -5i64..=5, d in 1i64..=3, v in 1e-3f64..1e3) {
            let ctx = ctx_ab();
            let w = Weight::monomial(&ctx, alloc::vec![Exponent::new(p, d), Exponent::new(r, d)]).unwrap();
            prop_assert!(Weight::parse(&ctx, &w.to_string()).unwrap().weight_eq(&w).unwrap());
            let f = Weight::float(&ctx, v).unwrap();
            prop_assert_eq!(Weight::parse(&ctx, &f.to_string()).unwrap().value(), v);
        }

        #[test]
        fn hermite_one_dimensional_is_gcd(xs in prop::collection::vec(-30i64..=30, 1..6)) {
            let basis = hermite_basis(xs.iter().map(|&x| alloc::vec![x]).collect());
            let g = gcd_oracle(&xs);
            if g == 0 {
                prop_assert!(basis.is_empty());
            } else {
                prop_assert_eq!(basis, alloc::vec![alloc::vec![g]]);
            }
        }

        #[test]
        fn hermite_spans_inputs(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..6)) {
            let basis = hermite_basis(rows.clone());
            for r in &rows {
                prop_assert!(in_echelon_lattice(&basis, r));
            }
            // Idempotent, and adding the basis to the inputs changes nothing.
            prop_assert_eq!(hermite_basis(basis.clone()), basis.clone());
            let mut more = rows.clone();
            more.extend(basis.iter().cloned());
            prop_assert_eq!(hermite_basis(more), basis);
        }
    }
}

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{ball, DeltaGraph, GraphError};
use crate::weights::rel_close;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Involution,
    ConjugateWeights,
    Fairness,
    Connectivity,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Involution => "involution",
            Check::ConjugateWeights => "conjugate-weights",
            Check::Fairness => "fairness",
            Check::Connectivity => "connectivity",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: Check,
    /// Human-readable descriptions naming the offending vertices or edges.
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub radius: usize,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn outcome(&self, check: Check) -> &CheckOutcome {
        self.checks.iter().find(|c| c.check == check).expect("every check is reported")
    }
}

/// Checks the fair and balanced axioms on the ball of `radius` around the basepoint.
///
/// The involution and conjugate-weight checks run on every edge leaving a ball
/// vertex; fairness runs on vertices at distance `< radius` that the source
/// graph does not mark as boundary; connectivity is checked only for graphs
/// that can list all their vertices.
pub fn validate<G: DeltaGraph>(g: &G, radius: usize) -> Result<ValidationReport, GraphError> {
    let b = ball(g, radius)?;
    let tol = g.context().tolerance();
    let mut involution = Vec::new();
    let mut conj_weights = Vec::new();
    let mut fairness = Vec::new();

    for i in 0..b.vertex_count() {
        let v = b.origin(i);
        let edges = g.out_edges(v)?;
        for e in &edges {
            let Some(cid) = &e.conjugate else {
                involution.push(alloc::format!("edge {} has no conjugate", g.edge_name(&e.id)));
                continue;
            };
            let back = g.out_edges(&e.target)?;
            let Some(c) = back.iter().find(|c| c.id == *cid) else {
                involution.push(alloc::format!(
                    "edge {} is orphaned: conjugate {} not found at {}",
                    g.edge_name(&e.id),
                    g.edge_name(cid),
                    g.vertex_name(&e.target)
                ));
                continue;
            };
            if c.target != *v || c.conjugate.as_ref() != Some(&e.id) {
                involution.push(alloc::format!(
                    "edge {} and its conjugate {} do not form a reversed pair",
                    g.edge_name(&e.id),
                    g.edge_name(cid)
                ));
            }
            let product = e.weight.checked_mul(&c.weight)?;
            if !product.is_identity() {
                conj_weights.push(alloc::format!(
                    "w({}) * w({}) = {} != 1",
                    g.edge_name(&e.id),
                    g.edge_name(cid),
                    product
                ));
            }
        }
        let interior = b.distance(i).is_some_and(|d| d < radius) && !g.is_boundary(v);
        if interior {
            let sum: f64 = edges.iter().map(|e| e.weight.value()).sum();
            if !rel_close(sum, g.delta(), tol) {
                fairness.push(alloc::format!(
                    "vertex {}: outgoing weight sum {} != delta {}",
                    g.vertex_name(v),
                    sum,
                    g.delta()
                ));
            }
        }
    }

    let mut connectivity = Vec::new();
    if let Some(all) = g.vertices() {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([g.basepoint()]);
        seen.insert(g.basepoint());
        while let Some(v) = queue.pop_front() {
            for e in g.out_edges(&v)? {
                if seen.insert(e.target.clone()) {
                    queue.push_back(e.target);
                }
            }
        }
        for v in all.iter().filter(|v| !seen.contains(*v)) {
            connectivity.push(alloc::format!("vertex {} is unreachable from the basepoint", g.vertex_name(v)));
        }
    }

    Ok(ValidationReport {
        radius,
        checks: alloc::vec![
            CheckOutcome { check: Check::Involution, failures: involution },
            CheckOutcome { check: Check::ConjugateWeights, failures: conj_weights },
            CheckOutcome { check: Check::Fairness, failures: fairness },
            CheckOutcome { check: Check::Connectivity, failures: connectivity },
        ],
    })
}

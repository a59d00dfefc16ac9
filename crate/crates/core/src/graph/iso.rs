use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use super::TruncatedGraph;
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoError {
    RadiusMismatch { left: Option<usize>, right: Option<usize> },
}

impl fmt::Display for IsoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoError::RadiusMismatch { left, right } => {
                write!(f, "cannot compare windows of radius {left:?} and {right:?}")
            }
        }
    }
}

impl core::error::Error for IsoError {}

/// Vertex and edge bijections between two windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

fn sorted(mut ws: Vec<Weight>) -> Vec<Weight> {
    ws.sort_by(|a, b| a.cmp_value(b));
    ws
}

fn same_weights(a: &[Weight], b: &[Weight]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.loosely_eq(y))
}

struct Side<'a> {
    g: &'a TruncatedGraph,
    out_sig: Vec<Vec<Weight>>,
    in_sig: Vec<Vec<Weight>>,
    between: BTreeMap<(usize, usize), Vec<Weight>>,
    out_nbrs: Vec<Vec<usize>>,
    in_nbrs: Vec<Vec<usize>>,
}

impl<'a> Side<'a> {
    fn new(g: &'a TruncatedGraph) -> Self {
        let n = g.vertex_count();
        let mut out_sig = alloc::vec![Vec::new(); n];
        let mut in_sig = alloc::vec![Vec::new(); n];
        let mut between: BTreeMap<(usize, usize), Vec<Weight>> = BTreeMap::new();
        let mut out_nbrs = alloc::vec![Vec::new(); n];
        let mut in_nbrs = alloc::vec![Vec::new(); n];
        for e in g.edges() {
            out_sig[e.source].push(e.weight.clone());
            in_sig[e.target].push(e.weight.clone());
            between.entry((e.source, e.target)).or_default().push(e.weight.clone());
            out_nbrs[e.source].push(e.target);
            in_nbrs[e.target].push(e.source);
        }
        let out_sig = out_sig.into_iter().map(sorted).collect();
        let in_sig = in_sig.into_iter().map(sorted).collect();
        let between = between.into_iter().map(|(k, v)| (k, sorted(v))).collect();
        for l in out_nbrs.iter_mut().chain(in_nbrs.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Side { g, out_sig, in_sig, between, out_nbrs, in_nbrs }
    }

    fn between(&self, u: usize, v: usize) -> &[Weight] {
        self.between.get(&(u, v)).map_or(&[], Vec::as_slice)
    }
}

struct Search<'a> {
    a: Side<'a>,
    b: Side<'a>,
    fix_basepoint: bool,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    map: Vec<Option<usize>>,
    inverse: Vec<Option<usize>>,
}

impl Search<'_> {
    fn compatible(&self, v: usize, c: usize) -> bool {
        let (ga, gb) = (self.a.g, self.b.g);
        if ga.is_boundary(v) != gb.is_boundary(c) {
            return false;
        }
        if self.fix_basepoint && ga.distance(v) != gb.distance(c) {
            return false;
        }
        same_weights(&self.a.out_sig[v], &self.b.out_sig[c]) && same_weights(&self.a.in_sig[v], &self.b.in_sig[c])
    }

    /// Edges between `v` (tentatively mapped to `c`) and already-mapped vertices agree.
    fn consistent(&self, v: usize, c: usize) -> bool {
        let image = |u: usize| if u == v { Some(c) } else { self.map[u] };
        let preimage = |x: usize| if x == c { Some(v) } else { self.inverse[x] };
        for &u in &self.a.out_nbrs[v] {
            if let Some(fu) = image(u) {
                if !same_weights(self.a.between(v, u), self.b.between(c, fu)) {
                    return false;
                }
            }
        }
        for &u in &self.a.in_nbrs[v] {
            if let Some(fu) = image(u) {
                if !same_weights(self.a.between(u, v), self.b.between(fu, c)) {
                    return false;
                }
            }
        }
        for &x in &self.b.out_nbrs[c] {
            if let Some(u) = preimage(x) {
                if self.a.between(v, u).is_empty() {
                    return false;
                }
            }
        }
        for &x in &self.b.in_nbrs[c] {
            if let Some(u) = preimage(x) {
                if self.a.between(u, v).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn candidates(&self, k: usize) -> Vec<usize> {
        let v = self.order[k];
        let mut list: Vec<usize> = match self.parent[v] {
            Some(p) => {
                let fp = self.map[p].expect("parent mapped first");
                self.b.out_nbrs[fp].clone()
            }
            None if k == 0 && self.fix_basepoint => alloc::vec![self.b.g.basepoint()],
            None => (0..self.b.g.vertex_count()).collect(),
        };
        list.retain(|&c| self.inverse[c].is_none());
        list
    }

    fn extend(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        let v = self.order[k];
        for c in self.candidates(k) {
            if !self.compatible(v, c) || !self.consistent(v, c) {
                continue;
            }
            self.map[v] = Some(c);
            self.inverse[c] = Some(v);
            if self.extend(k + 1) {
                return true;
            }
            self.map[v] = None;
            self.inverse[c] = None;
        }
        false
    }
}

fn bfs_order(g: &TruncatedGraph) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = g.vertex_count();
    let mut seen = alloc::vec![false; n];
    let mut parent = alloc::vec![None; n];
    let mut order = Vec::with_capacity(n);
    let roots = core::iter::once(g.basepoint()).chain(0..n);
    for root in roots {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in g.out(v) {
                let t = g.edge(e).target;
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some(v);
                    queue.push_back(t);
                }
            }
        }
    }
    (order, parent)
}

/// Pairs parallel edges of matched vertex pairs, keeping conjugation intact.
fn edge_bijection(a: &TruncatedGraph, b: &TruncatedGraph, vmap: &[usize]) -> Option<Vec<usize>> {
    let mut emap: Vec<Option<usize>> = alloc::vec![None; a.edge_count()];
    let mut used = alloc::vec![false; b.edge_count()];
    for e in 0..a.edge_count() {
        if emap[e].is_some() {
            continue;
        }
        let rec = a.edge(e);
        let (s, t) = (vmap[rec.source], vmap[rec.target]);
        let self_conj = rec.conjugate == Some(e);
        let f = b.out(s).iter().copied().find(|&f| {
            let r = b.edge(f);
            !used[f]
                && r.target == t
                && r.weight.loosely_eq(&rec.weight)
                && (r.conjugate == Some(f)) == self_conj
                && r.conjugate.is_some() == rec.conjugate.is_some()
                && r.conjugate.is_none_or(|c| !used[c] || c == f)
        })?;
        emap[e] = Some(f);
        used[f] = true;
        if let (Some(ce), Some(cf)) = (rec.conjugate, b.edge(f).conjugate) {
            if ce != e {
                if emap[ce].is_some() || used[cf] {
                    return None;
                }
                emap[ce] = Some(cf);
                used[cf] = true;
            }
        }
    }
    emap.into_iter().collect()
}

/// Searches for an isomorphism of windows preserving source, target, weight,
/// conjugation and boundary flags (and the basepoint when `fix_basepoint`).
pub fn iso_check(
    g1: &TruncatedGraph,
    g2: &TruncatedGraph,
    fix_basepoint: bool,
) -> Result<Option<Isomorphism>, IsoError> {
    if g1.radius() != g2.radius() {
        return Err(IsoError::RadiusMismatch { left: g1.radius(), right: g2.radius() });
    }
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let (order, parent) = bfs_order(g1);
    let n = g1.vertex_count();
    let mut search = Search {
        a: Side::new(g1),
        b: Side::new(g2),
        fix_basepoint,
        order,
        parent,
        map: alloc::vec![None; n],
        inverse: alloc::vec![None; n],
    };
    if !search.extend(0) {
        return Ok(None);
    }
    let vmap: Vec<usize> = search.map.iter().map(|m| m.expect("complete mapping")).collect();
    Ok(edge_bijection(g1, g2, &vmap).map(|edges| Isomorphism { vertices: vmap, edges }))
}

//! Weighted dynamic multigraph shared by every chain in the crate.
//!
//! The vertex set is fixed at construction; edges carry unique ids that are
//! never reused, so layered structures can key their deltas by id.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = u64;
pub type Weight = f64;

/// Relative slack used on top of ε wherever a `(1 ± ε)` bound is checked,
/// absorbing float rounding.
pub const REL_TOL: f64 = 1e-9;

/// Map a weight to bits that sort like the weight under `total_cmp`.
#[inline]
pub fn weight_order_bits(w: f64) -> u64 {
    let b = w.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Weight,
}

impl WeightedEdge {
    pub fn new(id: EdgeId, u: VertexId, v: VertexId, weight: Weight) -> Self {
        Self { id, u, v, weight }
    }

    /// The endpoint other than `x`.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpdateEvent {
    Insert(WeightedEdge),
    Delete(EdgeId),
}

impl UpdateEvent {
    pub fn insert(id: EdgeId, u: VertexId, v: VertexId, w: Weight) -> Self {
        UpdateEvent::Insert(WeightedEdge::new(id, u, v, w))
    }
}

/// Delta propagated between chain layers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChangeSet {
    pub added: Vec<WeightedEdge>,
    pub removed: Vec<EdgeId>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    pub fn add(&mut self, e: WeightedEdge) {
        debug_assert!(self.removed.iter().all(|&id| id != e.id));
        self.added.push(e);
    }

    pub fn remove(&mut self, id: EdgeId) {
        debug_assert!(self.added.iter().all(|e| e.id != id));
        self.removed.push(id);
    }
}

#[derive(Debug, Clone)]
pub struct DynamicGraph {
    n: usize,
    multi: bool,
    edges: BTreeMap<EdgeId, WeightedEdge>,
    adj: Vec<BTreeSet<EdgeId>>,
    // Multiset of weight order bits, for running w_min / w_max.
    weight_multiset: BTreeMap<u64, usize>,
    next_id: EdgeId,
}

impl DynamicGraph {
    /// Simple graph on `n` vertices (parallel edges rejected).
    pub fn new(n: usize) -> Self {
        Self::with_multi(n, false)
    }

    /// Multigraph on `n` vertices.
    pub fn multigraph(n: usize) -> Self {
        Self::with_multi(n, true)
    }

    pub fn with_multi(n: usize, multi: bool) -> Self {
        Self {
            n,
            multi,
            edges: BTreeMap::new(),
            adj: vec![BTreeSet::new(); n],
            weight_multiset: BTreeMap::new(),
            next_id: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_multi(&self) -> bool {
        self.multi
    }

    fn check_endpoints(&self, u: VertexId, v: VertexId, w: Weight) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if u >= self.n {
            return Err(Error::VertexOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(Error::VertexOutOfRange(v, self.n));
        }
        if !(w > 0.0) {
            return Err(Error::NonPositiveWeight(w));
        }
        if !self.multi && self.adj[u].iter().any(|id| self.edges[id].touches(v)) {
            return Err(Error::ParallelEdge(u, v));
        }
        Ok(())
    }

    /// Insert an edge with a fresh id and return it.
    pub fn insert_edge(&mut self, u: VertexId, v: VertexId, w: Weight) -> Result<EdgeId> {
        self.check_endpoints(u, v, w)?;
        let id = self.next_id;
        self.insert_raw(WeightedEdge::new(id, u, v, w));
        Ok(id)
    }

    /// Insert an edge under a caller-chosen id. Ids flow through chain
    /// layers unchanged, so mirrored graphs must accept external ids.
    pub fn insert_edge_with_id(&mut self, e: WeightedEdge) -> Result<()> {
        if self.edges.contains_key(&e.id) {
            return Err(Error::DuplicateEdge(e.id));
        }
        self.check_endpoints(e.u, e.v, e.weight)?;
        self.insert_raw(e);
        Ok(())
    }

    fn insert_raw(&mut self, e: WeightedEdge) {
        self.next_id = self.next_id.max(e.id + 1);
        self.adj[e.u].insert(e.id);
        self.adj[e.v].insert(e.id);
        *self
            .weight_multiset
            .entry(weight_order_bits(e.weight))
            .or_insert(0) += 1;
        self.edges.insert(e.id, e);
    }

    pub fn delete_edge(&mut self, id: EdgeId) -> Result<WeightedEdge> {
        let e = self.edges.remove(&id).ok_or(Error::UnknownEdge(id))?;
        self.adj[e.u].remove(&id);
        self.adj[e.v].remove(&id);
        let bits = weight_order_bits(e.weight);
        let cnt = self.weight_multiset.get_mut(&bits).unwrap();
        *cnt -= 1;
        if *cnt == 0 {
            self.weight_multiset.remove(&bits);
        }
        Ok(e)
    }

    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<()> {
        match ev {
            UpdateEvent::Insert(e) => self.insert_edge_with_id(*e),
            UpdateEvent::Delete(id) => self.delete_edge(*id).map(|_| ()),
        }
    }

    pub fn edge(&self, id: EdgeId) -> Option<&WeightedEdge> {
        self.edges.get(&id)
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &WeightedEdge> {
        self.edges.values()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    /// Edges incident to `v`, in id order.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = &WeightedEdge> {
        self.adj[v].iter().map(|id| &self.edges[id])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    /// Total weight from `v` to each distinct neighbor, in vertex order.
    pub fn neighbor_weights(&self, v: VertexId) -> BTreeMap<VertexId, Weight> {
        let mut out = BTreeMap::new();
        for e in self.incident(v) {
            *out.entry(e.other(v)).or_insert(0.0) += e.weight;
        }
        out
    }

    pub fn w_min(&self) -> Option<Weight> {
        self.edges_weight_at(self.weight_multiset.keys().next())
    }

    pub fn w_max(&self) -> Option<Weight> {
        self.edges_weight_at(self.weight_multiset.keys().next_back())
    }

    fn edges_weight_at(&self, bits: Option<&u64>) -> Option<Weight> {
        bits.map(|&b| {
            let raw = if b >> 63 == 1 { b & !(1 << 63) } else { !b };
            f64::from_bits(raw)
        })
    }

    /// Ratio between the largest and the smallest edge weight; 1 when empty.
    pub fn weight_ratio(&self) -> Weight {
        match (self.w_min(), self.w_max()) {
            (Some(lo), Some(hi)) => hi / lo,
            _ => 1.0,
        }
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.values().map(|e| e.weight).sum()
    }

    /// Weight of the cut `(S, V \ S)`: sum over edges with exactly one
    /// endpoint in `S`. Empty and full `S` cut nothing.
    pub fn cut_weight(&self, s: &BTreeSet<VertexId>) -> Weight {
        self.edges
            .values()
            .filter(|e| s.contains(&e.u) != s.contains(&e.v))
            .map(|e| e.weight)
            .sum()
    }

    /// Same cut weight, with membership given as a bitmask over vertices.
    pub fn cut_weight_mask(&self, mask: &[bool]) -> Weight {
        self.edges
            .values()
            .filter(|e| mask[e.u] != mask[e.v])
            .map(|e| e.weight)
            .sum()
    }

    /// Next id that `insert_edge` would hand out.
    pub fn peek_next_id(&self) -> EdgeId {
        self.next_id
    }

    /// Reserve ids below `floor` so fresh ids never collide with them.
    pub fn bump_next_id(&mut self, floor: EdgeId) {
        self.next_id = self.next_id.max(floor);
    }
}

/// The unique class index `i` with `gamma * 2^i <= w < gamma * 2^(i+1)`.
pub fn weight_class(w: Weight, gamma: Weight) -> Result<i32> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveWeight(gamma));
    }
    if w < gamma {
        return Err(Error::WeightBelowBase(w, gamma));
    }
    let mut i = (w / gamma).log2().floor() as i32;
    // Fix up boundary rounding so the half-open interval is exact.
    while gamma * (2f64).powi(i + 1) <= w {
        i += 1;
    }
    while gamma * (2f64).powi(i) > w {
        i -= 1;
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn insert_single_edge() {
        let mut g = DynamicGraph::new(2);
        let id = g.insert_edge(0, 1, 1.0).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.weight_ratio(), 1.0);
        assert_eq!(g.edge(id).unwrap().weight, 1.0);
    }

    #[test]
    fn parallel_edges_only_when_multi() {
        let mut g = DynamicGraph::multigraph(2);
        g.insert_edge(0, 1, 1.0).unwrap();
        g.insert_edge(0, 1, 3.0).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.weight_ratio(), 3.0);

        let mut s = DynamicGraph::new(2);
        s.insert_edge(0, 1, 1.0).unwrap();
        assert_eq!(s.insert_edge(0, 1, 3.0), Err(Error::ParallelEdge(0, 1)));
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = DynamicGraph::new(2);
        assert_eq!(g.insert_edge(0, 0, 1.0), Err(Error::SelfLoop(0)));
    }

    #[test]
    fn delete_edge_variants() {
        let mut g = DynamicGraph::multigraph(2);
        let a = g.insert_edge(0, 1, 1.0).unwrap();
        assert_eq!(g.delete_edge(a).unwrap().weight, 1.0);
        assert_eq!(g.m(), 0);
        assert_eq!(g.delete_edge(a), Err(Error::UnknownEdge(a)));

        let b = g.insert_edge(0, 1, 1.0).unwrap();
        let c = g.insert_edge(0, 1, 2.0).unwrap();
        g.delete_edge(b).unwrap();
        assert!(g.contains_edge(c));
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn weight_class_examples() {
        assert_eq!(weight_class(5.0, 1.0).unwrap(), 2);
        assert_eq!(weight_class(1.0, 1.0).unwrap(), 0);
        assert_eq!(weight_class(8.0, 1.0).unwrap(), 3);
        assert!(weight_class(0.5, 1.0).is_err());
    }

    #[test]
    fn cut_weight_examples() {
        let mut g = DynamicGraph::new(3);
        g.insert_edge(0, 1, 1.0).unwrap();
        g.insert_edge(1, 2, 1.0).unwrap();
        g.insert_edge(0, 2, 1.0).unwrap();
        let s: BTreeSet<_> = [0].into();
        assert_eq!(g.cut_weight(&s), 2.0);
        assert_eq!(g.cut_weight(&BTreeSet::new()), 0.0);

        let mut p = DynamicGraph::new(3);
        p.insert_edge(0, 1, 1.0).unwrap();
        p.insert_edge(1, 2, 2.0).unwrap();
        let s: BTreeSet<_> = [1].into();
        assert_eq!(p.cut_weight(&s), 3.0);
    }

    #[test]
    fn ids_are_never_reused() {
        let mut g = DynamicGraph::new(3);
        let a = g.insert_edge(0, 1, 1.0).unwrap();
        g.delete_edge(a).unwrap();
        let b = g.insert_edge(0, 1, 1.0).unwrap();
        assert!(b > a);
    }

    proptest! {
        // Replaying a stream and recomputing m / W from scratch matches the
        // incremental bookkeeping.
        #[test]
        fn replay_matches_bookkeeping(ops in proptest::collection::vec((0usize..6, 0usize..6, 1u32..16), 1..60)) {
            let mut g = DynamicGraph::multigraph(6);
            let mut live: Vec<EdgeId> = Vec::new();
            let mut log: Vec<UpdateEvent> = Vec::new();
            for (i, (u, v, w)) in ops.into_iter().enumerate() {
                if u != v && (i % 3 != 2 || live.is_empty()) {
                    let id = g.insert_edge(u, v, w as f64).unwrap();
                    live.push(id);
                    log.push(UpdateEvent::insert(id, u, v, w as f64));
                } else if let Some(id) = live.pop() {
                    g.delete_edge(id).unwrap();
                    log.push(UpdateEvent::Delete(id));
                }
            }
            let mut fresh = DynamicGraph::multigraph(6);
            for ev in &log {
                fresh.apply(ev).unwrap();
            }
            prop_assert_eq!(fresh.m(), g.m());
            prop_assert_eq!(fresh.weight_ratio(), g.weight_ratio());
            prop_assert_eq!(fresh.w_min(), g.w_min());
            prop_assert_eq!(fresh.w_max(), g.w_max());
        }

        // cut_weight(S) == cut_weight(V \ S).
        #[test]
        fn cut_symmetry(edges in proptest::collection::vec((0usize..7, 0usize..7, 1u32..9), 0..25), mask in 0u32..128) {
            let mut g = DynamicGraph::multigraph(7);
            for (u, v, w) in edges {
                if u != v {
                    g.insert_edge(u, v, w as f64).unwrap();
                }
            }
            let s: BTreeSet<usize> = (0..7).filter(|i| mask >> i & 1 == 1).collect();
            let co: BTreeSet<usize> = (0..7).filter(|i| mask >> i & 1 == 0).collect();
            prop_assert_eq!(g.cut_weight(&s), g.cut_weight(&co));
        }

        // weight_class partitions: every edge weight lies in exactly one class.
        #[test]
        fn weight_class_partitions(w in 1.0f64..1000.0, gamma in proptest::sample::select(vec![0.25, 0.5, 1.0, 2.0])) {
            prop_assume!(w >= gamma);
            let i = weight_class(w, gamma).unwrap();
            let lo = gamma * (2f64).powi(i);
            let hi = gamma * (2f64).powi(i + 1);
            prop_assert!(lo <= w && w < hi);
        }
    }
}

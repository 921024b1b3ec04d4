//! Decremental spanner with the monotonicity property.
//!
//! Vertices are clustered around sampled center hierarchies with distances
//! maintained Even–Shiloach style under deletions. The spanner keeps all
//! cluster-forest parent edges plus one certified edge from each boundary
//! vertex to each neighboring cluster. Once an edge enters the spanner it
//! stays until it is deleted from the input graph, which is what makes
//! layered composition purely decremental.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{ChangeSet, DynamicGraph, EdgeId, VertexId, WeightedEdge};
use crate::rng::{permutation_ranks, prob_coin};

const INF: u16 = u16::MAX;

/// Clustering `C_{S,σ,i}`: every vertex within distance `radius` of the
/// center set is assigned to its nearest center, ties broken by the
/// permutation; parents form shortest-path trees toward the centers.
#[derive(Debug, Clone)]
pub struct Clustering {
    radius: u16,
    dist: Vec<u16>,
    center: Vec<Option<VertexId>>,
    parent: Vec<Option<VertexId>>,
    parent_edge: Vec<Option<EdgeId>>,
}

/// One vertex's label diff produced by a deletion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterChange {
    pub vertex: VertexId,
    pub old_center: Option<VertexId>,
    pub new_center: Option<VertexId>,
    pub old_parent_edge: Option<EdgeId>,
    pub new_parent_edge: Option<EdgeId>,
}

impl Clustering {
    /// Build from scratch by layered multi-source search.
    pub fn build(
        g: &DynamicGraph,
        centers: &BTreeSet<VertexId>,
        sigma: &[u64],
        radius: u16,
    ) -> Self {
        let n = g.n();
        let mut c = Self {
            radius,
            dist: vec![INF; n],
            center: vec![None; n],
            parent: vec![None; n],
            parent_edge: vec![None; n],
        };
        for v in 0..n {
            c.relabel(g, centers, sigma, v);
        }
        // Iterate to the fixpoint; labels only decrease from INF.
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                let old = (c.dist[v], c.center[v], c.parent[v], c.parent_edge[v]);
                c.relabel(g, centers, sigma, v);
                if old != (c.dist[v], c.center[v], c.parent[v], c.parent_edge[v]) {
                    changed = true;
                }
            }
        }
        c
    }

    pub fn dist(&self, v: VertexId) -> Option<u16> {
        (self.dist[v] != INF).then_some(self.dist[v])
    }

    pub fn center_of(&self, v: VertexId) -> Option<VertexId> {
        self.center[v]
    }

    pub fn parent_edge_of(&self, v: VertexId) -> Option<EdgeId> {
        self.parent_edge[v]
    }

    /// Whether `v` is clustered (member of `V_i`).
    pub fn clustered(&self, v: VertexId) -> bool {
        self.center[v].is_some()
    }

    /// Recompute `v`'s label from its neighbors. Returns true if the
    /// outward-visible part (distance, center) changed.
    fn relabel(
        &mut self,
        g: &DynamicGraph,
        centers: &BTreeSet<VertexId>,
        sigma: &[u64],
        v: VertexId,
    ) -> bool {
        let old_vis = (self.dist[v], self.center[v]);
        if centers.contains(&v) {
            self.dist[v] = 0;
            self.center[v] = Some(v);
            self.parent[v] = None;
            self.parent_edge[v] = None;
            return old_vis != (self.dist[v], self.center[v]);
        }
        // Best (dist+1, σ(center)) over neighbors, then σ-first parent,
        // then smallest edge id among parallel edges to that parent.
        let mut best: Option<(u16, u64, u64, VertexId, EdgeId)> = None;
        for e in g.incident(v) {
            let u = e.other(v);
            if self.dist[u] == INF || self.dist[u] + 1 > self.radius {
                continue;
            }
            let cand_center = self.center[u].expect("finite distance implies a center");
            let key = (self.dist[u] + 1, sigma[cand_center], sigma[u], u, e.id);
            match best {
                Some((bd, bc, bp, bu, bid))
                    if (bd, bc, bp, bu, bid) <= (key.0, key.1, key.2, key.3, key.4) => {}
                _ => best = Some(key),
            }
        }
        match best {
            Some((d, _, _, u, id)) => {
                self.dist[v] = d;
                self.center[v] = self.center[u];
                self.parent[v] = Some(u);
                self.parent_edge[v] = Some(id);
            }
            None => {
                self.dist[v] = INF;
                self.center[v] = None;
                self.parent[v] = None;
                self.parent_edge[v] = None;
            }
        }
        old_vis != (self.dist[v], self.center[v])
    }

    /// Even–Shiloach style repair after deleting edge `(a, b)`: labels only
    /// worsen, so recompute along a worklist until the fixpoint.
    pub fn delete(
        &mut self,
        g: &DynamicGraph,
        centers: &BTreeSet<VertexId>,
        sigma: &[u64],
        a: VertexId,
        b: VertexId,
    ) -> Vec<ClusterChange> {
        let mut changes: BTreeMap<VertexId, ClusterChange> = BTreeMap::new();
        let mut work: Vec<VertexId> = vec![a, b];
        while let Some(v) = work.pop() {
            let old = (self.dist[v], self.center[v], self.parent_edge[v]);
            let visible_change = self.relabel(g, centers, sigma, v);
            let new = (self.dist[v], self.center[v], self.parent_edge[v]);
            if old == new {
                continue;
            }
            changes
                .entry(v)
                .and_modify(|ch| {
                    ch.new_center = new.1;
                    ch.new_parent_edge = new.2;
                })
                .or_insert(ClusterChange {
                    vertex: v,
                    old_center: old.1,
                    new_center: new.1,
                    old_parent_edge: old.2,
                    new_parent_edge: new.2,
                });
            if visible_change {
                for e in g.incident(v) {
                    work.push(e.other(v));
                }
            }
        }
        changes.into_values().filter(|c| c.old_center != c.new_center || c.old_parent_edge != c.new_parent_edge).collect()
    }
}

/// Where a spanner edge came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Forest,
    Selected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HInterval {
    added_at: u64,
    removed_at: Option<u64>,
}

/// Decremental `(2k-1)`-spanner of an unweighted view, with monotone
/// membership: spanner edges leave only when deleted from the graph.
#[derive(Debug)]
pub struct MonotoneSpanner {
    n: usize,
    k: usize,
    sigma: Vec<u64>,
    graph: DynamicGraph,
    centers: Vec<BTreeSet<VertexId>>,
    clusterings: Vec<Clustering>,
    h: BTreeMap<EdgeId, Provenance>,
    // Current certificate per (vertex, level, neighboring center).
    selected: BTreeMap<(VertexId, usize, VertexId), EdgeId>,
    // Reverse index: selected edges by certificate endpoint per level.
    selected_by_witness: BTreeMap<(VertexId, usize), BTreeSet<(VertexId, VertexId)>>,
    clock: u64,
    h_log: BTreeMap<EdgeId, Vec<HInterval>>,
    parent_changes: u64,
}

impl MonotoneSpanner {
    /// Build the spanner of `g` (weights ignored; multi-edges allowed).
    pub fn new(g: &DynamicGraph, k: usize, seed: u64) -> Self {
        assert!(k >= 2, "spanner parameter k must be at least 2");
        let n = g.n();
        let sigma = permutation_ranks(seed, n);
        // S_0 = V ⊇ S_1 ⊇ … ⊇ S_k = ∅, sampling down with prob n^{-1/k}.
        let p = (n.max(2) as f64).powf(-1.0 / k as f64);
        let mut centers: Vec<BTreeSet<VertexId>> = Vec::with_capacity(k + 1);
        centers.push((0..n).collect());
        for i in 1..=k {
            let prev = &centers[i - 1];
            let next: BTreeSet<VertexId> = if i == k {
                BTreeSet::new()
            } else {
                prev.iter()
                    .copied()
                    .filter(|&v| prob_coin(seed, i as u64, v as u64, p))
                    .collect()
            };
            centers.push(next);
        }
        let clusterings: Vec<Clustering> = (0..=k)
            .map(|i| Clustering::build(g, &centers[i], &sigma, i as u16))
            .collect();
        let mut sp = Self {
            n,
            k,
            sigma,
            graph: g.clone(),
            centers,
            clusterings,
            h: BTreeMap::new(),
            selected: BTreeMap::new(),
            selected_by_witness: BTreeMap::new(),
            clock: 0,
            h_log: BTreeMap::new(),
            parent_changes: 0,
        };
        for i in 0..=sp.k {
            for v in 0..n {
                if let Some(id) = sp.clusterings[i].parent_edge_of(v) {
                    sp.add_to_h(id, Provenance::Forest);
                }
            }
        }
        for v in 0..n {
            for i in 0..sp.k {
                if sp.boundary(v, i) {
                    sp.reselect(v, i);
                }
            }
        }
        sp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    /// Current spanner membership.
    pub fn spanner_edges(&self) -> Vec<EdgeId> {
        self.h.keys().copied().collect()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.h.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn parent_changes(&self) -> u64 {
        self.parent_changes
    }

    /// `v ∈ V_i \ V_{i+1}`.
    fn boundary(&self, v: VertexId, i: usize) -> bool {
        self.clusterings[i].clustered(v) && !self.clusterings[i + 1].clustered(v)
    }

    fn add_to_h(&mut self, id: EdgeId, prov: Provenance) {
        if self.h.insert(id, prov).is_none() {
            let clock = self.clock;
            self.h_log
                .entry(id)
                .or_default()
                .push(HInterval { added_at: clock, removed_at: None });
        }
    }

    /// Refresh `v`'s certificates at level `i`: one current edge to every
    /// neighboring cluster. Existing valid certificates are kept; anything
    /// newly chosen is added to the spanner (old edges stay, by
    /// monotonicity).
    fn reselect(&mut self, v: VertexId, i: usize) {
        if !self.boundary(v, i) {
            return;
        }
        let own = self.clusterings[i].center_of(v);
        // Group candidate edges by the neighbor's center.
        let mut best: BTreeMap<VertexId, (u64, EdgeId, VertexId)> = BTreeMap::new();
        for e in self.graph.incident(v) {
            let u = e.other(v);
            match self.clusterings[i].center_of(u) {
                Some(s) if Some(s) != own => {
                    let key = (self.sigma[u], e.id, u);
                    best.entry(s)
                        .and_modify(|b| {
                            if key < *b {
                                *b = key;
                            }
                        })
                        .or_insert(key);
                }
                _ => {}
            }
        }
        for (s, (_, id, u)) in best {
            if let Some(&cur) = self.selected.get(&(v, i, s)) {
                // Keep a still-valid certificate, refreshing its witness
                // index entry.
                if let Some(e) = self.graph.edge(cur) {
                    let w = e.other(v);
                    if self.clusterings[i].center_of(w) == Some(s) {
                        self.selected_by_witness
                            .entry((w, i))
                            .or_default()
                            .insert((v, s));
                        continue;
                    }
                }
            }
            self.selected.insert((v, i, s), id);
            self.selected_by_witness
                .entry((u, i))
                .or_default()
                .insert((v, s));
            self.add_to_h(id, Provenance::Selected);
        }
    }

    /// Delete edge `id` from the graph; returns the spanner change. Only
    /// the deleted edge may leave the spanner; fresh certificates may join.
    pub fn delete(&mut self, id: EdgeId) -> Result<ChangeSet> {
        let e = *self.graph.edge(id).ok_or(Error::UnknownEdge(id))?;
        self.clock += 1;
        let before: BTreeSet<EdgeId> = self.h.keys().copied().collect();
        self.graph.delete_edge(id)?;

        // Repair every level and collect label diffs.
        let mut reselect: BTreeSet<(VertexId, usize)> = BTreeSet::new();
        for i in 0..=self.k {
            let changes = {
                let Self { clusterings, graph, centers, sigma, .. } = self;
                clusterings[i].delete(graph, &centers[i], sigma, e.u, e.v)
            };
            for ch in changes {
                if ch.old_parent_edge != ch.new_parent_edge {
                    self.parent_changes += 1;
                    if let Some(pe) = ch.new_parent_edge {
                        self.add_to_h(pe, Provenance::Forest);
                    }
                }
                if ch.old_center != ch.new_center {
                    // The vertex itself re-certifies at this level and, via
                    // the boundary rule, one level below.
                    if i < self.k {
                        reselect.insert((ch.vertex, i));
                    }
                    if i > 0 {
                        reselect.insert((ch.vertex, i - 1));
                    }
                    // Certificates witnessed by this vertex at this level
                    // are stale; their owners re-certify.
                    if let Some(entries) = self.selected_by_witness.remove(&(ch.vertex, i)) {
                        for (v, _) in entries {
                            reselect.insert((v, i));
                        }
                    }
                    // Neighbors may see a new adjacent cluster.
                    for ne in self.graph.incident(ch.vertex) {
                        if i < self.k {
                            reselect.insert((ne.other(ch.vertex), i));
                        }
                    }
                }
            }
        }
        // The deleted edge may have been a certificate somewhere.
        for i in 0..self.k {
            for v in [e.u, e.v] {
                let stale: Vec<(VertexId, usize, VertexId)> = self
                    .selected
                    .range((v, i, 0)..=(v, i, VertexId::MAX))
                    .filter(|(_, &sel)| sel == id)
                    .map(|(&key, _)| key)
                    .collect();
                for key in stale {
                    self.selected.remove(&key);
                    reselect.insert((v, i));
                }
            }
        }
        for (v, i) in reselect {
            self.reselect(v, i);
        }

        // Monotonicity: the only removal is the deleted edge itself.
        let mut out = ChangeSet::default();
        if self.h.remove(&id).is_some() {
            let clock = self.clock;
            if let Some(log) = self.h_log.get_mut(&id) {
                log.last_mut().unwrap().removed_at = Some(clock);
            }
            out.remove(id);
        }
        for (&hid, _) in self.h.iter() {
            if !before.contains(&hid) {
                let he = *self.graph.edge(hid).expect("spanner edge must be live");
                out.add(he);
            }
        }
        Ok(out)
    }

    /// Monotonicity audit: every edge's spanner membership is one interval,
    /// closed only by its deletion from the graph.
    pub fn audit_monotonicity(&self) -> std::result::Result<(), String> {
        for (&id, intervals) in &self.h_log {
            if intervals.len() != 1 {
                return Err(format!("edge {id} has {} spanner intervals", intervals.len()));
            }
            if intervals[0].removed_at.is_some() && self.graph.contains_edge(id) {
                return Err(format!("edge {id} left the spanner while still in the graph"));
            }
        }
        Ok(())
    }

    /// Realized stretch guarantee of this construction.
    pub fn stretch_bound(&self) -> f64 {
        (2 * self.k - 1) as f64
    }
}

/// Weighted front-end: one unweighted spanner per geometric weight class.
#[derive(Debug)]
pub struct WeightClassSpanner {
    k: usize,
    eps: f64,
    gamma: f64,
    classes: BTreeMap<i32, MonotoneSpanner>,
    class_of: BTreeMap<EdgeId, i32>,
}

impl WeightClassSpanner {
    /// `gamma` anchors the classes; weights below it are rejected.
    pub fn new(g: &DynamicGraph, k: usize, eps: f64, gamma: f64, seed: u64) -> Result<Self> {
        let mut sp = Self {
            k,
            eps,
            gamma,
            classes: BTreeMap::new(),
            class_of: BTreeMap::new(),
        };
        let mut by_class: BTreeMap<i32, Vec<WeightedEdge>> = BTreeMap::new();
        for e in g.edges() {
            by_class.entry(sp.class_of_weight(e.weight)?).or_default().push(*e);
        }
        for (class, edges) in by_class {
            let mut sub = DynamicGraph::multigraph(g.n());
            for e in edges {
                sub.insert_edge_with_id(e)?;
                sp.class_of.insert(e.id, class);
            }
            let inst = MonotoneSpanner::new(&sub, k, seed ^ (class as u64).wrapping_mul(0xa5a5));
            sp.classes.insert(class, inst);
        }
        Ok(sp)
    }

    fn class_of_weight(&self, w: f64) -> Result<i32> {
        if w < self.gamma {
            return Err(Error::WeightBelowBase(w, self.gamma));
        }
        Ok((w / self.gamma).log(1.0 + self.eps).floor() as i32)
    }

    pub fn delete(&mut self, id: EdgeId) -> Result<ChangeSet> {
        let class = *self.class_of.get(&id).ok_or(Error::UnknownEdge(id))?;
        self.class_of.remove(&id);
        self.classes.get_mut(&class).unwrap().delete(id)
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.class_of
            .get(&id)
            .is_some_and(|c| self.classes[c].contains(id))
    }

    pub fn contains_edge_in_graph(&self, id: EdgeId) -> bool {
        self.class_of.contains_key(&id)
    }

    pub fn spanner_edges(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self
            .classes
            .values()
            .flat_map(|c| c.spanner_edges())
            .collect();
        out.sort_unstable();
        out
    }

    /// Union stretch bound `(1 + ε)(2k - 1)` under resistance lengths.
    pub fn stretch_bound(&self) -> f64 {
        (1.0 + self.eps) * (2 * self.k - 1) as f64
    }

    pub fn audit_monotonicity(&self) -> std::result::Result<(), String> {
        for c in self.classes.values() {
            c.audit_monotonicity()?;
        }
        Ok(())
    }

    pub fn classes(&self) -> impl Iterator<Item = (&i32, &MonotoneSpanner)> {
        self.classes.iter()
    }
}

/// Default spanner parameter `k = max(2, ⌊log2(n) / 4⌋)`.
pub fn default_k(n: usize) -> usize {
    (((n.max(2) as f64).log2() / 4.0).floor() as usize).max(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::stretch_check;
    use crate::rng::SplitMix64;

    fn unweighted(seed: u64, n: usize, m: usize) -> DynamicGraph {
        let mut rng = SplitMix64::new(seed);
        let mut g = DynamicGraph::multigraph(n);
        while g.m() < m {
            let u = rng.next_below(n as u64) as usize;
            let v = rng.next_below(n as u64) as usize;
            if u != v {
                g.insert_edge(u, v, 1.0).unwrap();
            }
        }
        g
    }

    /// From-scratch clustering with explicit BFS distances and σ tie-break.
    fn oracle_clustering(
        g: &DynamicGraph,
        centers: &BTreeSet<VertexId>,
        sigma: &[u64],
        radius: u16,
    ) -> Vec<Option<VertexId>> {
        let n = g.n();
        let mut dist = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for &s in centers {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            for e in g.incident(x) {
                let y = e.other(x);
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        (0..n)
            .map(|v| {
                if dist[v] as u64 > radius as u64 {
                    return None;
                }
                // σ-minimal center among those at distance dist[v].
                let mut best: Option<VertexId> = None;
                for &s in centers {
                    // BFS from v bounded by dist[v] to check d(v, s).
                    let mut d = vec![u32::MAX; n];
                    d[v] = 0;
                    let mut q = std::collections::VecDeque::from([v]);
                    while let Some(x) = q.pop_front() {
                        if d[x] >= dist[v] {
                            continue;
                        }
                        for e in g.incident(x) {
                            let y = e.other(x);
                            if d[y] == u32::MAX {
                                d[y] = d[x] + 1;
                                q.push_back(y);
                            }
                        }
                    }
                    if d[s] == dist[v] && best.is_none_or(|b| sigma[s] < sigma[b]) {
                        best = Some(s);
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn clustering_matches_bfs_oracle_under_deletions() {
        let n = 20;
        for seed in 0..4u64 {
            let mut g = unweighted(seed, n, 40);
            let sigma = permutation_ranks(seed ^ 1, n);
            let centers: BTreeSet<VertexId> = (0..n).filter(|&v| v % 3 == 0).collect();
            let radius = 2;
            let mut c = Clustering::build(&g, &centers, &sigma, radius);
            let ids: Vec<EdgeId> = g.edge_ids().collect();
            for id in ids {
                let e = *g.edge(id).unwrap();
                g.delete_edge(id).unwrap();
                c.delete(&g, &centers, &sigma, e.u, e.v);
                let oracle = oracle_clustering(&g, &centers, &sigma, radius);
                for v in 0..n {
                    assert_eq!(c.center_of(v), oracle[v], "seed {seed} vertex {v}");
                }
            }
        }
    }

    #[test]
    fn delete_off_shortest_path_changes_nothing() {
        // Star with an extra rim edge; deleting the rim edge reassigns
        // nobody.
        let mut g = DynamicGraph::new(4);
        g.insert_edge(0, 1, 1.0).unwrap();
        g.insert_edge(0, 2, 1.0).unwrap();
        let rim = g.insert_edge(1, 2, 1.0).unwrap();
        let sigma = permutation_ranks(0, 4);
        let centers: BTreeSet<VertexId> = [0].into();
        let mut c = Clustering::build(&g, &centers, &sigma, 1);
        let e = *g.edge(rim).unwrap();
        g.delete_edge(rim).unwrap();
        let changes = c.delete(&g, &centers, &sigma, e.u, e.v);
        assert!(changes.iter().all(|ch| ch.old_center == ch.new_center));

        // Deleting a spoke evicts the spoke vertex from the radius-1
        // cluster.
        let spoke = g.edge_ids().next().unwrap();
        let e = *g.edge(spoke).unwrap();
        let leaf = e.other(0);
        g.delete_edge(spoke).unwrap();
        c.delete(&g, &centers, &sigma, e.u, e.v);
        assert_eq!(c.center_of(leaf), None);
    }

    #[test]
    fn tree_spanner_is_the_tree() {
        let mut g = DynamicGraph::new(7);
        for i in 0..6 {
            g.insert_edge(i, i + 1, 1.0).unwrap();
        }
        let sp = MonotoneSpanner::new(&g, 2, 5);
        assert_eq!(sp.spanner_edges().len(), 6);
    }

    #[test]
    fn spanner_stretch_under_full_deletion() {
        let n = 16;
        for (seed, k) in [(0u64, 2usize), (1, 3), (2, 2)] {
            let mut g = unweighted(seed, n, 36);
            let mut sp = MonotoneSpanner::new(&g, k, seed ^ 9);
            let check = |sp: &MonotoneSpanner, g: &DynamicGraph| {
                let mut h = DynamicGraph::multigraph(n);
                for id in sp.spanner_edges() {
                    h.insert_edge_with_id(*g.edge(id).unwrap()).unwrap();
                }
                let (ok, worst) = stretch_check(g, &h, (2 * k - 1) as f64);
                assert!(ok, "seed {seed} k {k} worst {worst}");
            };
            check(&sp, &g);
            let ids: Vec<EdgeId> = g.edge_ids().collect();
            for id in ids {
                g.delete_edge(id).unwrap();
                let delta = sp.delete(id).unwrap();
                assert!(delta.removed.iter().all(|&r| r == id));
                check(&sp, &g);
            }
            sp.audit_monotonicity().unwrap();
        }
    }

    #[test]
    fn deleting_non_spanner_edge_removes_nothing() {
        let n = 10;
        let g = unweighted(3, n, 30);
        let mut sp = MonotoneSpanner::new(&g, 2, 4);
        let outside: Vec<EdgeId> = g
            .edge_ids()
            .filter(|id| !sp.contains(*id))
            .collect();
        if let Some(&id) = outside.first() {
            let delta = sp.delete(id).unwrap();
            assert!(delta.removed.is_empty());
        }
        // Deleting a spanner edge removes exactly it.
        let inside = sp.spanner_edges()[0];
        let delta = sp.delete(inside).unwrap();
        assert_eq!(delta.removed, vec![inside]);
    }

    #[test]
    fn weighted_classes_are_isolated() {
        let mut g = DynamicGraph::multigraph(6);
        let a = g.insert_edge(0, 1, 1.0).unwrap();
        let b = g.insert_edge(1, 2, 1.0).unwrap();
        let c = g.insert_edge(3, 4, 8.0).unwrap();
        let d = g.insert_edge(4, 5, 8.0).unwrap();
        let mut sp = WeightClassSpanner::new(&g, 2, 1.0, 1.0, 7).unwrap();
        let before: Vec<EdgeId> = sp.spanner_edges();
        assert!(before.contains(&c) && before.contains(&d));
        sp.delete(a).unwrap();
        // Class of weight-8 edges untouched.
        let after = sp.spanner_edges();
        assert!(after.contains(&c) && after.contains(&d));
        assert!(!after.contains(&a));
        assert!(after.contains(&b));
    }

    #[test]
    fn weighted_stretch_bound_holds() {
        let n = 12;
        for seed in 0..3u64 {
            let mut rng = SplitMix64::new(seed ^ 0x51);
            let mut g = DynamicGraph::multigraph(n);
            for _ in 0..30 {
                let u = rng.next_below(n as u64) as usize;
                let v = rng.next_below(n as u64) as usize;
                if u != v {
                    g.insert_edge(u, v, (1 + rng.next_below(7)) as f64).unwrap();
                }
            }
            let mut sp = WeightClassSpanner::new(&g, 2, 1.0, 1.0, seed).unwrap();
            let ids: Vec<EdgeId> = g.edge_ids().collect();
            for id in ids.into_iter().take(20) {
                g.delete_edge(id).unwrap();
                sp.delete(id).unwrap();
                let mut h = DynamicGraph::multigraph(n);
                for hid in sp.spanner_edges() {
                    h.insert_edge_with_id(*g.edge(hid).unwrap()).unwrap();
                }
                let (ok, worst) = stretch_check(&g, &h, sp.stretch_bound());
                assert!(ok, "seed {seed} worst {worst}");
            }
        }
    }

    #[test]
    fn default_k_form() {
        assert_eq!(default_k(16), 2);
        assert_eq!(default_k(4096), 3);
    }
}

//! Star elimination onto a vertex cover.
//!
//! Non-cover vertices are independent, so each star can be replaced by a
//! weighted clique on its neighborhood that preserves every cover cut
//! within a factor of two. The eliminated multigraph tags each edge with
//! the star it came from, and a branch vertex cover derived from the
//! sparsifier's forest decomposition keeps the cover small while leaving
//! non-cover vertices with low degree.

use std::collections::{BTreeMap, BTreeSet};

use crate::cut::{ForestChange, ForestId, SparsifierDelta};
use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, EdgeId, VertexId, Weight, WeightedEdge};
use crate::oracle::min_extension_weight;

/// Clique replacing the star of `x`: for neighbors `u, v` the edge weight
/// is `w(x,u) w(x,v) / Σ_i w(x,i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarClique {
    pub origin: VertexId,
    pub edges: Vec<(VertexId, VertexId, Weight)>,
}

pub fn build_kx(g: &DynamicGraph, x: VertexId) -> StarClique {
    let weights = g.neighbor_weights(x);
    let total: Weight = weights.values().sum();
    let nbrs: Vec<(VertexId, Weight)> = weights.into_iter().collect();
    let mut edges = Vec::new();
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            let (u, wu) = nbrs[i];
            let (v, wv) = nbrs[j];
            edges.push((u, v, wu * wv / total));
        }
    }
    StarClique { origin: x, edges }
}

/// Eliminated graph built from scratch: `(G \ X) ∪ ⋃_{x ∈ X} K_x`.
pub fn eliminate(g: &DynamicGraph, cover: &BTreeSet<VertexId>) -> Result<DynamicGraph> {
    let mut out = DynamicGraph::multigraph(g.n());
    for e in g.edges() {
        match (cover.contains(&e.u), cover.contains(&e.v)) {
            (true, true) => out.insert_edge_with_id(*e)?,
            (false, false) => return Err(Error::NotACover(e.u)),
            _ => {}
        }
    }
    out.bump_next_id(CLIQUE_ID_BASE);
    for x in 0..g.n() {
        if !cover.contains(&x) {
            for (u, v, w) in build_kx(g, x).edges {
                out.insert_edge(u, v, w)?;
            }
        }
    }
    Ok(out)
}

/// Two-sided Schur-style bound: `Δ_G(S)/2 <= Δ_{G_VC}(S) <= Δ_G(S)` for
/// every cover subset, where `Δ_G` is the minimal extension weight.
pub fn schur_bound_check(g: &DynamicGraph, cover: &BTreeSet<VertexId>) -> Result<crate::oracle::OracleReport> {
    let gvc = eliminate(g, cover)?;
    let vc: Vec<VertexId> = cover.iter().copied().collect();
    assert!(vc.len() <= 20);
    let mut worst: f64 = 1.0;
    let mut pass = true;
    for bits in 0..(1u64 << vc.len()) {
        let s: BTreeSet<VertexId> = vc
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let dg = min_extension_weight(g, cover, &s)?;
        let dvc = gvc.cut_weight(&s);
        let tol = 1e-9 * (1.0 + dg.abs());
        if dvc > dg + tol || dvc < dg / 2.0 - tol {
            pass = false;
        }
        if dg > 0.0 {
            worst = worst.max(dg / dvc.max(f64::MIN_POSITIVE));
        }
    }
    Ok(crate::oracle::OracleReport::new(
        "schur-two-sided",
        format!("n={} |VC|={}", g.n(), vc.len()),
        worst,
        pass,
    ))
}

/// All non-leaf vertices of a forest; a lone edge contributes both its
/// endpoints. A 2-approximate minimum vertex cover.
pub fn tree_two_approx_cover(forest: &DynamicGraph) -> BTreeSet<VertexId> {
    let mut cover = BTreeSet::new();
    for v in 0..forest.n() {
        let deg = forest.degree(v);
        if deg >= 2 {
            cover.insert(v);
        } else if deg == 1 {
            let e = forest.incident(v).next().unwrap();
            if forest.degree(e.other(v)) == 1 {
                cover.insert(v);
            }
        }
    }
    cover
}

// Clique edges live above this id so they never collide with sparsifier
// edge ids mirrored as cover-to-cover edges.
const CLIQUE_ID_BASE: EdgeId = 1 << 63;

fn origin_key(origin: Option<VertexId>) -> u64 {
    match origin {
        None => u64::MAX,
        Some(x) => x as u64,
    }
}

/// Multigraph on the cover whose edges are tagged with the eliminated star
/// that produced them (`None` for real cover-to-cover edges).
#[derive(Debug, Clone)]
pub struct EliminatedGraph {
    graph: DynamicGraph,
    origin: BTreeMap<EdgeId, Option<VertexId>>,
    by_origin: BTreeMap<VertexId, BTreeSet<EdgeId>>,
    // ADJ_v ordered by (neighbor, origin tag, id).
    adj: BTreeMap<VertexId, BTreeSet<(VertexId, u64, EdgeId)>>,
}

impl EliminatedGraph {
    pub fn new(n: usize) -> Self {
        let mut graph = DynamicGraph::multigraph(n);
        graph.bump_next_id(CLIQUE_ID_BASE);
        Self {
            graph,
            origin: BTreeMap::new(),
            by_origin: BTreeMap::new(),
            adj: BTreeMap::new(),
        }
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn origin_of(&self, id: EdgeId) -> Option<Option<VertexId>> {
        self.origin.get(&id).copied()
    }

    /// Ordered adjacency view of one cover vertex.
    pub fn adj(&self, v: VertexId) -> impl Iterator<Item = &(VertexId, u64, EdgeId)> {
        self.adj.get(&v).into_iter().flatten()
    }

    fn index_edge(&mut self, e: &WeightedEdge, origin: Option<VertexId>) {
        self.origin.insert(e.id, origin);
        if let Some(x) = origin {
            self.by_origin.entry(x).or_default().insert(e.id);
        }
        self.adj
            .entry(e.u)
            .or_default()
            .insert((e.v, origin_key(origin), e.id));
        self.adj
            .entry(e.v)
            .or_default()
            .insert((e.u, origin_key(origin), e.id));
    }

    fn unindex_edge(&mut self, e: &WeightedEdge) {
        let origin = self.origin.remove(&e.id).flatten();
        if let Some(x) = origin {
            if let Some(set) = self.by_origin.get_mut(&x) {
                set.remove(&e.id);
            }
        }
        let key = origin_key(origin);
        if let Some(set) = self.adj.get_mut(&e.u) {
            set.remove(&(e.v, key, e.id));
        }
        if let Some(set) = self.adj.get_mut(&e.v) {
            set.remove(&(e.u, key, e.id));
        }
    }

    pub fn insert_plain(&mut self, e: WeightedEdge) -> Result<()> {
        self.graph.insert_edge_with_id(e)?;
        self.index_edge(&e, None);
        Ok(())
    }

    pub fn remove_plain(&mut self, id: EdgeId) -> Result<WeightedEdge> {
        let e = self.graph.delete_edge(id)?;
        self.unindex_edge(&e);
        Ok(e)
    }

    pub fn insert_clique_edge(&mut self, origin: VertexId, u: VertexId, v: VertexId, w: Weight) -> Result<EdgeId> {
        let id = self.graph.insert_edge(u, v, w)?;
        let e = *self.graph.edge(id).unwrap();
        self.index_edge(&e, Some(origin));
        Ok(id)
    }

    pub fn remove_clique(&mut self, origin: VertexId) -> Result<Vec<EdgeId>> {
        let ids: Vec<EdgeId> = self
            .by_origin
            .get(&origin)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for &id in &ids {
            let e = self.graph.delete_edge(id)?;
            self.unindex_edge(&e);
        }
        Ok(ids)
    }

    pub fn cut_weight(&self, s: &BTreeSet<VertexId>) -> Weight {
        self.graph.cut_weight(s)
    }
}

#[derive(Debug, Clone)]
struct ForestAdj {
    // Residual edges each form their own tree, so any endpoint counts as
    // a branch vertex.
    singleton_edges: bool,
    adj: BTreeMap<VertexId, BTreeMap<EdgeId, VertexId>>,
    branch: BTreeSet<VertexId>,
}

impl ForestAdj {
    fn new(singleton_edges: bool) -> Self {
        Self { singleton_edges, adj: BTreeMap::new(), branch: BTreeSet::new() }
    }

    fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |m| m.len())
    }

    fn is_branch(&self, v: VertexId) -> bool {
        let deg = self.degree(v);
        if self.singleton_edges {
            return deg >= 1;
        }
        match deg {
            0 => false,
            1 => {
                // Lone-edge special case: both endpoints are branch.
                let (_, &u) = self.adj[&v].iter().next().unwrap();
                self.degree(u) == 1
            }
            _ => true,
        }
    }

    /// Apply one edge change and reclassify the affected vertices.
    /// Returns (now branch, no longer branch).
    fn apply(
        &mut self,
        added: Option<(EdgeId, VertexId, VertexId)>,
        removed: Option<(EdgeId, VertexId, VertexId)>,
    ) -> (Vec<VertexId>, Vec<VertexId>) {
        let mut affected: BTreeSet<VertexId> = BTreeSet::new();
        let note = |adj: &BTreeMap<VertexId, BTreeMap<EdgeId, VertexId>>, v: VertexId| {
            let mut set = BTreeSet::from([v]);
            if let Some(m) = adj.get(&v) {
                set.extend(m.values().copied());
            }
            set
        };
        if let Some((id, u, v)) = removed {
            affected.extend(note(&self.adj, u));
            affected.extend(note(&self.adj, v));
            if let Some(m) = self.adj.get_mut(&u) {
                m.remove(&id);
            }
            if let Some(m) = self.adj.get_mut(&v) {
                m.remove(&id);
            }
        }
        if let Some((id, u, v)) = added {
            self.adj.entry(u).or_default().insert(id, v);
            self.adj.entry(v).or_default().insert(id, u);
            affected.extend(note(&self.adj, u));
            affected.extend(note(&self.adj, v));
        }
        let mut on = Vec::new();
        let mut off = Vec::new();
        for v in affected {
            let now = self.is_branch(v);
            let was = self.branch.contains(&v);
            if now && !was {
                self.branch.insert(v);
                on.push(v);
            } else if !now && was {
                self.branch.remove(&v);
                off.push(v);
            }
        }
        (on, off)
    }
}

/// Branch vertex cover over the sparsifier's forests plus pinned vertices.
#[derive(Debug, Clone)]
pub struct BranchVertexCover {
    forests: BTreeMap<ForestId, ForestAdj>,
    branch_count: Vec<usize>,
    pinned: BTreeSet<VertexId>,
}

impl BranchVertexCover {
    pub fn new(n: usize, pinned: BTreeSet<VertexId>) -> Self {
        Self { forests: BTreeMap::new(), branch_count: vec![0; n], pinned }
    }

    pub fn in_cover(&self, v: VertexId) -> bool {
        self.branch_count[v] > 0 || self.pinned.contains(&v)
    }

    pub fn cover(&self) -> BTreeSet<VertexId> {
        let mut out = self.pinned.clone();
        out.extend(
            (0..self.branch_count.len()).filter(|&v| self.branch_count[v] > 0),
        );
        out
    }

    /// Per-forest branch sets, for auditing the per-tree 2-approximation.
    pub fn forest_branches(&self) -> Vec<(ForestId, BTreeSet<VertexId>)> {
        self.forests
            .iter()
            .map(|(&f, a)| (f, a.branch.clone()))
            .collect()
    }

    /// Apply one forest change; returns vertices whose cover membership
    /// turned on / off.
    pub fn update_adj(&mut self, change: &ForestChange) -> (Vec<VertexId>, Vec<VertexId>) {
        let forest = self
            .forests
            .entry(change.forest)
            .or_insert_with(|| ForestAdj::new(change.forest == ForestId::Residual));
        let (on, off) = forest.apply(
            change.added.map(|e| (e.id, e.u, e.v)),
            change.removed.map(|id| {
                // Look the endpoints up in the forest itself.
                let (u, v) = forest
                    .adj
                    .iter()
                    .find_map(|(&a, m)| m.get(&id).map(|&b| (a, b)))
                    .expect("removed edge must be in the forest");
                (id, u, v)
            }),
        );
        let mut turned_on = Vec::new();
        let mut turned_off = Vec::new();
        for v in on {
            self.branch_count[v] += 1;
            if self.branch_count[v] == 1 && !self.pinned.contains(&v) {
                turned_on.push(v);
            }
        }
        for v in off {
            self.branch_count[v] -= 1;
            if self.branch_count[v] == 0 && !self.pinned.contains(&v) {
                turned_off.push(v);
            }
        }
        (turned_on, turned_off)
    }
}

/// The full §-style maintenance state: sparsifier mirror, branch cover and
/// eliminated multigraph, kept consistent under sparsifier deltas.
#[derive(Debug)]
pub struct EliminationState {
    n: usize,
    mirror: DynamicGraph,
    cover: BranchVertexCover,
    in_cover: Vec<bool>,
    gvc: EliminatedGraph,
    /// Edits applied to the eliminated graph by the last delta.
    pub last_gvc_edits: usize,
}

impl EliminationState {
    pub fn new(n: usize, pinned: BTreeSet<VertexId>) -> Self {
        let mut state = Self {
            n,
            mirror: DynamicGraph::multigraph(n),
            cover: BranchVertexCover::new(n, pinned.clone()),
            in_cover: vec![false; n],
            gvc: EliminatedGraph::new(n),
            last_gvc_edits: 0,
        };
        for v in pinned {
            state.in_cover[v] = true;
        }
        state
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The sparsified graph the cover lives on.
    pub fn mirror(&self) -> &DynamicGraph {
        &self.mirror
    }

    pub fn gvc(&self) -> &EliminatedGraph {
        &self.gvc
    }

    pub fn cover(&self) -> BTreeSet<VertexId> {
        (0..self.n).filter(|&v| self.in_cover[v]).collect()
    }

    pub fn branch_cover(&self) -> &BranchVertexCover {
        &self.cover
    }

    pub fn in_cover(&self, v: VertexId) -> bool {
        self.in_cover[v]
    }

    /// Move `v` into the cover: its clique dissolves back into real edges.
    pub fn insert_vc(&mut self, v: VertexId) -> Result<()> {
        if self.in_cover[v] {
            return Err(Error::AlreadyInCover(v));
        }
        let removed = self.gvc.remove_clique(v)?;
        self.last_gvc_edits += removed.len();
        let incident: Vec<WeightedEdge> = self.mirror.incident(v).copied().collect();
        for e in incident {
            self.gvc.insert_plain(e)?;
            self.last_gvc_edits += 1;
        }
        self.in_cover[v] = true;
        Ok(())
    }

    /// Move `v` out of the cover: its star is eliminated into `K_v`.
    pub fn remove_vc(&mut self, v: VertexId) -> Result<()> {
        if !self.in_cover[v] {
            return Err(Error::InCover(v));
        }
        if self.cover.in_cover(v) {
            return Err(Error::BranchNonEmpty(v));
        }
        let incident: Vec<EdgeId> = self.mirror.incident(v).map(|e| e.id).collect();
        for id in incident {
            self.gvc.remove_plain(id)?;
            self.last_gvc_edits += 1;
        }
        for (u, w, wt) in build_kx(&self.mirror, v)
            .edges
            .into_iter()
            .map(|(u, w, wt)| (u, w, wt))
        {
            self.gvc.insert_clique_edge(v, u, w, wt)?;
            self.last_gvc_edits += 1;
        }
        self.in_cover[v] = false;
        Ok(())
    }

    fn ensure_cover(&mut self, v: VertexId) -> Result<()> {
        if !self.in_cover[v] {
            self.insert_vc(v)?;
        }
        Ok(())
    }

    /// Process everything one sparsifier update did: forest bookkeeping,
    /// cover churn and eliminated-graph edits. An edge can leave one
    /// forest and enter another within a single update, so all removals
    /// settle before any addition.
    pub fn apply_delta(&mut self, delta: &SparsifierDelta) -> Result<()> {
        self.last_gvc_edits = 0;
        let mut touched: BTreeSet<VertexId> = BTreeSet::new();
        for change in &delta.forest_changes {
            if let Some(id) = change.removed {
                let e = *self.mirror.edge(id).ok_or(Error::UnknownEdge(id))?;
                self.ensure_cover(e.u)?;
                self.ensure_cover(e.v)?;
                touched.extend([e.u, e.v]);
                let removal_only = ForestChange {
                    forest: change.forest,
                    added: None,
                    removed: Some(id),
                };
                let (on, off) = self.cover.update_adj(&removal_only);
                for b in on {
                    self.ensure_cover(b)?;
                }
                touched.extend(off);
                self.gvc.remove_plain(id)?;
                self.mirror.delete_edge(id)?;
                self.last_gvc_edits += 1;
            }
        }
        for change in &delta.forest_changes {
            if let Some(e) = change.added {
                self.ensure_cover(e.u)?;
                self.ensure_cover(e.v)?;
                touched.extend([e.u, e.v]);
                self.mirror.insert_edge_with_id(e)?;
                self.gvc.insert_plain(e)?;
                self.last_gvc_edits += 1;
                let addition_only = ForestChange {
                    forest: change.forest,
                    added: Some(e),
                    removed: None,
                };
                let (on, off) = self.cover.update_adj(&addition_only);
                for b in on {
                    self.ensure_cover(b)?;
                }
                touched.extend(off);
            }
        }
        // Re-eliminate every touched vertex that no longer needs covering.
        for v in touched {
            if self.in_cover[v] && !self.cover.in_cover(v) {
                self.remove_vc(v)?;
            }
        }
        Ok(())
    }

    /// Every mirror edge must have a cover endpoint; tags must reconstruct
    /// the mirror exactly.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for e in self.mirror.edges() {
            if !self.in_cover[e.u] && !self.in_cover[e.v] {
                return Err(format!("edge {} has no cover endpoint", e.id));
            }
        }
        // Re-expanding all stars must reconstruct the mirror.
        let cover: BTreeSet<VertexId> = self.cover();
        let expect = eliminate(&self.mirror, &cover).map_err(|e| e.to_string())?;
        let got = self.gvc.graph();
        if expect.m() != got.m() {
            return Err(format!("gvc size {} != rebuilt {}", got.m(), expect.m()));
        }
        // Plain edges match by id; clique edges by weight multiset.
        let plain = |g: &DynamicGraph| -> Vec<EdgeId> {
            g.edge_ids().filter(|&id| id < CLIQUE_ID_BASE).collect()
        };
        if plain(got) != plain(&expect) {
            return Err("plain edge mismatch".into());
        }
        let cliq = |g: &DynamicGraph| -> Vec<(VertexId, VertexId, u64)> {
            let mut v: Vec<(VertexId, VertexId, u64)> = g
                .edges()
                .filter(|e| e.id >= CLIQUE_ID_BASE)
                .map(|e| (e.u.min(e.v), e.u.max(e.v), e.weight.to_bits()))
                .collect();
            v.sort_unstable();
            v
        };
        if cliq(got) != cliq(&expect) {
            return Err("clique edge mismatch".into());
        }
        Ok(())
    }
}

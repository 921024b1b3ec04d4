//! Fully dynamic minimum spanning forest in the Holm–de Lichtenberg–Thorup
//! style: Euler tour forests per level, a level per edge, and a replacement
//! search that promotes the smaller side on deletion.
//!
//! Ties are broken by `(weight, edge id)`, so the maintained forest is the
//! unique canonical MSF and every update changes it by at most one edge in
//! and one edge out. The level structure obeys the size invariant (a
//! component at level `l` has at most `n / 2^l` vertices); the replacement
//! search scans candidates in increasing key order per level and keeps the
//! globally minimal crossing edge, demoting candidates left stranded above
//! the relink level.

use std::collections::{BTreeMap, BTreeSet};

use super::ett::EulerForest;
use crate::error::{Error, Result};
use crate::graph::{weight_order_bits, EdgeId, VertexId, Weight, WeightedEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForestMode {
    /// Minimum spanning forest.
    Min,
    /// Maximum spanning forest (minimum under negated weights).
    Max,
}

/// At most one edge enters and one edge leaves the forest per update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForestDelta {
    pub added: Option<EdgeId>,
    pub removed: Option<EdgeId>,
}

#[derive(Debug, Clone)]
struct MsfEdge {
    u: VertexId,
    v: VertexId,
    weight: Weight,
    key: u64,
    level: usize,
    tree: bool,
}

#[derive(Debug, Clone)]
pub struct MsfInstance {
    n: usize,
    mode: ForestMode,
    edges: BTreeMap<EdgeId, MsfEdge>,
    forests: Vec<EulerForest>,
    // Per level, per vertex: incident non-tree edges ordered by (key, id).
    nontree: Vec<Vec<BTreeSet<(u64, EdgeId)>>>,
    // Tree edges incident to each vertex (the level-0 forest).
    tree_adj: Vec<BTreeSet<EdgeId>>,
    tree_count: usize,
}

impl MsfInstance {
    pub fn new(n: usize, mode: ForestMode) -> Self {
        Self {
            n,
            mode,
            edges: BTreeMap::new(),
            forests: vec![EulerForest::new()],
            nontree: vec![vec![BTreeSet::new(); n]],
            tree_adj: vec![BTreeSet::new(); n],
            tree_count: 0,
        }
    }

    pub fn mode(&self) -> ForestMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn is_tree_edge(&self, id: EdgeId) -> bool {
        self.edges.get(&id).is_some_and(|e| e.tree)
    }

    pub fn edge_endpoints(&self, id: EdgeId) -> Option<(VertexId, VertexId, Weight)> {
        self.edges.get(&id).map(|e| (e.u, e.v, e.weight))
    }

    fn key_of(&self, w: Weight) -> u64 {
        match self.mode {
            ForestMode::Min => weight_order_bits(w),
            ForestMode::Max => weight_order_bits(-w),
        }
    }

    fn ensure_level(&mut self, level: usize) {
        while self.forests.len() <= level {
            self.forests.push(EulerForest::new());
            self.nontree.push(vec![BTreeSet::new(); self.n]);
        }
    }

    pub fn connected(&mut self, u: VertexId, v: VertexId) -> bool {
        self.forests[0].connected(u, v)
    }

    /// Ids of the current forest edges, in id order.
    pub fn forest_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, e)| e.tree)
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn forest_len(&self) -> usize {
        self.tree_count
    }

    pub fn forest_weight(&self) -> Weight {
        self.edges.values().filter(|e| e.tree).map(|e| e.weight).sum()
    }

    pub fn insert(&mut self, e: &WeightedEdge) -> Result<ForestDelta> {
        if self.edges.contains_key(&e.id) {
            return Err(Error::DuplicateEdge(e.id));
        }
        if e.u == e.v {
            return Err(Error::SelfLoop(e.u));
        }
        if e.u >= self.n || e.v >= self.n {
            return Err(Error::VertexOutOfRange(e.u.max(e.v), self.n));
        }
        let key = self.key_of(e.weight);
        if !self.forests[0].connected(e.u, e.v) {
            self.edges.insert(
                e.id,
                MsfEdge { u: e.u, v: e.v, weight: e.weight, key, level: 0, tree: true },
            );
            self.link_tree(e.id, e.u, e.v, 0);
            return Ok(ForestDelta { added: Some(e.id), removed: None });
        }
        // Cycle closed: compare against the heaviest key on the tree path.
        self.edges.insert(
            e.id,
            MsfEdge { u: e.u, v: e.v, weight: e.weight, key, level: 0, tree: false },
        );
        self.add_nontree(e.id, 0);
        let (worst_key, worst_id) = self.path_max(e.u, e.v);
        if (worst_key, worst_id) > (key, e.id) {
            // The new edge improves the forest; evict the path maximum.
            let delta = self.remove_tree_edge(worst_id, true);
            debug_assert_eq!(delta.added, Some(e.id));
            return Ok(ForestDelta { added: Some(e.id), removed: Some(worst_id) });
        }
        Ok(ForestDelta::default())
    }

    pub fn delete(&mut self, id: EdgeId) -> Result<ForestDelta> {
        let e = self.edges.get(&id).ok_or(Error::UnknownEdge(id))?;
        if !e.tree {
            let level = e.level;
            self.drop_nontree(id, level);
            self.edges.remove(&id);
            return Ok(ForestDelta::default());
        }
        let delta = self.remove_tree_edge(id, false);
        self.edges.remove(&id);
        Ok(ForestDelta { added: delta.added, removed: Some(id) })
    }

    fn add_nontree(&mut self, id: EdgeId, level: usize) {
        self.ensure_level(level);
        let e = &self.edges[&id];
        let entry = (e.key, id);
        let (u, v) = (e.u, e.v);
        self.nontree[level][u].insert(entry);
        self.nontree[level][v].insert(entry);
    }

    fn drop_nontree(&mut self, id: EdgeId, level: usize) {
        let e = &self.edges[&id];
        let entry = (e.key, id);
        let (u, v) = (e.u, e.v);
        self.nontree[level][u].remove(&entry);
        self.nontree[level][v].remove(&entry);
    }

    /// Link `id` as a tree edge present in forests 0..=level.
    fn link_tree(&mut self, id: EdgeId, u: VertexId, v: VertexId, level: usize) {
        self.ensure_level(level);
        for f in &mut self.forests[..=level] {
            f.link(id, u, v);
        }
        self.tree_adj[u].insert(id);
        self.tree_adj[v].insert(id);
        self.tree_count += 1;
    }

    /// Maximum `(key, id)` on the tree path between `u` and `v`.
    fn path_max(&mut self, u: VertexId, v: VertexId) -> (u64, EdgeId) {
        // BFS over tree adjacency; components are small enough at desk scale.
        let mut prev: BTreeMap<VertexId, EdgeId> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([u]);
        let mut seen: BTreeSet<VertexId> = [u].into();
        'bfs: while let Some(x) = queue.pop_front() {
            let ids: Vec<EdgeId> = self.tree_adj[x].iter().copied().collect();
            for id in ids {
                let e = &self.edges[&id];
                let y = if e.u == x { e.v } else { e.u };
                if seen.insert(y) {
                    prev.insert(y, id);
                    if y == v {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut best = (0u64, 0u64);
        let mut cur = v;
        while cur != u {
            let id = prev[&cur];
            let e = &self.edges[&id];
            best = best.max((e.key, id));
            cur = if e.u == cur { e.v } else { e.u };
        }
        best
    }

    /// Remove a tree edge and search for the minimal replacement across the
    /// cut it opens. With `keep`, the edge stays in the instance as a
    /// non-tree edge (used when an insertion evicts it).
    fn remove_tree_edge(&mut self, id: EdgeId, keep: bool) -> ForestDelta {
        let (u, v, e_level) = {
            let e = &self.edges[&id];
            (e.u, e.v, e.level)
        };
        for f in &mut self.forests[..=e_level] {
            f.cut(id);
        }
        self.tree_adj[u].remove(&id);
        self.tree_adj[v].remove(&id);
        self.tree_count -= 1;
        if keep {
            let e = self.edges.get_mut(&id).unwrap();
            e.tree = false;
            e.level = 0;
            self.add_nontree(id, 0);
        }

        let mut best: Option<(u64, EdgeId, usize)> = None;
        for level in (0..=e_level).rev() {
            // Promote the smaller side and scan its candidates.
            let side = if self.forests[level].component_size(u)
                <= self.forests[level].component_size(v)
            {
                u
            } else {
                v
            };
            let (verts, arcs) = self.forests[level].component(side);
            // Tree edges of exactly this level move one level down the
            // hierarchy (into the next, smaller forest).
            for t in arcs {
                if self.edges[&t].level == level {
                    let (tu, tv) = {
                        let te = &self.edges[&t];
                        (te.u, te.v)
                    };
                    self.edges.get_mut(&t).unwrap().level = level + 1;
                    self.ensure_level(level + 1);
                    self.forests[level + 1].link(t, tu, tv);
                }
            }
            let mut cands: BTreeSet<(u64, EdgeId)> = BTreeSet::new();
            for &x in &verts {
                cands.extend(self.nontree[level][x].iter().copied());
            }
            for (key, cid) in cands {
                let (a, b) = {
                    let ce = &self.edges[&cid];
                    (ce.u, ce.v)
                };
                if self.forests[level].connected(a, b) {
                    // Both endpoints on one side: promote, as examined in
                    // increasing key order.
                    self.drop_nontree(cid, level);
                    self.edges.get_mut(&cid).unwrap().level = level + 1;
                    self.add_nontree(cid, level + 1);
                } else {
                    // First crossing candidate at this level; the rest of
                    // the level is heavier.
                    if best.is_none_or(|(bk, bid, _)| (key, cid) < (bk, bid)) {
                        best = Some((key, cid, level));
                    }
                    break;
                }
            }
        }

        let Some((_, chosen, relink_level)) = best else {
            return ForestDelta::default();
        };
        // Crossing candidates above the relink level would be stranded with
        // disconnected endpoints in their own forest; demote them.
        for level in relink_level + 1..=e_level {
            let side = if self.forests[level].component_size(u)
                <= self.forests[level].component_size(v)
            {
                u
            } else {
                v
            };
            let (verts, _) = self.forests[level].component(side);
            let mut cands: BTreeSet<(u64, EdgeId)> = BTreeSet::new();
            for &x in &verts {
                cands.extend(self.nontree[level][x].iter().copied());
            }
            for (_, cid) in cands {
                let (a, b) = {
                    let ce = &self.edges[&cid];
                    (ce.u, ce.v)
                };
                if !self.forests[level].connected(a, b) {
                    self.drop_nontree(cid, level);
                    self.edges.get_mut(&cid).unwrap().level = relink_level;
                    self.add_nontree(cid, relink_level);
                }
            }
        }
        let (cu, cv) = {
            let ce = &self.edges[&chosen];
            (ce.u, ce.v)
        };
        self.drop_nontree(chosen, self.edges[&chosen].level);
        {
            let ce = self.edges.get_mut(&chosen).unwrap();
            ce.tree = true;
            ce.level = relink_level;
        }
        self.link_tree(chosen, cu, cv, relink_level);
        ForestDelta { added: Some(chosen), removed: None }
    }

    /// Walk the level structure and verify its invariants.
    pub fn audit_levels(&mut self) -> std::result::Result<(), String> {
        let max_level = self.forests.len() - 1;
        for level in 0..=max_level {
            // Forest content at this level matches edge records.
            let in_forest: BTreeSet<EdgeId> = self.forests[level].edge_ids().collect();
            let expected: BTreeSet<EdgeId> = self
                .edges
                .iter()
                .filter(|(_, e)| e.tree && e.level >= level)
                .map(|(&id, _)| id)
                .collect();
            if in_forest != expected {
                return Err(format!("forest {level} content mismatch"));
            }
            // Size invariant: components at level l have at most n / 2^l
            // vertices.
            if level > 0 {
                let bound = self.n / (1usize << level.min(63));
                let mut seen: BTreeSet<VertexId> = BTreeSet::new();
                for id in expected {
                    let u = self.edges[&id].u;
                    if seen.contains(&u) {
                        continue;
                    }
                    let (verts, _) = self.forests[level].component(u);
                    if verts.len() > bound {
                        return Err(format!(
                            "level {level} component of size {} exceeds {}",
                            verts.len(),
                            bound
                        ));
                    }
                    seen.extend(verts);
                }
            }
            // Non-tree edges at this level have connected endpoints.
            let at_level: Vec<EdgeId> = self
                .edges
                .iter()
                .filter(|(_, e)| !e.tree && e.level == level)
                .map(|(&id, _)| id)
                .collect();
            for id in at_level {
                let (a, b) = (self.edges[&id].u, self.edges[&id].v);
                if !self.forests[level].connected(a, b) {
                    return Err(format!("non-tree edge {id} stranded at level {level}"));
                }
            }
        }
        Ok(())
    }
}

//! t-bundle spanning forest maintenance.
//!
//! A bundle is a stack of `t` layers where layer `i` maintains a spanning
//! structure of the input minus the layers above it. Every input update
//! changes each layer by at most one edge, so at most one change escapes to
//! the residual graph below the bundle.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forest::{ForestMode, MsfInstance};
use crate::graph::{
    weight_class, ChangeSet, DynamicGraph, EdgeId, UpdateEvent, Weight, WeightedEdge,
};

/// How each layer certifies its stretch bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerMode {
    /// One maximum spanning forest per layer; every graph edge has a tree
    /// path of edges at least as heavy (stretch 1).
    Exact,
    /// One spanning forest per power-of-two weight class; path edges are
    /// within a factor 2 of the certified edge.
    Bucketed { gamma: Weight },
}

impl LayerMode {
    pub fn alpha(&self) -> f64 {
        match self {
            LayerMode::Exact => 1.0,
            LayerMode::Bucketed { .. } => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMstParams {
    pub alpha: f64,
    pub t: usize,
    pub gamma: Weight,
}

#[derive(Debug, Clone)]
struct Layer {
    // One forest per weight class; exact mode uses the single class 0.
    forests: BTreeMap<i32, MsfInstance>,
    class_of: BTreeMap<EdgeId, i32>,
}

impl Layer {
    fn new() -> Self {
        Self { forests: BTreeMap::new(), class_of: BTreeMap::new() }
    }
}

/// An edge change produced by one forest of one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestEvent {
    pub layer: usize,
    pub class: i32,
    pub added: Option<WeightedEdge>,
    pub removed: Option<EdgeId>,
}

#[derive(Debug, Clone)]
pub struct BundleChain {
    n: usize,
    mode: LayerMode,
    layers: Vec<Layer>,
    residual: DynamicGraph,
    input: DynamicGraph,
}

impl BundleChain {
    pub fn new(n: usize, t: usize, mode: LayerMode) -> Self {
        assert!(t >= 1);
        Self {
            n,
            mode,
            layers: (0..t).map(|_| Layer::new()).collect(),
            residual: DynamicGraph::multigraph(n),
            input: DynamicGraph::multigraph(n),
        }
    }

    pub fn t(&self) -> usize {
        self.layers.len()
    }

    pub fn mode(&self) -> LayerMode {
        self.mode
    }

    pub fn input(&self) -> &DynamicGraph {
        &self.input
    }

    /// The residual graph `G \ B` below all layers.
    pub fn residual(&self) -> &DynamicGraph {
        &self.residual
    }

    fn class_for(&self, w: Weight) -> Result<i32> {
        match self.mode {
            LayerMode::Exact => Ok(0),
            LayerMode::Bucketed { gamma } => weight_class(w, gamma),
        }
    }

    /// Apply one input update; returns the change to the residual graph
    /// (at most one edge in or out) and the per-forest changes.
    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<(ChangeSet, Vec<ForestEvent>)> {
        self.input.apply(ev)?;
        let mut events = Vec::new();
        let mut cur = Some(ev.clone());
        for li in 0..self.layers.len() {
            let Some(step) = cur.take() else { break };
            match step {
                UpdateEvent::Insert(e) => {
                    let class = self.class_for(e.weight)?;
                    let layer = &mut self.layers[li];
                    let forest = layer
                        .forests
                        .entry(class)
                        .or_insert_with(|| MsfInstance::new(self.n, ForestMode::Max));
                    layer.class_of.insert(e.id, class);
                    let delta = forest.insert(&e)?;
                    if delta.added == Some(e.id) {
                        events.push(ForestEvent {
                            layer: li,
                            class,
                            added: Some(e),
                            removed: delta.removed,
                        });
                        // An evicted edge joins the next layer's input.
                        cur = delta.removed.map(|f| {
                            let (u, v, w) = forest.edge_endpoints(f).unwrap();
                            UpdateEvent::insert(f, u, v, w)
                        });
                    } else {
                        // Not taken: the edge passes through unchanged.
                        cur = Some(UpdateEvent::Insert(e));
                    }
                }
                UpdateEvent::Delete(id) => {
                    let layer = &mut self.layers[li];
                    let &class = layer.class_of.get(&id).ok_or(Error::UnknownEdge(id))?;
                    let forest = layer.forests.get_mut(&class).unwrap();
                    let was_tree = forest.is_tree_edge(id);
                    let delta = forest.delete(id)?;
                    layer.class_of.remove(&id);
                    if was_tree {
                        let replacement = delta.added.map(|f| {
                            let (u, v, w) = forest.edge_endpoints(f).unwrap();
                            WeightedEdge::new(f, u, v, w)
                        });
                        events.push(ForestEvent {
                            layer: li,
                            class,
                            added: replacement,
                            removed: Some(id),
                        });
                        // The replacement edge leaves the next layer's
                        // input; the deleted edge never was in it.
                        cur = delta.added.map(UpdateEvent::Delete);
                    } else {
                        cur = Some(UpdateEvent::Delete(id));
                    }
                }
            }
        }
        let mut change = ChangeSet::default();
        if let Some(step) = cur {
            match step {
                UpdateEvent::Insert(e) => {
                    self.residual.insert_edge_with_id(e)?;
                    change.add(e);
                }
                UpdateEvent::Delete(id) => {
                    self.residual.delete_edge(id)?;
                    change.remove(id);
                }
            }
        }
        Ok((change, events))
    }

    /// Ids of all bundle edges (the disjoint union of the layer forests).
    pub fn bundle_edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for layer in &self.layers {
            for forest in layer.forests.values() {
                out.extend(forest.forest_edges());
            }
        }
        out.sort_unstable();
        out
    }

    /// Per-forest edge lists, keyed by (layer, class).
    pub fn forests(&self) -> Vec<((usize, i32), Vec<EdgeId>)> {
        let mut out = Vec::new();
        for (li, layer) in self.layers.iter().enumerate() {
            for (&class, forest) in &layer.forests {
                out.push(((li, class), forest.forest_edges()));
            }
        }
        out
    }

    pub fn params(&self) -> AlphaMstParams {
        AlphaMstParams {
            alpha: self.mode.alpha(),
            t: self.layers.len(),
            gamma: match self.mode {
                LayerMode::Exact => 1.0,
                LayerMode::Bucketed { gamma } => gamma,
            },
        }
    }
}

/// Check the α-MST property: every edge `(u, v)` of `g` has a `u`–`v` path
/// in `t_edges` whose edges `f` all satisfy `w(e) <= alpha * w(f)`.
pub fn alpha_mst_verify(t_edges: &[EdgeId], g: &DynamicGraph, alpha: f64) -> bool {
    let tree: Vec<&WeightedEdge> = t_edges.iter().filter_map(|&id| g.edge(id)).collect();
    if tree.len() != t_edges.len() {
        return false;
    }
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let r = find(dsu, dsu[x]);
            dsu[x] = r;
        }
        dsu[x]
    }
    for e in g.edges() {
        // Threshold connectivity: only path edges of weight >= w(e) / alpha
        // may be used.
        let floor = e.weight / alpha * (1.0 - 1e-12);
        let mut dsu: Vec<usize> = (0..g.n()).collect();
        for f in &tree {
            if f.weight >= floor {
                let (a, b) = (find(&mut dsu, f.u), find(&mut dsu, f.v));
                if a != b {
                    dsu[a] = b;
                }
            }
        }
        if find(&mut dsu, e.u) != find(&mut dsu, e.v) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::kruskal_max_forest;
    use crate::rng::SplitMix64;

    fn insert(chain: &mut BundleChain, id: EdgeId, u: usize, v: usize, w: f64) -> ChangeSet {
        chain.apply(&UpdateEvent::insert(id, u, v, w)).unwrap().0
    }

    #[test]
    fn first_edge_enters_layer_one() {
        let mut chain = BundleChain::new(4, 1, LayerMode::Exact);
        let delta = insert(&mut chain, 0, 0, 1, 1.0);
        assert!(delta.is_empty());
        assert_eq!(chain.bundle_edges(), vec![0]);
        assert_eq!(chain.residual().m(), 0);
    }

    #[test]
    fn non_improving_cycle_edge_reaches_residual() {
        let mut chain = BundleChain::new(3, 1, LayerMode::Exact);
        insert(&mut chain, 0, 0, 1, 2.0);
        insert(&mut chain, 1, 1, 2, 2.0);
        let delta = insert(&mut chain, 2, 0, 2, 1.0);
        assert_eq!(delta.added.len(), 1);
        assert_eq!(chain.residual().m(), 1);
        assert!(chain.residual().contains_edge(2));
    }

    #[test]
    fn k4_tree_delete_changes_residual_by_at_most_one() {
        let mut chain = BundleChain::new(4, 2, LayerMode::Exact);
        let mut id = 0;
        for u in 0..4 {
            for v in u + 1..4 {
                insert(&mut chain, id, u, v, 1.0 + (id % 3) as f64);
                id += 1;
            }
        }
        let victim = chain.bundle_edges()[0];
        let (delta, _) = chain.apply(&UpdateEvent::Delete(victim)).unwrap();
        assert!(delta.len() <= 1);
        // Replay from scratch and compare the full partition.
        let mut fresh = BundleChain::new(4, 2, LayerMode::Exact);
        for e in chain.input().edges() {
            fresh.apply(&UpdateEvent::Insert(*e)).unwrap();
        }
        assert_eq!(fresh.bundle_edges(), chain.bundle_edges());
    }

    #[test]
    fn bundle_edges_examples() {
        // A tree is fully absorbed by layer 1; layer 2 stays empty.
        let mut chain = BundleChain::new(4, 2, LayerMode::Exact);
        insert(&mut chain, 0, 0, 1, 1.0);
        insert(&mut chain, 1, 1, 2, 1.0);
        insert(&mut chain, 2, 2, 3, 1.0);
        assert_eq!(chain.bundle_edges(), vec![0, 1, 2]);
        let layer2: usize = chain
            .forests()
            .iter()
            .filter(|((l, _), _)| *l == 1)
            .map(|(_, es)| es.len())
            .sum();
        assert_eq!(layer2, 0);

        // Max-mode layer on the triangle (1,2,3) keeps {2,3}.
        let mut tri = BundleChain::new(3, 1, LayerMode::Exact);
        insert(&mut tri, 0, 0, 1, 1.0);
        insert(&mut tri, 1, 1, 2, 2.0);
        insert(&mut tri, 2, 0, 2, 3.0);
        assert_eq!(tri.bundle_edges(), vec![1, 2]);
        let oracle = kruskal_max_forest(tri.input());
        assert_eq!(tri.bundle_edges(), oracle.edge_ids().collect::<Vec<_>>());
    }

    #[test]
    fn alpha_mst_verify_examples() {
        let mut g = DynamicGraph::new(3);
        g.insert_edge(0, 1, 1.0).unwrap();
        g.insert_edge(1, 2, 2.0).unwrap();
        g.insert_edge(0, 2, 3.0).unwrap();
        let max_forest = kruskal_max_forest(&g);
        let ids: Vec<EdgeId> = max_forest.edge_ids().collect();
        assert!(alpha_mst_verify(&ids, &g, 1.0));
        assert!(!alpha_mst_verify(&[], &g, 10.0));
    }

    #[test]
    fn bucketed_layers_give_two_mst() {
        let mut rng = SplitMix64::new(9);
        let n = 10;
        let mut chain = BundleChain::new(n, 2, LayerMode::Bucketed { gamma: 1.0 });
        let mut id = 0;
        for _ in 0..40 {
            let u = rng.next_below(n as u64) as usize;
            let v = rng.next_below(n as u64) as usize;
            if u == v {
                continue;
            }
            let w = (1 + rng.next_below(15)) as f64;
            insert(&mut chain, id, u, v, w);
            id += 1;
        }
        // Layer 1 is a 2-MST of the whole input.
        let layer1: Vec<EdgeId> = chain
            .forests()
            .iter()
            .filter(|((l, _), _)| *l == 0)
            .flat_map(|(_, es)| es.clone())
            .collect();
        assert!(alpha_mst_verify(&layer1, chain.input(), 2.0));
    }

    #[test]
    fn partition_invariant_random_stream() {
        let mut rng = SplitMix64::new(4);
        let n = 12;
        let mut chain = BundleChain::new(n, 3, LayerMode::Exact);
        let mut live = Vec::new();
        let mut next = 0u64;
        for _ in 0..400 {
            if live.len() < 8 || (live.len() < 40 && rng.next_below(2) == 0) {
                let u = rng.next_below(n as u64) as usize;
                let v = rng.next_below(n as u64) as usize;
                if u == v {
                    continue;
                }
                let w = (1 + rng.next_below(9)) as f64;
                let ev = UpdateEvent::insert(next, u, v, w);
                live.push(next);
                next += 1;
                let (delta, _) = chain.apply(&ev).unwrap();
                assert!(delta.len() <= 1);
            } else {
                let k = rng.next_below(live.len() as u64) as usize;
                let id = live.swap_remove(k);
                let (delta, _) = chain.apply(&UpdateEvent::Delete(id)).unwrap();
                assert!(delta.len() <= 1);
            }
            // Layers plus residual partition the input exactly.
            let mut all = chain.bundle_edges();
            all.extend(chain.residual().edge_ids());
            all.sort_unstable();
            let input: Vec<EdgeId> = chain.input().edge_ids().collect();
            assert_eq!(all, input);
        }
    }
}

//! Dynamic cut sparsifier.
//!
//! Each level peels a t-bundle off its input and keeps a quarter of the
//! leftover edges at four times their weight; level `i + 1` runs on the
//! kept edges of level `i`. The sparsifier is the union of all bundles
//! plus the last level's kept edges, and is maintained explicitly as a
//! collection of forests.

use std::collections::BTreeMap;

use crate::bundle::{alpha_mst_verify, BundleChain, LayerMode};
use crate::error::{Error, Result};
use crate::graph::{ChangeSet, DynamicGraph, EdgeId, UpdateEvent, WeightedEdge};
use crate::rng::quarter_coin;

pub use crate::bundle::ForestEvent;

/// Bundle depth from the theory formula `t = C_xi c α log W log² n / ε²`,
/// with `log = log2` and the `log W` factor clamped to at least 1.
pub fn theory_cut_t(cxi: f64, c: f64, alpha: f64, w_ratio: f64, n: usize, eps: f64) -> usize {
    let log_w = w_ratio.log2().max(1.0);
    let log_n = (n.max(2) as f64).log2();
    (cxi * c * alpha * log_w * log_n * log_n / (eps * eps)).ceil().max(1.0) as usize
}

#[derive(Debug, Clone)]
pub struct CutConfig {
    pub epsilon: f64,
    pub rho: f64,
    /// Correctness-probability parameter; free in the analysis.
    pub c: f64,
    /// Unspecified absolute constant in the bundle-depth formula.
    pub cxi: f64,
    pub seed: u64,
    /// Practical-mode override for the bundle depth; `None` uses the
    /// theory formula against `w_ratio_hint`.
    pub t_override: Option<usize>,
    pub layer_mode: LayerMode,
    /// `W` used by the theory formula, fixed up front.
    pub w_ratio_hint: f64,
}

impl Default for CutConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            rho: 4.0,
            c: 1.0,
            cxi: 1.0,
            seed: 0,
            t_override: None,
            layer_mode: LayerMode::Exact,
            w_ratio_hint: 1.0,
        }
    }
}

impl CutConfig {
    pub fn bundle_t(&self, n: usize) -> usize {
        self.t_override.unwrap_or_else(|| {
            theory_cut_t(
                self.cxi,
                self.c,
                self.layer_mode.alpha(),
                self.w_ratio_hint,
                n,
                self.epsilon,
            )
        })
    }

    /// Number of chain levels for an initial edge count `m`.
    pub fn levels(&self, n: usize, m: usize) -> usize {
        let mut bound = self.rho;
        if m > 0 {
            bound = bound.min(m as f64 / ((self.c + 2.0) * (n.max(2) as f64).log2()));
        }
        if bound <= 1.0 {
            return 0;
        }
        bound.log2().ceil() as usize
    }
}

/// One level: a bundle plus the coin-kept residual edges at 4x weight.
#[derive(Debug, Clone)]
pub struct LightCutState {
    level: usize,
    seed: u64,
    bundle: BundleChain,
    sampled: DynamicGraph,
}

impl LightCutState {
    pub fn new(n: usize, level: usize, t: usize, mode: LayerMode, seed: u64) -> Self {
        Self {
            level,
            seed,
            bundle: BundleChain::new(n, t, mode),
            sampled: DynamicGraph::multigraph(n),
        }
    }

    pub fn bundle(&self) -> &BundleChain {
        &self.bundle
    }

    /// The kept residual edges `H' = G_level`, input to the next level.
    pub fn sampled(&self) -> &DynamicGraph {
        &self.sampled
    }

    /// Apply one update to this level. Returns the change to the kept set
    /// (at most one edge) and the forest changes inside the bundle.
    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<(ChangeSet, Vec<ForestEvent>)> {
        let (residual_delta, events) = self.bundle.apply(ev)?;
        let mut out = ChangeSet::default();
        for e in &residual_delta.added {
            // One coin per (seed, level, edge id); re-insertions re-derive
            // the same coin.
            if quarter_coin(self.seed, self.level as u64, e.id) {
                let mut kept = *e;
                kept.weight *= 4.0;
                self.sampled.insert_edge_with_id(kept)?;
                out.add(kept);
            }
        }
        for &id in &residual_delta.removed {
            if self.sampled.contains_edge(id) {
                self.sampled.delete_edge(id)?;
                out.remove(id);
            }
        }
        Ok((out, events))
    }
}

/// Stable identity of one maintained forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ForestId {
    Bundle { level: usize, layer: usize, class: i32 },
    /// The last level's kept edges; every edge is its own tree.
    Residual,
}

#[derive(Debug, Clone)]
pub struct ForestChange {
    pub forest: ForestId,
    pub added: Option<WeightedEdge>,
    pub removed: Option<EdgeId>,
}

/// Everything one input update did to the sparsifier.
#[derive(Debug, Clone, Default)]
pub struct SparsifierDelta {
    pub added: Vec<WeightedEdge>,
    pub removed: Vec<EdgeId>,
    pub forest_changes: Vec<ForestChange>,
    /// Updates delivered to each level's input (recourse; at most 1 each).
    pub per_level: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CutChain {
    n: usize,
    cfg: CutConfig,
    levels: Vec<LightCutState>,
    input: DynamicGraph,
    sparsifier: DynamicGraph,
}

impl CutChain {
    /// Chain over an initially empty graph.
    pub fn new(n: usize, cfg: CutConfig) -> Self {
        Self::with_initial_m(n, cfg, 0)
    }

    /// Chain whose level count is pinned against an initial edge count.
    pub fn with_initial_m(n: usize, cfg: CutConfig, m: usize) -> Self {
        let k = cfg.levels(n, m);
        let t = cfg.bundle_t(n);
        let levels = (0..k)
            .map(|i| LightCutState::new(n, i + 1, t, cfg.layer_mode, cfg.seed))
            .collect();
        Self {
            n,
            cfg,
            levels,
            input: DynamicGraph::multigraph(n),
            sparsifier: DynamicGraph::multigraph(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn config(&self) -> &CutConfig {
        &self.cfg
    }

    pub fn input(&self) -> &DynamicGraph {
        &self.input
    }

    /// The materialized sparsifier `H = B_1 ∪ … ∪ B_k ∪ G_k`.
    pub fn sparsifier(&self) -> &DynamicGraph {
        &self.sparsifier
    }

    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<SparsifierDelta> {
        self.input.apply(ev)?;
        let mut delta = SparsifierDelta {
            per_level: vec![0; self.levels.len()],
            ..Default::default()
        };
        if self.levels.is_empty() {
            // Degenerate chain: H = G exactly.
            match ev {
                UpdateEvent::Insert(e) => {
                    self.sparsifier.insert_edge_with_id(*e)?;
                    delta.added.push(*e);
                }
                UpdateEvent::Delete(id) => {
                    self.sparsifier.delete_edge(*id)?;
                    delta.removed.push(*id);
                }
            }
            return Ok(delta);
        }
        let mut h_added: Vec<WeightedEdge> = Vec::new();
        let mut h_removed: Vec<EdgeId> = Vec::new();
        let last = self.levels.len() - 1;
        let mut cur = Some(ev.clone());
        for li in 0..self.levels.len() {
            let Some(step) = cur.take() else { break };
            delta.per_level[li] += 1;
            let (kept_delta, events) = self.levels[li].apply(&step)?;
            debug_assert!(kept_delta.len() <= 1);
            for fe in events {
                let added = fe.added;
                let removed = fe.removed;
                if let Some(e) = added {
                    h_added.push(e);
                }
                if let Some(id) = removed {
                    h_removed.push(id);
                }
                delta.forest_changes.push(ForestChange {
                    forest: ForestId::Bundle { level: li, layer: fe.layer, class: fe.class },
                    added,
                    removed,
                });
            }
            if li == last {
                // The kept set of the last level is part of H.
                for e in &kept_delta.added {
                    h_added.push(*e);
                    delta.forest_changes.push(ForestChange {
                        forest: ForestId::Residual,
                        added: Some(*e),
                        removed: None,
                    });
                }
                for &id in &kept_delta.removed {
                    h_removed.push(id);
                    delta.forest_changes.push(ForestChange {
                        forest: ForestId::Residual,
                        added: None,
                        removed: Some(id),
                    });
                }
            } else {
                cur = match (kept_delta.added.first(), kept_delta.removed.first()) {
                    (Some(e), None) => Some(UpdateEvent::Insert(*e)),
                    (None, Some(&id)) => Some(UpdateEvent::Delete(id)),
                    (None, None) => None,
                    _ => unreachable!("kept delta has at most one change"),
                };
            }
        }
        // An edge can move between forests in one event; settle removals
        // before additions.
        for id in h_removed {
            self.sparsifier.delete_edge(id)?;
            delta.removed.push(id);
        }
        for e in h_added {
            self.sparsifier.insert_edge_with_id(e)?;
            delta.added.push(e);
        }
        Ok(delta)
    }

    /// The maintained partition of `H` into edge-disjoint forests. Kept
    /// residual edges are reported under [`ForestId::Residual`], each its
    /// own single-edge tree.
    pub fn forests(&self) -> Vec<(ForestId, Vec<EdgeId>)> {
        let mut out = Vec::new();
        for (li, level) in self.levels.iter().enumerate() {
            for ((layer, class), edges) in level.bundle.forests() {
                out.push((ForestId::Bundle { level: li, layer, class }, edges));
            }
        }
        if let Some(last) = self.levels.last() {
            out.push((ForestId::Residual, last.sampled.edge_ids().collect()));
        }
        out
    }

    /// Check every layer of every level against its own input graph.
    pub fn verify_alpha_layers(&self) -> bool {
        for level in &self.levels {
            let alpha = level.bundle.mode().alpha();
            // Layer 1 of the bundle must verify against the level input.
            let layer1: Vec<EdgeId> = level
                .bundle
                .forests()
                .into_iter()
                .filter(|((l, _), _)| *l == 0)
                .flat_map(|(_, es)| es)
                .collect();
            if !alpha_mst_verify(&layer1, level.bundle.input(), alpha) {
                return false;
            }
        }
        true
    }
}

/// Union of sparsifiers of an edge-partition; parts must use disjoint ids.
pub fn decompose_union(parts: &[&DynamicGraph]) -> Result<DynamicGraph> {
    let n = parts.first().map_or(0, |g| g.n());
    let mut out = DynamicGraph::multigraph(n);
    for part in parts {
        if part.n() != n {
            return Err(Error::VertexSetMismatch);
        }
        for e in part.edges() {
            out.insert_edge_with_id(*e).map_err(|err| match err {
                Error::DuplicateEdge(_) => Error::OverlappingParts,
                other => other,
            })?;
        }
    }
    Ok(out)
}

/// Two alternating chain instances covering arbitrarily long update
/// sequences: a growing side absorbs insertions while the shrinking side
/// migrates one edge per event, emptying within a phase of `n²` updates.
#[derive(Debug)]
pub struct BlendWrapper {
    n: usize,
    cfg: CutConfig,
    chains: [CutChain; 2],
    growing: usize,
    owner: BTreeMap<EdgeId, usize>,
    phase_len: usize,
    phase_pos: usize,
    restarts: u64,
    /// Updates delivered to each instance by the last event.
    pub last_deliveries: [usize; 2],
}

impl BlendWrapper {
    pub fn new(n: usize, cfg: CutConfig) -> Self {
        let chains = [CutChain::new(n, cfg.clone()), CutChain::new(n, cfg.clone())];
        Self {
            n,
            cfg,
            chains,
            growing: 0,
            owner: BTreeMap::new(),
            phase_len: n * n,
            phase_pos: 0,
            restarts: 0,
            last_deliveries: [0, 0],
        }
    }

    pub fn growing_side(&self) -> usize {
        self.growing
    }

    pub fn side(&self, idx: usize) -> &CutChain {
        &self.chains[idx]
    }

    pub fn phase_position(&self) -> usize {
        self.phase_pos
    }

    fn deliver(&mut self, side: usize, ev: &UpdateEvent) -> Result<()> {
        self.last_deliveries[side] += 1;
        self.chains[side].apply(ev)?;
        Ok(())
    }

    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<()> {
        self.last_deliveries = [0, 0];
        let growing = self.growing;
        let shrinking = 1 - growing;
        match ev {
            UpdateEvent::Insert(e) => {
                self.owner.insert(e.id, growing);
                self.deliver(growing, ev)?;
            }
            UpdateEvent::Delete(id) => {
                let side = self.owner.remove(id).ok_or(Error::UnknownEdge(*id))?;
                self.deliver(side, ev)?;
            }
        }
        // Migrate one edge from the shrinking side into the growing side.
        let migrant = self
            .chains[shrinking]
            .input()
            .edge_ids()
            .next()
            .map(|id| *self.chains[shrinking].input().edge(id).unwrap());
        if let Some(e) = migrant {
            self.deliver(shrinking, &UpdateEvent::Delete(e.id))?;
            self.deliver(growing, &UpdateEvent::Insert(e))?;
            self.owner.insert(e.id, growing);
        }
        self.phase_pos += 1;
        if self.phase_pos == self.phase_len {
            self.phase_pos = 0;
            debug_assert_eq!(self.chains[shrinking].input().m(), 0);
            self.restarts += 1;
            // Roles swap; the emptied side restarts with fresh coins and
            // begins growing.
            let mut cfg = self.cfg.clone();
            cfg.seed = self.cfg.seed.wrapping_add(self.restarts.wrapping_mul(0x9e37));
            self.chains[shrinking] = CutChain::new(self.n, cfg);
            self.growing = shrinking;
        }
        Ok(())
    }

    /// Union of both partial inputs; equals the tracked graph.
    pub fn union_input(&self) -> Result<DynamicGraph> {
        decompose_union(&[self.chains[0].input(), self.chains[1].input()])
    }

    /// The blended sparsifier.
    pub fn sparsifier(&self) -> Result<DynamicGraph> {
        decompose_union(&[self.chains[0].sparsifier(), self.chains[1].sparsifier()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::all_cuts_ratio;
    use crate::rng::SplitMix64;

    fn exact_cfg() -> CutConfig {
        CutConfig { t_override: Some(1_000_000), ..Default::default() }
    }

    #[test]
    fn level_count_examples() {
        let cfg = CutConfig { rho: 8.0, ..Default::default() };
        assert_eq!(cfg.levels(16, 0), 3);
        let cfg1 = CutConfig { rho: 1.0, ..Default::default() };
        assert_eq!(cfg1.levels(16, 0), 0);
    }

    #[test]
    fn coin_is_pure_function_of_seed_level_edge() {
        for id in 0..100u64 {
            assert_eq!(quarter_coin(3, 1, id), quarter_coin(3, 1, id));
        }
    }

    #[test]
    fn degenerate_t_keeps_h_equal_to_g() {
        let mut chain = CutChain::with_initial_m(8, exact_cfg(), 0);
        let mut rng = SplitMix64::new(1);
        let mut live = Vec::new();
        let mut next = 0u64;
        for _ in 0..300 {
            if live.len() < 4 || rng.next_below(2) == 0 {
                let (u, v) = (rng.next_below(8) as usize, rng.next_below(8) as usize);
                if u == v {
                    continue;
                }
                let ev = UpdateEvent::insert(next, u, v, 1.0 + rng.next_below(4) as f64);
                chain.apply(&ev).unwrap();
                live.push(next);
                next += 1;
            } else {
                let id = live.swap_remove(rng.next_below(live.len() as u64) as usize);
                chain.apply(&UpdateEvent::Delete(id)).unwrap();
            }
            // Every edge is absorbed by some bundle layer: H = G exactly,
            // edge for edge at original weights.
            let h: Vec<(EdgeId, f64)> =
                chain.sparsifier().edges().map(|e| (e.id, e.weight)).collect();
            let g: Vec<(EdgeId, f64)> = chain.input().edges().map(|e| (e.id, e.weight)).collect();
            assert_eq!(h, g);
        }
    }

    #[test]
    fn tree_input_is_never_sampled() {
        let cfg = CutConfig { t_override: Some(2), ..Default::default() };
        let mut chain = CutChain::new(6, cfg);
        for i in 0..5u64 {
            chain
                .apply(&UpdateEvent::insert(i, i as usize, i as usize + 1, 1.0))
                .unwrap();
        }
        let h: Vec<EdgeId> = chain.sparsifier().edge_ids().collect();
        assert_eq!(h, vec![0, 1, 2, 3, 4]);
        assert!(chain.verify_alpha_layers());
    }

    #[test]
    fn recourse_one_change_per_level() {
        let cfg = CutConfig { t_override: Some(2), rho: 16.0, ..Default::default() };
        let mut chain = CutChain::new(10, cfg);
        let mut rng = SplitMix64::new(7);
        let mut live = Vec::new();
        let mut next = 0u64;
        for _ in 0..500 {
            let delta = if live.len() < 10 || rng.next_below(2) == 0 {
                let (u, v) = (rng.next_below(10) as usize, rng.next_below(10) as usize);
                if u == v {
                    continue;
                }
                let ev = UpdateEvent::insert(next, u, v, 1.0);
                live.push(next);
                next += 1;
                chain.apply(&ev).unwrap()
            } else {
                let id = live.swap_remove(rng.next_below(live.len() as u64) as usize);
                chain.apply(&UpdateEvent::Delete(id)).unwrap()
            };
            assert!(delta.per_level.iter().all(|&c| c <= 1));
        }
    }

    #[test]
    fn forests_partition_h() {
        let cfg = CutConfig { t_override: Some(2), rho: 8.0, ..Default::default() };
        let mut chain = CutChain::new(10, cfg);
        let mut rng = SplitMix64::new(13);
        let mut next = 0u64;
        for _ in 0..200 {
            let (u, v) = (rng.next_below(10) as usize, rng.next_below(10) as usize);
            if u == v {
                continue;
            }
            chain.apply(&UpdateEvent::insert(next, u, v, 1.0)).unwrap();
            next += 1;
            let mut union: Vec<EdgeId> = Vec::new();
            for (_, edges) in chain.forests() {
                union.extend(edges);
            }
            union.sort_unstable();
            let h: Vec<EdgeId> = chain.sparsifier().edge_ids().collect();
            assert_eq!(union, h);
        }
    }

    #[test]
    fn decompose_union_examples() {
        let mut a = DynamicGraph::multigraph(4);
        a.insert_edge_with_id(WeightedEdge::new(0, 0, 1, 1.0)).unwrap();
        let mut b = DynamicGraph::multigraph(4);
        b.insert_edge_with_id(WeightedEdge::new(1, 2, 3, 2.0)).unwrap();
        let u = decompose_union(&[&a, &b]).unwrap();
        assert_eq!(u.m(), 2);

        // One part empty: identity.
        let empty = DynamicGraph::multigraph(4);
        let u2 = decompose_union(&[&a, &empty]).unwrap();
        assert_eq!(u2.m(), 1);

        // Overlapping ids rejected.
        let mut c = DynamicGraph::multigraph(4);
        c.insert_edge_with_id(WeightedEdge::new(0, 1, 2, 1.0)).unwrap();
        assert!(matches!(
            decompose_union(&[&a, &c]),
            Err(Error::OverlappingParts)
        ));

        // Exact copies of a partition: union is cut-exact.
        let g = decompose_union(&[&a, &b]).unwrap();
        let (lo, hi) = all_cuts_ratio(&g, &u).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
    }

    #[test]
    fn blend_wrapper_phase_discipline() {
        let n = 4;
        let mut w = BlendWrapper::new(n, exact_cfg());
        // Fresh wrapper: growing side empty, everything else too.
        assert_eq!(w.side(0).input().m() + w.side(1).input().m(), 0);
        let mut next = 0u64;
        let mut live = Vec::new();
        let mut rng = SplitMix64::new(3);
        for step in 0..3 * n * n {
            if live.len() < 3 || rng.next_below(2) == 0 {
                let (u, v) = (rng.next_below(n as u64) as usize, rng.next_below(n as u64) as usize);
                if u == v {
                    continue;
                }
                w.apply(&UpdateEvent::insert(next, u, v, 1.0)).unwrap();
                live.push(next);
                next += 1;
            } else {
                let id = live.swap_remove(rng.next_below(live.len() as u64) as usize);
                w.apply(&UpdateEvent::Delete(id)).unwrap();
            }
            assert!(w.last_deliveries.iter().all(|&d| d <= 2), "step {step}");
            // The two sides partition the tracked graph.
            let union = w.union_input().unwrap();
            assert_eq!(union.m(), live.len());
        }
        // At least one phase boundary was crossed.
        assert!(w.restarts >= 1);
    }
}

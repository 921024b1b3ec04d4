//! Decremental spectral sparsifier and its fully dynamic wrapper.
//!
//! A t-bundle of monotone spanners certifies a resistance bound for every
//! residual edge, which lets the residual be kept at rate 1/4 with weight
//! 4x. Chaining the construction halves the graph per level; a binary
//! insertion counter turns the decremental chain into a fully dynamic one.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{ChangeSet, DynamicGraph, EdgeId, UpdateEvent, WeightedEdge};
use crate::rng::quarter_coin;
use crate::spanner::{default_k, WeightClassSpanner};

/// Static bundle depth `t = ceil(12 (c+1) α ln(n) / ε²)`.
pub fn theory_spectral_t(c: f64, alpha: f64, eps: f64, ln_n: f64) -> usize {
    (12.0 * (c + 1.0) * alpha * ln_n / (eps * eps)).ceil().max(1.0) as usize
}

/// Dynamic bundle depth: the constant grows by 2 so the guarantee survives
/// a union bound over up to `n²` versions of the graph.
pub fn dynamic_theory_spectral_t(c: f64, alpha: f64, eps: f64, ln_n: f64) -> usize {
    theory_spectral_t(c + 2.0, alpha, eps, ln_n)
}

#[derive(Debug, Clone)]
pub struct SpectralConfig {
    pub epsilon: f64,
    pub rho: f64,
    pub c: f64,
    pub seed: u64,
    /// Practical-mode bundle depth; `None` derives the theory value from
    /// the realized spanner stretch.
    pub t_override: Option<usize>,
    /// Spanner parameter per layer; `None` uses `max(2, log2(n)/4)`.
    pub k_override: Option<usize>,
    /// Weight-class width for the weighted spanners.
    pub class_eps: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            rho: 4.0,
            c: 1.0,
            seed: 0,
            t_override: None,
            k_override: None,
            class_eps: 1.0,
        }
    }
}

impl SpectralConfig {
    pub fn spanner_k(&self, n: usize) -> usize {
        self.k_override.unwrap_or_else(|| default_k(n))
    }

    /// Realized stretch of one bundle layer, used as α in the certificate.
    pub fn alpha(&self, n: usize) -> f64 {
        (1.0 + self.class_eps) * (2 * self.spanner_k(n) - 1) as f64
    }

    pub fn bundle_t(&self, n: usize) -> usize {
        self.t_override.unwrap_or_else(|| {
            dynamic_theory_spectral_t(
                self.c,
                self.alpha(n),
                self.epsilon,
                (n.max(2) as f64).ln(),
            )
        })
    }

    pub fn levels(&self) -> usize {
        if self.rho <= 1.0 {
            0
        } else {
            self.rho.log2().ceil() as usize
        }
    }

    /// Init-time cutoff: levels stop once fewer than `(c+1) ln n` edges
    /// remain.
    pub fn cutoff(&self, n: usize) -> f64 {
        (self.c + 1.0) * (n.max(2) as f64).ln()
    }
}

/// Decremental t-bundle of monotone spanners; the residual `G \ B` only
/// ever shrinks.
#[derive(Debug)]
pub struct TBundleSpanner {
    n: usize,
    layers: Vec<WeightClassSpanner>,
    residual: DynamicGraph,
    input: DynamicGraph,
}

impl TBundleSpanner {
    pub fn new(g: &DynamicGraph, t: usize, k: usize, class_eps: f64, seed: u64) -> Result<Self> {
        let n = g.n();
        let gamma = g.w_min().unwrap_or(1.0);
        let mut remaining = g.clone();
        let mut layers = Vec::with_capacity(t);
        for j in 0..t {
            let layer = WeightClassSpanner::new(
                &remaining,
                k,
                class_eps,
                gamma,
                seed ^ (j as u64 + 1).wrapping_mul(0x9e3779b9),
            )?;
            for id in layer.spanner_edges() {
                remaining.delete_edge(id)?;
            }
            layers.push(layer);
        }
        Ok(Self { n, layers, residual: remaining, input: g.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input(&self) -> &DynamicGraph {
        &self.input
    }

    pub fn residual(&self) -> &DynamicGraph {
        &self.residual
    }

    /// All bundle edges with their weights.
    pub fn bundle_edges(&self) -> Vec<WeightedEdge> {
        let mut out = Vec::new();
        for layer in &self.layers {
            for id in layer.spanner_edges() {
                out.push(*self.input.edge(id).expect("bundle edge must be live"));
            }
        }
        out.sort_unstable_by_key(|e| e.id);
        out
    }

    /// Delete an input edge. Spanner layers may absorb fresh certificate
    /// edges from below, so the residual delta is removals only.
    pub fn delete(&mut self, id: EdgeId) -> Result<ChangeSet> {
        if !self.input.contains_edge(id) {
            return Err(Error::UnknownEdge(id));
        }
        self.input.delete_edge(id)?;
        let mut out = ChangeSet::default();
        // Deletions flowing into each layer's input; the true deletion
        // first, then absorptions from layers above.
        let mut deletions = vec![id];
        for layer in &mut self.layers {
            let mut next = Vec::new();
            for d in deletions {
                if layer.contains_edge_in_graph(d) {
                    let was_in_spanner = layer.contains(d);
                    let delta = layer.delete(d)?;
                    // Fresh spanner edges leave every deeper input.
                    next.extend(delta.added.iter().map(|e| e.id));
                    if !was_in_spanner {
                        next.push(d);
                    }
                } else {
                    // Not part of this layer's input; keep cascading.
                    next.push(d);
                }
            }
            deletions = next;
        }
        for d in deletions {
            if self.residual.contains_edge(d) {
                self.residual.delete_edge(d)?;
                out.remove(d);
            }
        }
        Ok(out)
    }
}

/// One chain level: bundle plus kept residual edges at 4x weight.
#[derive(Debug)]
pub struct LightSpectralState {
    level: usize,
    bundle: TBundleSpanner,
    sampled: DynamicGraph,
}

impl LightSpectralState {
    pub fn new(
        g: &DynamicGraph,
        level: usize,
        t: usize,
        k: usize,
        class_eps: f64,
        seed: u64,
    ) -> Result<Self> {
        let bundle = TBundleSpanner::new(g, t, k, class_eps, seed ^ (level as u64) << 8)?;
        let mut sampled = DynamicGraph::multigraph(g.n());
        for e in bundle.residual().edges() {
            if quarter_coin(seed, level as u64, e.id) {
                let mut kept = *e;
                kept.weight *= 4.0;
                sampled.insert_edge_with_id(kept)?;
            }
        }
        let _ = seed;
        Ok(Self { level, bundle, sampled })
    }

    pub fn bundle(&self) -> &TBundleSpanner {
        &self.bundle
    }

    /// The kept residual edges `G_level = H \ B`.
    pub fn sampled(&self) -> &DynamicGraph {
        &self.sampled
    }

    /// Level output `H = B ∪ H'`.
    pub fn output_edges(&self) -> Vec<WeightedEdge> {
        let mut out = self.bundle.bundle_edges();
        out.extend(self.sampled.edges().copied());
        out.sort_unstable_by_key(|e| e.id);
        out
    }

    /// Propagate a deletion; returns the removals from the kept set.
    pub fn delete(&mut self, id: EdgeId) -> Result<ChangeSet> {
        let _ = self.level;
        let residual_delta = self.bundle.delete(id)?;
        debug_assert!(residual_delta.added.is_empty());
        let mut out = ChangeSet::default();
        for &gone in &residual_delta.removed {
            if self.sampled.contains_edge(gone) {
                self.sampled.delete_edge(gone)?;
                out.remove(gone);
            }
        }
        Ok(out)
    }
}

/// Decremental k-level spectral sparsifier chain.
#[derive(Debug)]
pub struct SpectralChain {
    cfg: SpectralConfig,
    n: usize,
    levels: Vec<LightSpectralState>,
    input: DynamicGraph,
    current_h: BTreeMap<EdgeId, WeightedEdge>,
}

impl SpectralChain {
    pub fn new(g: &DynamicGraph, cfg: SpectralConfig) -> Result<Self> {
        let n = g.n();
        let k = cfg.levels();
        let t = cfg.bundle_t(n);
        let sk = cfg.spanner_k(n);
        let mut levels = Vec::new();
        let mut cur = g.clone();
        for li in 0..k {
            // Init-time cutoff on the remaining edge count.
            if li > 0 && (cur.m() as f64) < cfg.cutoff(n) {
                break;
            }
            let state =
                LightSpectralState::new(&cur, li + 1, t, sk, cfg.class_eps, cfg.seed)?;
            cur = state.sampled().clone();
            levels.push(state);
        }
        let mut chain = Self { cfg, n, levels, input: g.clone(), current_h: BTreeMap::new() };
        chain.current_h = chain.collect_h();
        Ok(chain)
    }

    fn collect_h(&self) -> BTreeMap<EdgeId, WeightedEdge> {
        let mut h = BTreeMap::new();
        match self.levels.last() {
            None => {
                for e in self.input.edges() {
                    h.insert(e.id, *e);
                }
            }
            Some(last) => {
                for level in &self.levels {
                    for e in level.bundle.bundle_edges() {
                        h.insert(e.id, e);
                    }
                }
                for e in last.sampled.edges() {
                    h.insert(e.id, *e);
                }
            }
        }
        h
    }

    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &SpectralConfig {
        &self.cfg
    }

    pub fn input(&self) -> &DynamicGraph {
        &self.input
    }

    /// Materialize `H = B_1 ∪ … ∪ B_k ∪ G_k`.
    pub fn sparsifier(&self) -> DynamicGraph {
        let mut h = DynamicGraph::multigraph(self.n);
        for e in self.current_h.values() {
            h.insert_edge_with_id(*e).unwrap();
        }
        h
    }

    pub fn delete(&mut self, id: EdgeId) -> Result<ChangeSet> {
        if !self.input.contains_edge(id) {
            return Err(Error::UnknownEdge(id));
        }
        self.input.delete_edge(id)?;
        let mut deletions = vec![id];
        for level in self.levels.iter_mut() {
            let mut next = Vec::new();
            for d in deletions {
                if !level.bundle.input().contains_edge(d) {
                    continue;
                }
                let delta = level.delete(d)?;
                next.extend(delta.removed);
            }
            deletions = next;
            if deletions.is_empty() {
                break;
            }
        }
        // Spanner absorptions can move edges between bundles and the kept
        // set; report the net change to H.
        let new_h = self.collect_h();
        let mut out = ChangeSet::default();
        // An edge that moved levels changes weight: it appears as a removal
        // plus an addition.
        for (&hid, he) in &self.current_h {
            match new_h.get(&hid) {
                Some(ne) if ne == he => {}
                _ => out.removed.push(hid),
            }
        }
        for (&hid, he) in &new_h {
            match self.current_h.get(&hid) {
                Some(oe) if oe == he => {}
                _ => out.added.push(*he),
            }
        }
        self.current_h = new_h;
        Ok(out)
    }
}

/// Fully dynamic wrapper: edge sets `E_1 … E_k` with one decremental chain
/// each and a binary counter of insertions. Inserting merges all sets
/// below the flipped bit and rebuilds that instance.
#[derive(Debug)]
pub struct FullyDynamicWrapper {
    cfg: SpectralConfig,
    n: usize,
    bits: u32,
    counter: u64,
    sets: Vec<BTreeMap<EdgeId, WeightedEdge>>,
    chains: Vec<Option<SpectralChain>>,
    rebuilds: u64,
}

impl FullyDynamicWrapper {
    pub fn new(n: usize, cfg: SpectralConfig) -> Self {
        let bits = (2.0 * (n.max(2) as f64).log2()).ceil() as u32;
        Self {
            cfg,
            n,
            bits,
            counter: 0,
            sets: vec![BTreeMap::new(); bits as usize + 1],
            chains: (0..bits as usize + 1).map(|_| None).collect(),
            rebuilds: 0,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// Current size of each `E_i` (1-based like the counter bits).
    pub fn set_sizes(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.len()).collect()
    }

    /// `|E_i| <= 2^i` for every i.
    pub fn counter_invariant_holds(&self) -> bool {
        self.sets
            .iter()
            .enumerate()
            .skip(1)
            .all(|(i, s)| s.len() as u128 <= 1u128 << i.min(127))
    }

    fn rebuild(&mut self, j: usize) -> Result<()> {
        let mut g = DynamicGraph::multigraph(self.n);
        for e in self.sets[j].values() {
            g.insert_edge_with_id(*e)?;
        }
        let mut cfg = self.cfg.clone();
        cfg.seed = self
            .cfg
            .seed
            .wrapping_add(self.rebuilds.wrapping_mul(0x9e3779b97f4a7c15))
            ^ j as u64;
        self.rebuilds += 1;
        self.chains[j] = if self.sets[j].is_empty() {
            None
        } else {
            Some(SpectralChain::new(&g, cfg)?)
        };
        Ok(())
    }

    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<()> {
        match ev {
            UpdateEvent::Insert(e) => {
                let old = self.counter;
                self.counter = (self.counter + 1) % (1u64 << self.bits);
                // Highest flipped bit, 1-based; a wrap merges everything
                // into the top set.
                let j = if self.counter == 0 {
                    self.bits as usize
                } else {
                    (64 - (old ^ self.counter).leading_zeros()) as usize
                };
                let mut merged: BTreeMap<EdgeId, WeightedEdge> = BTreeMap::new();
                for i in 1..=j.min(self.sets.len() - 1) {
                    merged.append(&mut self.sets[i]);
                    if i != j {
                        self.chains[i] = None;
                    }
                }
                merged.insert(e.id, *e);
                self.sets[j] = merged;
                self.rebuild(j)?;
            }
            UpdateEvent::Delete(id) => {
                let j = self
                    .sets
                    .iter()
                    .position(|s| s.contains_key(id))
                    .ok_or(Error::UnknownEdge(*id))?;
                self.sets[j].remove(id);
                if let Some(chain) = self.chains[j].as_mut() {
                    chain.delete(*id)?;
                }
            }
        }
        Ok(())
    }

    /// Union of the per-set sparsifiers (decomposability).
    pub fn sparsifier(&self) -> DynamicGraph {
        let mut h = DynamicGraph::multigraph(self.n);
        for chain in self.chains.iter().flatten() {
            for e in chain.sparsifier().edges() {
                h.insert_edge_with_id(*e).unwrap();
            }
        }
        h
    }

    /// Union of the tracked edge sets.
    pub fn graph(&self) -> DynamicGraph {
        let mut g = DynamicGraph::multigraph(self.n);
        for set in &self.sets {
            for e in set.values() {
                g.insert_edge_with_id(*e).unwrap();
            }
        }
        g
    }
}

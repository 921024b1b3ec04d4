//! Vertex sparsification of quasi-bipartite graphs.
//!
//! Stars of non-cover vertices are bucketed by their maximum edge weight
//! (light edges rerouted onto the heaviest neighbor), then each bucket is
//! shrunk by repeatedly packing one clique edge per star into t disjoint
//! forests — stars that pack are light and kept, the rest are provably
//! well-connected and can be half-sampled at doubled weight. The dynamic
//! star operations maintain the same structures under insertions and
//! removals with at most one recursive call per level.

use std::collections::{BTreeMap, BTreeSet};

use crate::elim::EliminatedGraph;
use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, VertexId, Weight};
use crate::rng::half_coin;

pub type Star = BTreeMap<VertexId, Weight>;

/// Clique pairs of a star over its distinct neighbors, in canonical order.
pub fn clique_pairs(star: &Star) -> Vec<(VertexId, VertexId)> {
    let nbrs: Vec<VertexId> = star.keys().copied().collect();
    let mut out = Vec::new();
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            out.push((nbrs[i], nbrs[j]));
        }
    }
    out
}

/// t disjoint forests over the cover, holding at most one clique edge per
/// star across all of them.
#[derive(Debug, Clone)]
pub struct TCliqueForest {
    t: usize,
    // star -> (forest index, packed pair)
    packed: BTreeMap<VertexId, (usize, VertexId, VertexId)>,
}

impl TCliqueForest {
    pub fn new(t: usize) -> Self {
        Self { t, packed: BTreeMap::new() }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn packed_edge(&self, x: VertexId) -> Option<(usize, VertexId, VertexId)> {
        self.packed.get(&x).copied()
    }

    pub fn forest_edges(&self, j: usize) -> Vec<(VertexId, VertexId, VertexId)> {
        self.packed
            .iter()
            .filter(|(_, &(f, _, _))| f == j)
            .map(|(&x, &(_, u, v))| (x, u, v))
            .collect()
    }

    fn roots(&self, j: usize) -> BTreeMap<VertexId, VertexId> {
        // Small union-find rebuilt per query; packing sets are tiny.
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        fn find(p: &mut BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
            let px = *p.get(&x).unwrap_or(&x);
            if px == x {
                return x;
            }
            let r = find(p, px);
            p.insert(x, r);
            r
        }
        for (_, &(f, u, v)) in self.packed.iter() {
            if f == j {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent.insert(ru, rv);
                }
            }
        }
        let mut out = BTreeMap::new();
        let keys: Vec<VertexId> = self
            .packed
            .iter()
            .filter(|(_, &(f, _, _))| f == j)
            .flat_map(|(_, &(_, u, v))| [u, v])
            .collect();
        for k in keys {
            let r = find(&mut parent, k);
            out.insert(k, r);
        }
        out
    }

    /// Whether `(u, v)` can join forest `j` without closing a cycle.
    pub fn addable(&self, j: usize, u: VertexId, v: VertexId) -> bool {
        let roots = self.roots(j);
        match (roots.get(&u), roots.get(&v)) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    }

    /// Pack the first addable pair of `x` into the first forest with room.
    pub fn try_pack(&mut self, x: VertexId, pairs: &[(VertexId, VertexId)]) -> bool {
        for j in 0..self.t {
            for &(u, v) in pairs {
                if self.addable(j, u, v) {
                    self.packed.insert(x, (j, u, v));
                    return true;
                }
            }
        }
        false
    }

    /// Remove `x`'s packed edge; returns the freed forest index.
    pub fn unpack(&mut self, x: VertexId) -> Option<usize> {
        self.packed.remove(&x).map(|(j, _, _)| j)
    }

    /// Invariants: per-forest acyclicity and one packed edge per star.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for j in 0..self.t {
            let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
            fn find(p: &mut BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
                let px = *p.get(&x).unwrap_or(&x);
                if px == x {
                    return x;
                }
                let r = find(p, px);
                p.insert(x, r);
                r
            }
            for (x, &(f, u, v)) in self.packed.iter() {
                if f != j {
                    continue;
                }
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    return Err(format!("forest {j} cycles at star {x}"));
                }
                parent.insert(ru, rv);
            }
        }
        Ok(())
    }
}

/// One sampling level of one bucket.
#[derive(Debug, Clone)]
pub struct SampleLevel {
    pub index: usize,
    pub stars: BTreeMap<VertexId, Star>,
    pub forest: TCliqueForest,
    // Heavy stars' clique pairs (the packing pool).
    pub pool: BTreeMap<VertexId, Vec<(VertexId, VertexId)>>,
}

impl SampleLevel {
    fn new(index: usize, t: usize) -> Self {
        Self {
            index,
            stars: BTreeMap::new(),
            forest: TCliqueForest::new(t),
            pool: BTreeMap::new(),
        }
    }

    pub fn light(&self) -> BTreeSet<VertexId> {
        self.stars
            .keys()
            .copied()
            .filter(|x| self.forest.packed_edge(*x).is_some())
            .collect()
    }

    pub fn heavy(&self) -> BTreeSet<VertexId> {
        self.pool.keys().copied().collect()
    }
}

/// Greedy pass-major light-vertex computation: forests are filled one
/// after the other, scanning stars in id order and clique pairs in
/// canonical order.
pub fn light_vertices(
    stars: &BTreeMap<VertexId, Star>,
    t: usize,
) -> (BTreeSet<VertexId>, TCliqueForest) {
    let mut forest = TCliqueForest::new(t);
    let mut light = BTreeSet::new();
    let mut remaining: BTreeMap<VertexId, Vec<(VertexId, VertexId)>> = stars
        .iter()
        .map(|(&x, s)| (x, clique_pairs(s)))
        .collect();
    for j in 0..t {
        let candidates: Vec<VertexId> = remaining.keys().copied().collect();
        for x in candidates {
            let pairs = &remaining[&x];
            let mut placed = None;
            for &(u, v) in pairs {
                if forest.addable(j, u, v) {
                    placed = Some((u, v));
                    break;
                }
            }
            if let Some((u, v)) = placed {
                forest.packed.insert(x, (j, u, v));
                light.insert(x);
                remaining.remove(&x);
            }
        }
    }
    (light, forest)
}

/// Fair-coin half sampling of the heavy stars at doubled weights.
pub fn sample_heavy(
    level: &SampleLevel,
    seed: u64,
    bucket: i32,
) -> BTreeMap<VertexId, Star> {
    let mut next = BTreeMap::new();
    for (&x, star) in &level.stars {
        if level.forest.packed_edge(x).is_some() {
            continue;
        }
        if half_coin(seed ^ (bucket as u64) << 32, level.index as u64, x as u64) {
            let doubled: Star = star.iter().map(|(&v, &w)| (v, 2.0 * w)).collect();
            next.insert(x, doubled);
        }
    }
    next
}

/// One bucket's level pipeline: levels `0 .. levels-1` pack and sample;
/// stars surviving past the last level are kept wholesale.
#[derive(Debug, Clone)]
pub struct BucketChain {
    bucket: i32,
    seed: u64,
    pub levels: Vec<SampleLevel>,
    pub terminal: BTreeMap<VertexId, Star>,
}

impl BucketChain {
    pub fn new(bucket: i32, t: usize, levels: usize, seed: u64) -> Self {
        Self {
            bucket,
            seed,
            levels: (0..levels).map(|i| SampleLevel::new(i, t)).collect(),
            terminal: BTreeMap::new(),
        }
    }

    fn coin(&self, level: usize, x: VertexId) -> bool {
        half_coin(self.seed ^ (self.bucket as u64) << 32, level as u64, x as u64)
    }

    /// Add the star of `x` at level `i`, cascading at most one recursive
    /// call per level.
    pub fn insert_star(&mut self, i: usize, x: VertexId, star: Star) -> Result<()> {
        if i == self.levels.len() {
            self.terminal.insert(x, star);
            return Ok(());
        }
        let level = &mut self.levels[i];
        if level.stars.contains_key(&x) {
            return Err(Error::DuplicateStar(x));
        }
        let pairs = clique_pairs(&star);
        level.stars.insert(x, star.clone());
        if level.forest.try_pack(x, &pairs) {
            return Ok(());
        }
        level.pool.insert(x, pairs);
        if self.coin(i, x) {
            let doubled: Star = star.iter().map(|(&v, &w)| (v, 2.0 * w)).collect();
            self.insert_star(i + 1, x, doubled)?;
        }
        Ok(())
    }

    /// Remove the star of `x` from level `i`. A freed forest slot may
    /// promote one heavy star to light, cascading its removal downstream.
    pub fn remove_star(&mut self, i: usize, x: VertexId) -> Result<()> {
        if i == self.levels.len() {
            self.terminal.remove(&x).ok_or(Error::UnknownStar(x))?;
            return Ok(());
        }
        let level = &mut self.levels[i];
        if level.stars.remove(&x).is_none() {
            return Err(Error::UnknownStar(x));
        }
        let was_heavy = level.pool.remove(&x).is_some();
        if was_heavy {
            if self.level_contains(i + 1, x) {
                self.remove_star(i + 1, x)?;
            }
            return Ok(());
        }
        let freed = self.levels[i].forest.unpack(x).expect("light star must be packed");
        // Promote the first pool edge that fits the freed forest.
        let mut promoted = None;
        'outer: for (&y, pairs) in self.levels[i].pool.iter() {
            for &(u, v) in pairs {
                if self.levels[i].forest.addable(freed, u, v) {
                    promoted = Some((y, u, v));
                    break 'outer;
                }
            }
        }
        if let Some((y, u, v)) = promoted {
            self.levels[i].pool.remove(&y);
            self.levels[i].forest.packed.insert(y, (freed, u, v));
            if self.level_contains(i + 1, y) {
                self.remove_star(i + 1, y)?;
            }
        }
        Ok(())
    }

    fn level_contains(&self, i: usize, x: VertexId) -> bool {
        if i == self.levels.len() {
            self.terminal.contains_key(&x)
        } else {
            self.levels[i].stars.contains_key(&x)
        }
    }

    /// Stars contributing to the sparsifier: every light star at its level
    /// weights plus the terminal survivors.
    pub fn output_stars(&self) -> Vec<(VertexId, &Star)> {
        let mut out = Vec::new();
        for level in &self.levels {
            for (&x, star) in &level.stars {
                if level.forest.packed_edge(x).is_some() {
                    out.push((x, star));
                }
            }
        }
        for (&x, star) in &self.terminal {
            out.push((x, star));
        }
        out
    }

    pub fn audit(&self) -> std::result::Result<(), String> {
        for level in &self.levels {
            level.forest.audit()?;
            // Pool and packed sets partition the level's stars.
            for x in level.stars.keys() {
                let packed = level.forest.packed_edge(*x).is_some();
                let pooled = level.pool.contains_key(x);
                if packed == pooled {
                    return Err(format!("star {x} is packed={packed} pooled={pooled}"));
                }
            }
            // Heavy pairs are spanned in every forest.
            for pairs in level.pool.values() {
                for &(u, v) in pairs {
                    for j in 0..level.forest.t() {
                        if level.forest.addable(j, u, v) {
                            return Err(format!(
                                "heavy pair ({u},{v}) not spanned in forest {j}"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VertexConfig {
    pub d: usize,
    pub epsilon: f64,
    pub t: usize,
    pub gamma: f64,
    pub levels: usize,
    pub seed: u64,
}

impl VertexConfig {
    pub fn practical(d: usize, epsilon: f64, t: usize, n: usize, seed: u64) -> Self {
        Self {
            d,
            epsilon,
            t,
            gamma: 1.0,
            levels: (2.0 * (n.max(2) as f64).log2()).ceil() as usize,
            seed,
        }
    }

    /// Bucket index `i` with `w ∈ (γ 2^{i-1}, γ 2^i]`.
    pub fn bucket_of(&self, w: Weight) -> i32 {
        let raw = (w / self.gamma).log2().ceil();
        let mut i = raw as i32;
        while self.gamma * (2f64).powi(i) < w {
            i += 1;
        }
        while i > i32::MIN && self.gamma * (2f64).powi(i - 1) >= w {
            i -= 1;
        }
        i
    }

    /// Reroute threshold for a star with maximum weight `w_max`.
    pub fn light_threshold(&self, w_max: Weight) -> Weight {
        self.epsilon / self.d as f64 * w_max
    }
}

/// Dynamically maintained vertex sparsifier: a tagged core multigraph plus
/// one bucket chain per weight bucket.
#[derive(Debug)]
pub struct VertexSparsifierState {
    cfg: VertexConfig,
    n: usize,
    core: EliminatedGraph,
    buckets: BTreeMap<i32, BucketChain>,
    star_home: BTreeMap<VertexId, (i32, VertexId)>,
}

impl VertexSparsifierState {
    pub fn new(n: usize, cfg: VertexConfig) -> Self {
        Self { cfg, n, core: EliminatedGraph::new(n), buckets: BTreeMap::new(), star_home: BTreeMap::new() }
    }

    pub fn config(&self) -> &VertexConfig {
        &self.cfg
    }

    /// The core multigraph `Ĝ \ X`.
    pub fn core(&self) -> &EliminatedGraph {
        &self.core
    }

    pub fn buckets(&self) -> impl Iterator<Item = (&i32, &BucketChain)> {
        self.buckets.iter()
    }

    pub fn bucket_of_star(&self, x: VertexId) -> Option<(i32, VertexId)> {
        self.star_home.get(&x).copied()
    }

    /// Insert or delete a cover-to-cover edge in the core.
    pub fn insert_plain(&mut self, e: crate::graph::WeightedEdge) -> Result<()> {
        self.core.insert_plain(e)
    }

    pub fn remove_plain(&mut self, id: crate::graph::EdgeId) -> Result<()> {
        self.core.remove_plain(id).map(|_| ())
    }

    /// Move `v` out of the cover: bucket its star, rerouting light edges
    /// onto the heaviest neighbor inside the core.
    pub fn insert_xg(&mut self, v: VertexId, star: &Star) -> Result<()> {
        if self.star_home.contains_key(&v) {
            return Err(Error::DuplicateStar(v));
        }
        // Step 1: its former cover-to-cover edges leave the core.
        let ids: Vec<crate::graph::EdgeId> = self
            .core
            .adj(v)
            .map(|&(_, _, id)| id)
            .collect();
        for id in ids {
            self.core.remove_plain(id)?;
        }
        if star.is_empty() {
            return Ok(());
        }
        if star.len() > self.cfg.d {
            return Err(Error::DegreeBound(v, self.cfg.d));
        }
        // Heaviest neighbor; ties toward the smaller vertex id.
        let (&x_max, &w_max) = star
            .iter()
            .max_by(|(a, wa), (b, wb)| wa.total_cmp(wb).then(b.cmp(a)))
            .unwrap();
        let bucket = self.cfg.bucket_of(w_max);
        let threshold = self.cfg.light_threshold(w_max);
        let mut kept: Star = BTreeMap::new();
        for (&u, &w) in star {
            if u != x_max && w < threshold {
                self.core.insert_clique_edge(v, u, x_max, w)?;
            } else {
                kept.insert(u, w);
            }
        }
        let chain = self.buckets.entry(bucket).or_insert_with(|| {
            BucketChain::new(bucket, self.cfg.t, self.cfg.levels, self.cfg.seed)
        });
        chain.insert_star(0, v, kept)?;
        self.star_home.insert(v, (bucket, x_max));
        Ok(())
    }

    /// Move `v` back into the cover; the caller re-adds its cover edges.
    pub fn remove_xg(&mut self, v: VertexId) -> Result<()> {
        let Some((bucket, _x_max)) = self.star_home.remove(&v) else {
            // No star: nothing was bucketed.
            return Ok(());
        };
        // Drop rerouted edges and the bucketed star.
        self.core.remove_clique(v)?;
        self.buckets
            .get_mut(&bucket)
            .ok_or(Error::UnknownStar(v))?
            .remove_star(0, v)?;
        Ok(())
    }

    /// Materialize the bucketing output `Ĝ` (core plus every level-0
    /// star), before any sampling.
    pub fn assemble_bucketed(&self) -> DynamicGraph {
        let mut h = DynamicGraph::multigraph(self.n);
        for e in self.core.graph().edges() {
            h.insert_edge(e.u, e.v, e.weight).unwrap();
        }
        for chain in self.buckets.values() {
            if let Some(level0) = chain.levels.first() {
                for (&x, star) in &level0.stars {
                    for (&u, &w) in star {
                        h.insert_edge(x, u, w).unwrap();
                    }
                }
            } else {
                for (&x, star) in &chain.terminal {
                    for (&u, &w) in star {
                        h.insert_edge(x, u, w).unwrap();
                    }
                }
            }
        }
        h
    }

    /// Materialize the sparsifier `H`.
    pub fn assemble(&self) -> DynamicGraph {
        let mut h = DynamicGraph::multigraph(self.n);
        for e in self.core.graph().edges() {
            h.insert_edge(e.u, e.v, e.weight).unwrap();
        }
        for chain in self.buckets.values() {
            for (x, star) in chain.output_stars() {
                for (&u, &w) in star {
                    h.insert_edge(x, u, w).unwrap();
                }
            }
        }
        h
    }

    pub fn audit(&self) -> std::result::Result<(), String> {
        for chain in self.buckets.values() {
            chain.audit()?;
        }
        Ok(())
    }
}

/// Static bucketing of a quasi-bipartite graph (its star side), matching
/// the dynamic maintenance exactly.
pub fn vertex_bucketing(
    g: &DynamicGraph,
    cover: &BTreeSet<VertexId>,
    cfg: &VertexConfig,
) -> Result<VertexSparsifierState> {
    let mut state = VertexSparsifierState::new(g.n(), cfg.clone());
    for e in g.edges() {
        match (cover.contains(&e.u), cover.contains(&e.v)) {
            (true, true) => state.insert_plain(*e)?,
            (false, false) => return Err(Error::NotACover(e.u)),
            _ => {}
        }
    }
    for x in 0..g.n() {
        if !cover.contains(&x) && g.degree(x) > 0 {
            state.insert_xg(x, &g.neighbor_weights(x))?;
        }
    }
    Ok(state)
}

/// Static bounded-weight vertex sparsification of a bipartite star set:
/// identical to inserting the stars through the dynamic pipeline in id
/// order.
pub fn bounded_vertex_sparsify(
    stars: &BTreeMap<VertexId, Star>,
    t: usize,
    levels: usize,
    seed: u64,
) -> Result<BucketChain> {
    let mut chain = BucketChain::new(0, t, levels, seed);
    for (&x, star) in stars {
        chain.insert_star(0, x, star.clone())?;
    }
    Ok(chain)
}

/// Full static pipeline: bucket with error ε/2, then sparsify each bucket.
pub fn vertex_sparsify(
    g: &DynamicGraph,
    cover: &BTreeSet<VertexId>,
    cfg: &VertexConfig,
) -> Result<VertexSparsifierState> {
    // Bucketing splits the error budget in half with the per-bucket
    // sampling; both halves live in the shared config.
    vertex_bucketing(g, cover, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{local_connectivity, min_extension_weight, terminal_cut_ratio};
    use crate::rng::SplitMix64;

    fn star(entries: &[(VertexId, f64)]) -> Star {
        entries.iter().copied().collect()
    }

    fn cfg(d: usize, eps: f64, t: usize) -> VertexConfig {
        VertexConfig { d, epsilon: eps, t, gamma: 1.0, levels: 6, seed: 42 }
    }

    #[test]
    fn bucketing_reroutes_light_edges() {
        // d=2, ε=1, star (8, 3): threshold 4 > 3, so the light edge is
        // rerouted onto x_max and the star sits in bucket 3.
        let mut g = DynamicGraph::multigraph(3);
        g.insert_edge(2, 0, 8.0).unwrap();
        g.insert_edge(2, 1, 3.0).unwrap();
        let cover: BTreeSet<usize> = [0, 1].into();
        let c = cfg(2, 1.0, 2);
        assert_eq!(c.bucket_of(8.0), 3);
        let state = vertex_bucketing(&g, &cover, &c).unwrap();
        assert_eq!(state.bucket_of_star(2), Some((3, 0)));
        // Rerouted edge (1, 0) tagged by star 2 sits in the core.
        let core: Vec<(usize, usize, f64)> = state
            .core()
            .graph()
            .edges()
            .map(|e| (e.u.min(e.v), e.u.max(e.v), e.weight))
            .collect();
        assert_eq!(core, vec![(0, 1, 3.0)]);
        // The kept star is just the heavy edge.
        let chain = &state.buckets[&3];
        assert_eq!(chain.levels[0].stars[&2], star(&[(0, 8.0)]));
    }

    #[test]
    fn equal_weights_reroute_nothing() {
        let mut g = DynamicGraph::multigraph(4);
        g.insert_edge(3, 0, 2.0).unwrap();
        g.insert_edge(3, 1, 2.0).unwrap();
        g.insert_edge(3, 2, 2.0).unwrap();
        let cover: BTreeSet<usize> = [0, 1, 2].into();
        let state = vertex_bucketing(&g, &cover, &cfg(3, 0.5, 2)).unwrap();
        assert_eq!(state.core().graph().m(), 0);
        assert_eq!(state.buckets[&1].levels[0].stars[&3].len(), 3);
    }

    #[test]
    fn bucketed_graph_preserves_cuts() {
        // All cuts of the bucketed graph within (1 ± ε) of the original.
        for seed in 0..20u64 {
            let mut rng = SplitMix64::new(seed);
            let n = 8;
            let cover: BTreeSet<usize> = [0, 1, 2, 3].into();
            let mut g = DynamicGraph::multigraph(n);
            for x in 4..n {
                let deg = 1 + rng.next_below(3) as usize;
                for _ in 0..deg {
                    let u = rng.next_below(4) as usize;
                    let w = (1 + rng.next_below(31)) as f64;
                    if g.neighbor_weights(x).len() < 3 && !g.neighbor_weights(x).contains_key(&u) {
                        g.insert_edge(x, u, w).unwrap();
                    }
                }
            }
            g.insert_edge(0, 1, 3.0).unwrap();
            let eps = 0.5;
            let state = vertex_bucketing(&g, &cover, &cfg(3, eps, 4)).unwrap();
            // Compare cuts of G and the deterministic bucketing output Ĝ
            // (before any sampling).
            let ghat = state.assemble_bucketed();
            for bits in 1u32..(1 << n) - 1 {
                let s: BTreeSet<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
                let a = g.cut_weight(&s);
                let b = ghat.cut_weight(&s);
                assert!(
                    b <= (1.0 + eps) * a + 1e-9 && b >= (1.0 - eps) * a - 1e-9,
                    "seed {seed}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn light_vertices_basics() {
        // A single star is light in pass 1.
        let stars: BTreeMap<VertexId, Star> =
            [(5, star(&[(0, 1.0), (1, 1.0)]))].into_iter().collect();
        let (light, forest) = light_vertices(&stars, 2);
        assert!(light.contains(&5));
        forest.audit().unwrap();

        // t >= |X|: everything light.
        let stars: BTreeMap<VertexId, Star> = (4..9)
            .map(|x| (x, star(&[(0, 1.0), (1, 1.0)])))
            .collect();
        let (light, _) = light_vertices(&stars, 5);
        assert_eq!(light.len(), 5);
    }

    #[test]
    fn pass_major_equals_star_major_insertion() {
        // The static greedy equals inserting stars in id order through the
        // dynamic pipeline with packing disabled downstream.
        for seed in 0..30u64 {
            let mut rng = SplitMix64::new(seed ^ 0xf00);
            let vc = 5usize;
            let mut stars: BTreeMap<VertexId, Star> = BTreeMap::new();
            for x in vc..vc + 2 + rng.next_below(8) as usize {
                let mut s = Star::new();
                for _ in 0..2 + rng.next_below(3) {
                    s.insert(rng.next_below(vc as u64) as usize, 1.0);
                }
                if s.len() >= 2 {
                    stars.insert(x, s);
                }
            }
            let t = 1 + rng.next_below(3) as usize;
            let (light, forest) = light_vertices(&stars, t);
            let mut chain = BucketChain::new(0, t, 1, seed);
            for (&x, s) in &stars {
                chain.insert_star(0, x, s.clone()).unwrap();
            }
            assert_eq!(chain.levels[0].light(), light, "seed {seed}");
            for x in &light {
                assert_eq!(
                    chain.levels[0].forest.packed_edge(*x),
                    forest.packed_edge(*x),
                    "seed {seed} star {x}"
                );
            }
        }
    }

    #[test]
    fn heavy_pairs_are_well_connected() {
        // Heaviness certificate: for every heavy x and pair (u,v) of K_x,
        // the cover min-cut of the heavy clique union is at least the
        // per-edge floor times t.
        for seed in 0..10u64 {
            let mut rng = SplitMix64::new(seed ^ 0xbead);
            let vc = 4usize;
            let mut stars: BTreeMap<VertexId, Star> = BTreeMap::new();
            for x in vc..vc + 8 {
                let mut s = Star::new();
                for u in 0..vc {
                    if rng.next_below(2) == 0 {
                        s.insert(u, 1.0);
                    }
                }
                if s.len() >= 2 {
                    stars.insert(x, s);
                }
            }
            let t = 2;
            let (light, _forest) = light_vertices(&stars, t);
            // Build the heavy clique union.
            let mut gvc = DynamicGraph::multigraph(vc);
            let mut any = false;
            for (&x, s) in &stars {
                if light.contains(&x) {
                    continue;
                }
                any = true;
                let total: f64 = s.values().sum();
                let nbrs: Vec<(VertexId, f64)> = s.iter().map(|(&v, &w)| (v, w)).collect();
                for i in 0..nbrs.len() {
                    for j in i + 1..nbrs.len() {
                        gvc.insert_edge(nbrs[i].0, nbrs[j].0, nbrs[i].1 * nbrs[j].1 / total)
                            .unwrap();
                    }
                }
            }
            if !any {
                continue;
            }
            // d <= 4, U = 1, γ = min clique weight floor 1/d.
            let d = 4.0;
            let floor = 1.0 / d * t as f64;
            for (&x, s) in &stars {
                if light.contains(&x) {
                    continue;
                }
                let nbrs: Vec<VertexId> = s.keys().copied().collect();
                for i in 0..nbrs.len() {
                    for j in i + 1..nbrs.len() {
                        let lam = local_connectivity(&gvc, nbrs[i], nbrs[j]);
                        assert!(lam >= floor - 1e-9, "seed {seed}: {lam} < {floor}");
                    }
                }
            }
        }
    }

    #[test]
    fn sample_heavy_expectation_preserved() {
        // E[Δ_{sampled ∪ light}(S)] = Δ_G(S) for a fixed cover cut.
        let vc = 5usize;
        let mut stars: BTreeMap<VertexId, Star> = BTreeMap::new();
        let mut rng = SplitMix64::new(99);
        for x in vc..vc + 10 {
            let mut s = Star::new();
            for u in 0..vc {
                if rng.next_below(2) == 0 {
                    s.insert(u, (1 + rng.next_below(4)) as f64);
                }
            }
            if s.len() >= 2 {
                stars.insert(x, s);
            }
        }
        let (light, forest) = light_vertices(&stars, 1);
        let level = SampleLevel {
            index: 0,
            stars: stars.clone(),
            forest,
            pool: stars
                .iter()
                .filter(|(x, _)| !light.contains(x))
                .map(|(&x, s)| (x, clique_pairs(s)))
                .collect(),
        };
        let s_cut: BTreeSet<usize> = [0, 2].into();
        let full = |subset: &BTreeMap<VertexId, Star>| -> f64 {
            // Minimal extension value of the star set against the cut.
            subset
                .values()
                .map(|star| {
                    let to_s: f64 = star
                        .iter()
                        .filter(|(v, _)| s_cut.contains(v))
                        .map(|(_, w)| w)
                        .sum();
                    let away: f64 = star
                        .iter()
                        .filter(|(v, _)| !s_cut.contains(v))
                        .map(|(_, w)| w)
                        .sum();
                    to_s.min(away)
                })
                .sum()
        };
        let target = full(&stars);
        let trials = 4000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for trial in 0..trials {
            let mut kept: BTreeMap<VertexId, Star> = stars
                .iter()
                .filter(|(x, _)| light.contains(x))
                .map(|(&x, s)| (x, s.clone()))
                .collect();
            kept.extend(sample_heavy(&level, trial as u64, 0));
            let v = full(&kept);
            sum += v;
            sq += v * v;
        }
        let mean = sum / trials as f64;
        let var = (sq / trials as f64 - mean * mean).max(0.0);
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - target).abs() <= 3.0 * se.max(1e-6),
            "mean {mean} target {target} se {se}"
        );
    }

    #[test]
    fn kept_star_weights_double() {
        let mut chain = BucketChain::new(0, 1, 3, 7);
        // Two stars over the same pair: the second stays heavy.
        chain.insert_star(0, 10, star(&[(0, 1.0), (1, 1.0)])).unwrap();
        chain.insert_star(0, 11, star(&[(0, 1.0), (1, 1.0)])).unwrap();
        assert!(chain.levels[0].heavy().contains(&11));
        if chain.level_contains(1, 11) {
            assert_eq!(chain.levels[1].stars[&11], star(&[(0, 2.0), (1, 2.0)]));
        }
    }

    #[test]
    fn lifo_removals_match_arrival_order_rebuild() {
        // Insertions with stack-discipline removals replay to exactly the
        // state of re-inserting the survivors in arrival order.
        for seed in 0..25u64 {
            let mut rng = SplitMix64::new(seed ^ 0x7777);
            let vc = 4usize;
            let t = 1 + rng.next_below(2) as usize;
            let mut chain = BucketChain::new(0, t, 4, seed);
            let mut stack: Vec<(VertexId, Star)> = Vec::new();
            let mut next_star = vc;
            for _ in 0..60 {
                if stack.is_empty() || rng.next_below(3) > 0 {
                    let mut s = Star::new();
                    for u in 0..vc {
                        if rng.next_below(2) == 0 {
                            s.insert(u, (1 + rng.next_below(3)) as f64);
                        }
                    }
                    if s.len() < 2 {
                        continue;
                    }
                    chain.insert_star(0, next_star, s.clone()).unwrap();
                    stack.push((next_star, s));
                    next_star += 1;
                } else {
                    let (x, _) = stack.pop().unwrap();
                    chain.remove_star(0, x).unwrap();
                }
                chain.audit().unwrap();
                // Arrival-order rebuild with the same coins.
                let mut rebuilt = BucketChain::new(0, t, 4, seed);
                for (x, s) in &stack {
                    rebuilt.insert_star(0, *x, s.clone()).unwrap();
                }
                for (lvl, (a, b)) in chain.levels.iter().zip(rebuilt.levels.iter()).enumerate() {
                    assert_eq!(a.stars, b.stars, "seed {seed} level {lvl}");
                    assert_eq!(a.pool, b.pool, "seed {seed} level {lvl}");
                    assert_eq!(a.forest.packed, b.forest.packed, "seed {seed} level {lvl}");
                }
                assert_eq!(chain.terminal, rebuilt.terminal, "seed {seed}");
            }
        }
    }

    #[test]
    fn terminal_cuts_preserved_on_bounded_instances() {
        let mut pass = 0;
        let total = 40;
        for seed in 0..total {
            let mut rng = SplitMix64::new(seed ^ 0x1234);
            let n = 10;
            let vc_size = 4;
            let cover: BTreeSet<usize> = (0..vc_size).collect();
            let mut g = DynamicGraph::multigraph(n);
            for x in vc_size..n {
                for u in 0..vc_size {
                    if rng.next_below(3) > 0 {
                        g.insert_edge(x, u, (1 + rng.next_below(2)) as f64).unwrap();
                    }
                }
            }
            let c = VertexConfig { d: 4, epsilon: 0.5, t: 3, gamma: 1.0, levels: 6, seed };
            let state = vertex_sparsify(&g, &cover, &c).unwrap();
            state.audit().unwrap();
            let h = state.assemble();
            let (lo, hi) = terminal_cut_ratio(&g, &h, &cover).unwrap();
            if lo >= 1.0 - c.epsilon - 1e-9 && hi <= 1.0 + c.epsilon + 1e-9 {
                pass += 1;
            }
        }
        assert!(pass * 10 >= total * 9, "only {pass}/{total} seeds passed");
    }

    #[test]
    fn insert_remove_xg_roundtrip() {
        let c = cfg(3, 1.0, 2);
        let mut state = VertexSparsifierState::new(6, c);
        // Isolated vertex: no-op both ways.
        state.insert_xg(5, &Star::new()).unwrap();
        state.remove_xg(5).unwrap();

        let s = star(&[(0, 8.0), (1, 3.0)]);
        state.insert_xg(4, &s).unwrap();
        let before = state.assemble();
        state.remove_xg(4).unwrap();
        state.insert_xg(4, &s).unwrap();
        let after = state.assemble();
        let canon = |g: &DynamicGraph| {
            let mut v: Vec<(usize, usize, u64)> = g
                .edges()
                .map(|e| (e.u.min(e.v), e.u.max(e.v), e.weight.to_bits()))
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(canon(&before), canon(&after));
    }

    #[test]
    fn min_extension_consistency_of_assembled_h() {
        // X = ∅ gives an empty star side: H equals the core.
        let c = cfg(3, 0.5, 2);
        let mut g = DynamicGraph::multigraph(4);
        g.insert_edge(0, 1, 2.0).unwrap();
        g.insert_edge(1, 2, 1.0).unwrap();
        let cover: BTreeSet<usize> = [0, 1, 2, 3].into();
        let state = vertex_bucketing(&g, &cover, &c).unwrap();
        let h = state.assemble();
        let s: BTreeSet<usize> = [0].into();
        assert_eq!(
            min_extension_weight(&h, &cover, &s).unwrap(),
            min_extension_weight(&g, &cover, &s).unwrap()
        );
    }
}

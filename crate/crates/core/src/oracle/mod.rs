//! Brute-force ground truth.
//!
//! Everything here is pure, deterministic and deliberately unscalable: cut
//! enumeration, dense Laplacian algebra, exact max-flow, exact vertex
//! covers. The dynamic structures in the rest of the crate are verified
//! against these oracles at desk scale.

mod flow;
mod linalg;

pub use flow::{exact_min_st_cut, local_connectivity, max_flow, Dinic};
pub use linalg::{cholesky_solve, jacobi_eigenvalues, solve_linear};

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, EdgeId, VertexId, Weight};

/// Worst-case check result for one property on one instance.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub property: &'static str,
    pub instance: String,
    pub worst_ratio: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(property: &'static str, instance: String, worst_ratio: f64, pass: bool) -> Self {
        Self { property, instance, worst_ratio, pass }
    }
}

/// Extreme ratios `w_G(cut) / w_H(cut)` over all nonempty proper vertex
/// subsets. Cuts that are zero in both graphs count as ratio 1; a cut that
/// is zero in `h` but not in `g` yields infinity.
pub fn all_cuts_ratio(g: &DynamicGraph, h: &DynamicGraph) -> Result<(f64, f64)> {
    if g.n() != h.n() {
        return Err(Error::VertexSetMismatch);
    }
    let n = g.n();
    assert!(n <= 24, "all-cuts enumeration is desk scale only");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut mask = vec![false; n];
    // Fix vertex 0 on one side; complements have equal cut weight.
    for bits in 0..(1u64 << (n - 1)) {
        if bits == 0 {
            continue;
        }
        for (i, m) in mask.iter_mut().enumerate().skip(1) {
            *m = bits >> (i - 1) & 1 == 1;
        }
        let wg = g.cut_weight_mask(&mask);
        let wh = h.cut_weight_mask(&mask);
        let ratio = if wg == 0.0 && wh == 0.0 {
            1.0
        } else {
            wg / wh
        };
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    if lo > hi {
        // No nonempty proper cut (n <= 1).
        return Ok((1.0, 1.0));
    }
    Ok((lo, hi))
}

fn laplacian(g: &DynamicGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut l = vec![vec![0.0; n]; n];
    for e in g.edges() {
        l[e.u][e.u] += e.weight;
        l[e.v][e.v] += e.weight;
        l[e.u][e.v] -= e.weight;
        l[e.v][e.u] -= e.weight;
    }
    l
}

fn components(g: &DynamicGraph) -> Vec<usize> {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for e in g.incident(x) {
                let y = e.other(x);
                if comp[y] == usize::MAX {
                    comp[y] = next;
                    queue.push_back(y);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Extreme generalized Rayleigh quotients `x' L_g x / x' L_h x` over the
/// orthogonal complement of the shared Laplacian kernel, via dense
/// eigen-decomposition. Requires both graphs to have identical connected
/// components.
pub fn quad_form_extremes(g: &DynamicGraph, h: &DynamicGraph) -> Result<(f64, f64)> {
    if g.n() != h.n() {
        return Err(Error::VertexSetMismatch);
    }
    let n = g.n();
    assert!(n <= 64, "dense eigen oracle is desk scale only");
    let cg = components(g);
    let ch = components(h);
    // Identical partition into components, not merely the same count.
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        match map.get(&cg[v]) {
            Some(&c) if c != ch[v] => return Err(Error::KernelMismatch),
            Some(_) => {}
            None => {
                if map.values().any(|&c| c == ch[v]) {
                    return Err(Error::KernelMismatch);
                }
                map.insert(cg[v], ch[v]);
            }
        }
    }
    // Basis of the complement of the component-indicator kernel: for each
    // component pick a root r and take e_v - e_r for the other vertices.
    let mut root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut basis: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        match root.get(&cg[v]) {
            None => {
                root.insert(cg[v], v);
            }
            Some(&r) => basis.push((v, r)),
        }
    }
    if basis.is_empty() {
        return Ok((1.0, 1.0));
    }
    let lg = laplacian(g);
    let lh = laplacian(h);
    let d = basis.len();
    let project = |l: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; d]; d];
        for (i, &(vi, ri)) in basis.iter().enumerate() {
            for (j, &(vj, rj)) in basis.iter().enumerate() {
                a[i][j] = l[vi][vj] - l[vi][rj] - l[ri][vj] + l[ri][rj];
            }
        }
        a
    };
    let ag = project(&lg);
    let ah = project(&lh);
    // Reduce the pencil (A_g, A_h) to standard form with A_h = C C'.
    let c = linalg::cholesky(&ah).ok_or(Error::KernelMismatch)?;
    let m = linalg::congruence_reduce(&ag, &c);
    let eigs = jacobi_eigenvalues(&m);
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Effective resistance between `u` and `v` under `r(e) = 1 / w(e)`, via a
/// grounded Laplacian solve.
pub fn effective_resistance(g: &DynamicGraph, u: VertexId, v: VertexId) -> Result<f64> {
    let comp = components(g);
    if comp[u] != comp[v] {
        return Err(Error::Disconnected(u, v));
    }
    if u == v {
        return Ok(0.0);
    }
    let verts: Vec<usize> = (0..g.n()).filter(|&x| comp[x] == comp[u]).collect();
    let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    // Ground the last vertex of the component.
    let ground = *verts.last().unwrap();
    let rows: Vec<usize> = verts.iter().copied().filter(|&x| x != ground).collect();
    let l = laplacian(g);
    let k = rows.len();
    let mut a = vec![vec![0.0; k]; k];
    for (i, &x) in rows.iter().enumerate() {
        for (j, &y) in rows.iter().enumerate() {
            a[i][j] = l[x][y];
        }
    }
    let mut b = vec![0.0; k];
    let pos = |x: usize| index[&x];
    let _ = pos;
    if u != ground {
        b[rows.iter().position(|&x| x == u).unwrap()] = 1.0;
    }
    if v != ground {
        b[rows.iter().position(|&x| x == v).unwrap()] = -1.0;
    }
    let x = solve_linear(a, b).ok_or(Error::Disconnected(u, v))?;
    let phi = |w: usize| -> f64 {
        if w == ground {
            0.0
        } else {
            x[rows.iter().position(|&y| y == w).unwrap()]
        }
    };
    Ok(phi(u) - phi(v))
}

/// Minimal extension weight of a cover cut: each independent vertex joins
/// its cheaper side.
pub fn min_extension_weight(
    g: &DynamicGraph,
    cover: &BTreeSet<VertexId>,
    s: &BTreeSet<VertexId>,
) -> Result<Weight> {
    let x_side: Vec<VertexId> = (0..g.n()).filter(|v| !cover.contains(v)).collect();
    // The cover must actually cover every edge.
    for e in g.edges() {
        if !cover.contains(&e.u) && !cover.contains(&e.v) {
            return Err(Error::NotACover(e.u));
        }
    }
    let mut total = 0.0;
    for e in g.edges() {
        if cover.contains(&e.u) && cover.contains(&e.v) && s.contains(&e.u) != s.contains(&e.v) {
            total += e.weight;
        }
    }
    for &x in &x_side {
        let mut to_s = 0.0;
        let mut to_rest = 0.0;
        for e in g.incident(x) {
            if s.contains(&e.other(x)) {
                to_s += e.weight;
            } else {
                to_rest += e.weight;
            }
        }
        total += to_s.min(to_rest);
    }
    Ok(total)
}

/// Extreme ratios of minimally extended cover cuts between two graphs that
/// share the cover.
pub fn terminal_cut_ratio(
    g: &DynamicGraph,
    h: &DynamicGraph,
    cover: &BTreeSet<VertexId>,
) -> Result<(f64, f64)> {
    assert!(cover.len() <= 20, "terminal cut enumeration is desk scale only");
    let vc: Vec<VertexId> = cover.iter().copied().collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for bits in 1..(1u64 << vc.len()) - 1 {
        let s: BTreeSet<VertexId> = vc
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let dg = min_extension_weight(g, cover, &s)?;
        let dh = min_extension_weight(h, cover, &s)?;
        let ratio = if dg == 0.0 && dh == 0.0 { 1.0 } else { dg / dh };
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    if lo > hi {
        return Ok((1.0, 1.0));
    }
    Ok((lo, hi))
}

/// Verify `d_h(u, v) <= alpha * d_g(u, v)` for every edge of `g`, under the
/// resistance-length metric `len(e) = 1 / w(e)`. Returns the worst ratio.
pub fn stretch_check(g: &DynamicGraph, h: &DynamicGraph, alpha: f64) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    for e in g.edges() {
        let direct = 1.0 / e.weight;
        match dijkstra(h, e.u, e.v) {
            None => return (false, f64::INFINITY),
            Some(d) => worst = worst.max(d / direct),
        }
    }
    (worst <= alpha * (1.0 + 1e-9), worst)
}

fn dijkstra(g: &DynamicGraph, s: VertexId, t: VertexId) -> Option<f64> {
    let mut dist = vec![f64::INFINITY; g.n()];
    dist[s] = 0.0;
    let mut heap: BinaryHeap<(std::cmp::Reverse<u64>, VertexId)> = BinaryHeap::new();
    heap.push((std::cmp::Reverse(0), s));
    while let Some((std::cmp::Reverse(dbits), x)) = heap.pop() {
        let d = f64::from_bits(dbits);
        if d > dist[x] {
            continue;
        }
        if x == t {
            return Some(d);
        }
        for e in g.incident(x) {
            let y = e.other(x);
            let nd = d + 1.0 / e.weight;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push((std::cmp::Reverse(nd.to_bits()), y));
            }
        }
    }
    None
}

/// Canonical minimum spanning forest with `(weight, id)` tie-break.
pub fn kruskal_msf(g: &DynamicGraph) -> DynamicGraph {
    kruskal(g, false)
}

/// Canonical maximum spanning forest with `(-weight, id)` tie-break.
pub fn kruskal_max_forest(g: &DynamicGraph) -> DynamicGraph {
    kruskal(g, true)
}

fn kruskal(g: &DynamicGraph, max: bool) -> DynamicGraph {
    let mut order: Vec<(u64, EdgeId)> = g
        .edges()
        .map(|e| {
            let w = if max { -e.weight } else { e.weight };
            (crate::graph::weight_order_bits(w), e.id)
        })
        .collect();
    order.sort_unstable();
    let mut dsu = Dsu::new(g.n());
    let mut out = DynamicGraph::multigraph(g.n());
    for (_, id) in order {
        let e = g.edge(id).unwrap();
        if dsu.union(e.u, e.v) {
            out.insert_edge_with_id(*e).unwrap();
        }
    }
    out
}

/// Exact minimum vertex cover size of a forest, by tree DP.
pub fn tree_mvc(g: &DynamicGraph) -> usize {
    let n = g.n();
    let mut visited = vec![false; n];
    let mut total = 0;
    for root in 0..n {
        if visited[root] || g.degree(root) == 0 {
            visited[root] = true;
            continue;
        }
        // Iterative post-order DP: cover[v] = (without v, with v).
        let mut order = Vec::new();
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![root];
        visited[root] = true;
        while let Some(x) = stack.pop() {
            order.push(x);
            for e in g.incident(x) {
                let y = e.other(x);
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut without = vec![0usize; n];
        let mut with = vec![1usize; n];
        for &x in order.iter().rev() {
            for e in g.incident(x) {
                let y = e.other(x);
                if parent[y] == x {
                    without[x] += with[y];
                    with[x] += without[y].min(with[y]);
                }
            }
        }
        total += without[root].min(with[root]);
    }
    total
}

/// Exact minimum vertex cover size of a bipartite graph, by König's
/// theorem: it equals the maximum matching size.
pub fn bipartite_mvc(g: &DynamicGraph, left: &BTreeSet<VertexId>) -> Result<usize> {
    for e in g.edges() {
        if left.contains(&e.u) == left.contains(&e.v) {
            return Err(Error::Invalid(format!(
                "edge ({}, {}) does not cross the bipartition",
                e.u, e.v
            )));
        }
    }
    // Unit-capacity flow from a super-source to the left side.
    let n = g.n();
    let (s, t) = (n, n + 1);
    let mut dinic = Dinic::new(n + 2);
    for &v in left {
        dinic.add_edge(s, v, 1.0);
    }
    for v in 0..n {
        if !left.contains(&v) {
            dinic.add_edge(v, t, 1.0);
        }
    }
    let mut seen: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for e in g.edges() {
        let (a, b) = if left.contains(&e.u) { (e.u, e.v) } else { (e.v, e.u) };
        if seen.insert((a, b)) {
            dinic.add_edge(a, b, 1.0);
        }
    }
    Ok(dinic.max_flow(s, t).round() as usize)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

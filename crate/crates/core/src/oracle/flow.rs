//! Exact max-flow / min-cut by Dinic's algorithm with f64 capacities.

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{DynamicGraph, VertexId};

const FLOW_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
struct FlowEdge {
    to: usize,
    cap: f64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct Dinic {
    graph: Vec<Vec<FlowEdge>>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Self { graph: vec![Vec::new(); n] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64) {
        let ru = self.graph[v].len();
        let rv = self.graph[u].len();
        self.graph[u].push(FlowEdge { to: v, cap, rev: ru });
        self.graph[v].push(FlowEdge { to: u, cap: 0.0, rev: rv });
    }

    /// Add an undirected edge of capacity `cap` in both directions.
    pub fn add_undirected(&mut self, u: usize, v: usize, cap: f64) {
        let ru = self.graph[v].len();
        let rv = self.graph[u].len();
        self.graph[u].push(FlowEdge { to: v, cap, rev: ru });
        self.graph[v].push(FlowEdge { to: u, cap, rev: rv });
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.graph.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for e in &self.graph[x] {
                if e.cap > FLOW_EPS && level[e.to] < 0 {
                    level[e.to] = level[x] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        (level[t] >= 0).then_some(level)
    }

    fn dfs(&mut self, x: usize, t: usize, pushed: f64, level: &[i32], it: &mut [usize]) -> f64 {
        if x == t {
            return pushed;
        }
        while it[x] < self.graph[x].len() {
            let i = it[x];
            let (to, cap) = (self.graph[x][i].to, self.graph[x][i].cap);
            if cap > FLOW_EPS && level[to] == level[x] + 1 {
                let got = self.dfs(to, t, pushed.min(cap), level, it);
                if got > FLOW_EPS {
                    self.graph[x][i].cap -= got;
                    let rev = self.graph[x][i].rev;
                    self.graph[to][rev].cap += got;
                    return got;
                }
            }
            it[x] += 1;
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut it = vec![0usize; self.graph.len()];
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY, &level, &mut it);
                if pushed <= FLOW_EPS {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Vertices reachable from `s` in the residual graph (the source side
    /// of a minimum cut after `max_flow`).
    pub fn residual_side(&self, s: usize) -> BTreeSet<usize> {
        let mut side = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for e in &self.graph[x] {
                if e.cap > FLOW_EPS && side.insert(e.to) {
                    queue.push_back(e.to);
                }
            }
        }
        side
    }
}

/// Maximum s-t flow value of an undirected weighted graph.
pub fn max_flow(g: &DynamicGraph, s: VertexId, t: VertexId) -> f64 {
    let mut dinic = Dinic::new(g.n());
    for e in g.edges() {
        dinic.add_undirected(e.u, e.v, e.weight);
    }
    dinic.max_flow(s, t)
}

/// Exact minimum s-t cut: value and the source side.
pub fn exact_min_st_cut(g: &DynamicGraph, s: VertexId, t: VertexId) -> (f64, BTreeSet<VertexId>) {
    let mut dinic = Dinic::new(g.n());
    for e in g.edges() {
        dinic.add_undirected(e.u, e.v, e.weight);
    }
    let value = dinic.max_flow(s, t);
    (value, dinic.residual_side(s))
}

/// Local edge connectivity: weight of the minimum edge cut separating
/// `u` and `v` (0 when disconnected).
pub fn local_connectivity(g: &DynamicGraph, u: VertexId, v: VertexId) -> f64 {
    max_flow(g, u, v)
}

//! Replay a parsed stream through the selected pipeline.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use dynsparse::cut::{CutChain, CutConfig};
use dynsparse::forest::{ForestMode, MsfInstance};
use dynsparse::graph::{DynamicGraph, EdgeId, UpdateEvent, WeightedEdge};
use dynsparse::mincut::{ApproxMode, CutSide, MinCutConfig, MinCutInstance};
use dynsparse::oracle;
use dynsparse::spectral::{FullyDynamicWrapper, SpectralConfig};
use dynsparse::vertex::{VertexConfig, VertexSparsifierState};

use crate::stream::{Line, Mode, StreamFile};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: Mode,
    pub n: usize,
    pub epsilon: f64,
    pub rho: f64,
    pub c: f64,
    pub t: Option<usize>,
    pub seed: u64,
    pub wmax: Option<f64>,
    pub verify: bool,
    pub verify_every: usize,
    pub timing: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyStats {
    pub checks: usize,
    pub worst_low: f64,
    pub worst_high: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct RunStats {
    pub schema: u32,
    pub mode: &'static str,
    pub n: usize,
    pub events: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub final_m: usize,
    pub final_sparsifier_size: usize,
    pub max_sparsifier_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_recourse: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyStats>,
    pub query_outputs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

#[derive(Debug)]
pub struct RunError {
    pub event: usize,
    pub message: String,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "event {}: {}", self.event, self.message)
    }
}

impl std::error::Error for RunError {}

fn fail(event: usize, message: impl Into<String>) -> RunError {
    RunError { event, message: message.into() }
}

struct Verifier {
    checks: usize,
    worst_low: f64,
    worst_high: f64,
    pass: bool,
}

impl Verifier {
    fn new() -> Self {
        Self { checks: 0, worst_low: f64::INFINITY, worst_high: f64::NEG_INFINITY, pass: true }
    }

    fn record(&mut self, lo: f64, hi: f64, ok: bool) {
        self.checks += 1;
        self.worst_low = self.worst_low.min(lo);
        self.worst_high = self.worst_high.max(hi);
        self.pass &= ok;
    }

    fn into_stats(self) -> Option<VerifyStats> {
        if self.checks == 0 {
            return None;
        }
        Some(VerifyStats {
            checks: self.checks,
            worst_low: self.worst_low,
            worst_high: self.worst_high,
            pass: self.pass,
        })
    }
}

pub fn run(stream: &StreamFile, opts: &RunOptions) -> Result<RunStats, RunError> {
    let start = Instant::now();
    let n = opts.n;
    let mode = opts.mode;
    let mut stats = RunStats {
        schema: 1,
        mode: mode.name(),
        n,
        events: 0,
        inserts: 0,
        deletes: 0,
        final_m: 0,
        final_sparsifier_size: 0,
        max_sparsifier_size: 0,
        forest_count: None,
        max_recourse: None,
        verify: None,
        query_outputs: Vec::new(),
        values: Vec::new(),
        timing_ms: None,
    };
    let mut verifier = Verifier::new();

    // Ground truth graph replayed alongside every pipeline.
    let mut graph = DynamicGraph::multigraph(n);
    // Stream insert index -> internal edge id, while alive.
    let mut alive: BTreeMap<u64, WeightedEdge> = BTreeMap::new();
    let mut insert_count = 0u64;

    enum Pipeline {
        Forest(MsfInstance),
        Cut(Box<CutChain>),
        Spectral(Box<FullyDynamicWrapper>),
        MinCut(Box<MinCutInstance>),
        Vertex(Box<VertexSparsifierState>, usize),
    }

    let mut pipeline = match mode {
        Mode::Forest => Pipeline::Forest(MsfInstance::new(n, ForestMode::Min)),
        Mode::Cut => {
            let cfg = CutConfig {
                epsilon: opts.epsilon,
                rho: opts.rho,
                c: opts.c,
                seed: opts.seed,
                t_override: opts.t,
                w_ratio_hint: opts.wmax.unwrap_or(1.0),
                ..Default::default()
            };
            Pipeline::Cut(Box::new(CutChain::new(n, cfg)))
        }
        Mode::Spectral => {
            let cfg = SpectralConfig {
                epsilon: opts.epsilon,
                rho: opts.rho,
                c: opts.c,
                seed: opts.seed,
                t_override: opts.t,
                ..Default::default()
            };
            Pipeline::Spectral(Box::new(FullyDynamicWrapper::new(n, cfg)))
        }
        Mode::MinCut2 | Mode::MinCut1 => {
            if n % 2 != 0 {
                return Err(fail(0, "mincut modes need an even vertex count"));
            }
            let approx = if mode == Mode::MinCut2 { ApproxMode::TwoEps } else { ApproxMode::OneEps };
            let cfg = MinCutConfig {
                epsilon: opts.epsilon,
                seed: opts.seed,
                sparsifier_t: opts.t.unwrap_or(8),
                sparsifier_rho: opts.rho,
                ..Default::default()
            };
            let inst = MinCutInstance::new(n / 2, n / 2, approx, cfg)
                .map_err(|e| fail(0, e.to_string()))?;
            Pipeline::MinCut(Box::new(inst))
        }
        Mode::Vertex => {
            let cover_size = n.div_ceil(2);
            let cfg = VertexConfig::practical(n, opts.epsilon, opts.t.unwrap_or(4), n, opts.seed);
            Pipeline::Vertex(Box::new(VertexSparsifierState::new(n, cfg)), cover_size)
        }
    };

    let sparsifier_size = |p: &Pipeline| -> usize {
        match p {
            Pipeline::Forest(f) => f.forest_len(),
            Pipeline::Cut(c) => c.sparsifier().m(),
            Pipeline::Spectral(w) => w.sparsifier().m(),
            Pipeline::MinCut(i) => i.sparsifier().m(),
            Pipeline::Vertex(v, _) => v.assemble().m(),
        }
    };

    let mut check = |pipeline: &Pipeline,
                     graph: &DynamicGraph,
                     verifier: &mut Verifier,
                     event: usize|
     -> Result<(), RunError> {
        match pipeline {
            Pipeline::Forest(f) => {
                let oracle_forest = oracle::kruskal_msf(graph);
                let ours = f.forest_edges();
                let theirs: Vec<EdgeId> = oracle_forest.edge_ids().collect();
                verifier.record(1.0, 1.0, ours == theirs);
            }
            Pipeline::Cut(c) => {
                if graph.n() > 24 {
                    return Err(fail(event, "all-cuts verification needs n <= 24"));
                }
                let (lo, hi) = oracle::all_cuts_ratio(graph, c.sparsifier())
                    .map_err(|e| fail(event, e.to_string()))?;
                let eps = opts.epsilon;
                verifier.record(lo, hi, lo >= 1.0 - eps - 1e-9 && hi <= 1.0 + eps + 1e-9);
            }
            Pipeline::Spectral(w) => {
                if graph.n() > 64 {
                    return Err(fail(event, "spectral verification needs n <= 64"));
                }
                let h = w.sparsifier();
                match oracle::quad_form_extremes(graph, &h) {
                    Ok((lo, hi)) => {
                        let eps = opts.epsilon;
                        verifier.record(lo, hi, lo >= 1.0 - eps - 1e-9 && hi <= 1.0 + eps + 1e-9);
                    }
                    // Kernel mismatch means the sampled sparsifier lost a
                    // component: an outright failure.
                    Err(_) => verifier.record(0.0, f64::INFINITY, false),
                }
            }
            Pipeline::MinCut(inst) => {
                let (opt, _) = oracle::exact_min_st_cut(graph, inst.source(), inst.sink());
                let value = inst.value();
                if opt == 0.0 {
                    verifier.record(1.0, 1.0, value == 0.0);
                } else {
                    let ratio = value / opt;
                    let bound = match inst.mode() {
                        ApproxMode::TwoEps => 2.0 + opts.epsilon,
                        ApproxMode::OneEps => 1.0 + opts.epsilon,
                    };
                    verifier.record(ratio, ratio, ratio >= 1.0 - 1e-9 && ratio <= bound + 1e-9);
                }
            }
            Pipeline::Vertex(state, cover_size) => {
                if *cover_size > 20 {
                    return Err(fail(event, "terminal-cut verification needs |VC| <= 20"));
                }
                let cover = (0..*cover_size).collect();
                let h = state.assemble();
                let (lo, hi) = oracle::terminal_cut_ratio(graph, &h, &cover)
                    .map_err(|e| fail(event, e.to_string()))?;
                let eps = opts.epsilon;
                verifier.record(lo, hi, lo >= 1.0 - eps - 1e-9 && hi <= 1.0 + eps + 1e-9);
            }
        }
        Ok(())
    };

    for (event, line) in stream.body.iter().enumerate() {
        match line {
            Line::Insert { u, v, w } => {
                let idx = insert_count;
                insert_count += 1;
                // Internal ids leave room for the min-cut star edges.
                let id = n as u64 + idx;
                let e = WeightedEdge::new(id, *u, *v, *w);
                match &mut pipeline {
                    Pipeline::MinCut(inst) => {
                        let half = n / 2;
                        if *u >= half || *v < half || *v >= n {
                            return Err(fail(
                                event,
                                format!("mincut insert ({u}, {v}) must go from A to B"),
                            ));
                        }
                        graph
                            .insert_edge_with_id(e)
                            .map_err(|er| fail(event, er.to_string()))?;
                        inst.insert_ab(*u, *v - half, id)
                            .map_err(|er| fail(event, er.to_string()))?;
                    }
                    Pipeline::Forest(f) => {
                        graph
                            .insert_edge_with_id(e)
                            .map_err(|er| fail(event, er.to_string()))?;
                        f.insert(&e).map_err(|er| fail(event, er.to_string()))?;
                    }
                    Pipeline::Cut(c) => {
                        graph
                            .insert_edge_with_id(e)
                            .map_err(|er| fail(event, er.to_string()))?;
                        let delta = c
                            .apply(&UpdateEvent::Insert(e))
                            .map_err(|er| fail(event, er.to_string()))?;
                        let recourse = delta.per_level.iter().copied().max().unwrap_or(0);
                        stats.max_recourse = Some(stats.max_recourse.unwrap_or(0).max(recourse));
                    }
                    Pipeline::Spectral(wr) => {
                        graph
                            .insert_edge_with_id(e)
                            .map_err(|er| fail(event, er.to_string()))?;
                        wr.apply(&UpdateEvent::Insert(e))
                            .map_err(|er| fail(event, er.to_string()))?;
                    }
                    Pipeline::Vertex(state, cover_size) => {
                        apply_vertex_edit(state, &mut graph, *cover_size, Some(e), None)
                            .map_err(|er| fail(event, er.to_string()))?;
                    }
                }
                alive.insert(idx, e);
                stats.inserts += 1;
            }
            Line::Delete { insert_index } => {
                let e = alive
                    .remove(insert_index)
                    .ok_or_else(|| fail(event, format!("delete of unknown insert {insert_index}")))?;
                match &mut pipeline {
                    Pipeline::MinCut(inst) => {
                        graph.delete_edge(e.id).map_err(|er| fail(event, er.to_string()))?;
                        inst.delete_ab(e.id).map_err(|er| fail(event, er.to_string()))?;
                    }
                    Pipeline::Forest(f) => {
                        graph.delete_edge(e.id).map_err(|er| fail(event, er.to_string()))?;
                        f.delete(e.id).map_err(|er| fail(event, er.to_string()))?;
                    }
                    Pipeline::Cut(c) => {
                        graph.delete_edge(e.id).map_err(|er| fail(event, er.to_string()))?;
                        let delta = c
                            .apply(&UpdateEvent::Delete(e.id))
                            .map_err(|er| fail(event, er.to_string()))?;
                        let recourse = delta.per_level.iter().copied().max().unwrap_or(0);
                        stats.max_recourse = Some(stats.max_recourse.unwrap_or(0).max(recourse));
                    }
                    Pipeline::Spectral(wr) => {
                        graph.delete_edge(e.id).map_err(|er| fail(event, er.to_string()))?;
                        wr.apply(&UpdateEvent::Delete(e.id))
                            .map_err(|er| fail(event, er.to_string()))?;
                    }
                    Pipeline::Vertex(state, cover_size) => {
                        apply_vertex_edit(state, &mut graph, *cover_size, None, Some(e))
                            .map_err(|er| fail(event, er.to_string()))?;
                    }
                }
                stats.deletes += 1;
            }
            Line::QueryValue => match &pipeline {
                Pipeline::MinCut(inst) => {
                    let v = inst.value();
                    stats.values.push(v);
                    stats.query_outputs.push(format!("value {v}"));
                }
                _ => return Err(fail(event, "q value is only available in mincut modes")),
            },
            Line::QuerySide { v } => match &pipeline {
                Pipeline::MinCut(inst) => {
                    if *v >= n {
                        return Err(fail(event, format!("vertex {v} out of range")));
                    }
                    let side = match inst.query_side(*v) {
                        CutSide::S => "s",
                        CutSide::T => "t",
                    };
                    stats.query_outputs.push(format!("side {v} {side}"));
                }
                _ => return Err(fail(event, "q side is only available in mincut modes")),
            },
            Line::QueryCuts => {
                check(&pipeline, &graph, &mut verifier, event)?;
                stats.query_outputs.push("cuts checked".into());
            }
        }
        stats.events += 1;
        if matches!(line, Line::Insert { .. } | Line::Delete { .. }) {
            if let Pipeline::MinCut(inst) = &pipeline {
                stats.values.push(inst.value());
            }
            if opts.verify && stats.events % opts.verify_every.max(1) == 0 {
                check(&pipeline, &graph, &mut verifier, event)?;
            }
        }
        stats.max_sparsifier_size = stats.max_sparsifier_size.max(sparsifier_size(&pipeline));
    }

    stats.final_m = graph.m();
    stats.final_sparsifier_size = sparsifier_size(&pipeline);
    if let Pipeline::Cut(c) = &pipeline {
        stats.forest_count = Some(c.forests().len());
    }
    stats.verify = verifier.into_stats();
    if opts.timing {
        stats.timing_ms = Some(start.elapsed().as_millis());
    }
    Ok(stats)
}

/// One edge edit in vertex mode: stars of affected non-cover endpoints are
/// pulled out, the ground truth is edited, and the stars are re-bucketed.
fn apply_vertex_edit(
    state: &mut VertexSparsifierState,
    graph: &mut DynamicGraph,
    cover_size: usize,
    added: Option<WeightedEdge>,
    removed: Option<WeightedEdge>,
) -> dynsparse::Result<()> {
    let e = added.or(removed).unwrap();
    let (u, v) = (e.u, e.v);
    if u >= cover_size && v >= cover_size {
        return Err(dynsparse::Error::NotACover(u));
    }
    for w in [u, v] {
        if w >= cover_size {
            state.remove_xg(w)?;
        }
    }
    let plain = u < cover_size && v < cover_size;
    if added.is_some() {
        graph.insert_edge_with_id(e)?;
        if plain {
            state.insert_plain(e)?;
        }
    } else {
        graph.delete_edge(e.id)?;
        if plain {
            state.remove_plain(e.id)?;
        }
    }
    for w in [u, v] {
        if w >= cover_size && graph.degree(w) > 0 {
            state.insert_xg(w, &graph.neighbor_weights(w))?;
        }
    }
    Ok(())
}

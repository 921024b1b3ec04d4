//! Update stream file format.
//!
//! ```text
//! # comment
//! h n=10 mode=cut epsilon=0.5 rho=4 c=1 seed=7 wmax=16
//! i 0 1 1.0          insert an edge (weight optional, default 1)
//! d 0                delete the edge created by the 0-th insert
//! q value            query the maintained estimate (mincut modes)
//! q side 3           query which side vertex 3 lies on (mincut modes)
//! q cuts             run the oracle snapshot now (any mode)
//! ```
//!
//! Inserts are numbered 0, 1, 2, … in file order; `d k` refers to the
//! `k`-th insert.

use std::fmt::Write as _;

use dynsparse::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cut,
    Spectral,
    MinCut2,
    MinCut1,
    Vertex,
    Forest,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "cut" => Mode::Cut,
            "spectral" => Mode::Spectral,
            "mincut2" => Mode::MinCut2,
            "mincut1" => Mode::MinCut1,
            "vertex" => Mode::Vertex,
            "forest" => Mode::Forest,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Cut => "cut",
            Mode::Spectral => "spectral",
            Mode::MinCut2 => "mincut2",
            Mode::MinCut1 => "mincut1",
            Mode::Vertex => "vertex",
            Mode::Forest => "forest",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Header {
    pub n: Option<usize>,
    pub mode: Option<Mode>,
    pub epsilon: Option<f64>,
    pub rho: Option<f64>,
    pub c: Option<f64>,
    pub seed: Option<u64>,
    pub wmax: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Insert { u: usize, v: usize, w: f64 },
    Delete { insert_index: u64 },
    QueryValue,
    QuerySide { v: usize },
    QueryCuts,
}

#[derive(Debug, Clone)]
pub struct StreamFile {
    pub header: Header,
    pub body: Vec<Line>,
}

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

pub fn parse_stream(text: &str) -> Result<StreamFile, ParseError> {
    let mut header = Header::default();
    let mut body = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next().unwrap() {
            "h" => {
                for kv in parts {
                    let (key, value) = kv
                        .split_once('=')
                        .ok_or_else(|| err(lineno, format!("bad header field `{kv}`")))?;
                    match key {
                        "n" => {
                            header.n = Some(value.parse().map_err(|_| {
                                err(lineno, format!("bad n `{value}`"))
                            })?)
                        }
                        "mode" => {
                            header.mode = Some(Mode::parse(value).ok_or_else(|| {
                                err(lineno, format!("unknown mode `{value}`"))
                            })?)
                        }
                        "epsilon" => {
                            header.epsilon = Some(value.parse().map_err(|_| {
                                err(lineno, format!("bad epsilon `{value}`"))
                            })?)
                        }
                        "rho" => {
                            header.rho = Some(value.parse().map_err(|_| {
                                err(lineno, format!("bad rho `{value}`"))
                            })?)
                        }
                        "c" => {
                            header.c = Some(value.parse().map_err(|_| {
                                err(lineno, format!("bad c `{value}`"))
                            })?)
                        }
                        "seed" => {
                            header.seed = Some(value.parse().map_err(|_| {
                                err(lineno, format!("bad seed `{value}`"))
                            })?)
                        }
                        "wmax" => {
                            header.wmax = Some(value.parse().map_err(|_| {
                                err(lineno, format!("bad wmax `{value}`"))
                            })?)
                        }
                        _ => return Err(err(lineno, format!("unknown header key `{key}`"))),
                    }
                }
            }
            "i" => {
                let u: usize = parts
                    .next()
                    .ok_or_else(|| err(lineno, "insert needs two endpoints"))?
                    .parse()
                    .map_err(|_| err(lineno, "bad endpoint"))?;
                let v: usize = parts
                    .next()
                    .ok_or_else(|| err(lineno, "insert needs two endpoints"))?
                    .parse()
                    .map_err(|_| err(lineno, "bad endpoint"))?;
                let w: f64 = match parts.next() {
                    None => 1.0,
                    Some(s) => s.parse().map_err(|_| err(lineno, "bad weight"))?,
                };
                if parts.next().is_some() {
                    return Err(err(lineno, "trailing tokens after insert"));
                }
                body.push(Line::Insert { u, v, w });
            }
            "d" => {
                let k: u64 = parts
                    .next()
                    .ok_or_else(|| err(lineno, "delete needs an id"))?
                    .parse()
                    .map_err(|_| err(lineno, "bad id"))?;
                if parts.next().is_some() {
                    return Err(err(lineno, "trailing tokens after delete"));
                }
                body.push(Line::Delete { insert_index: k });
            }
            "q" => match parts.next() {
                Some("value") => body.push(Line::QueryValue),
                Some("cuts") => body.push(Line::QueryCuts),
                Some("side") => {
                    let v: usize = parts
                        .next()
                        .ok_or_else(|| err(lineno, "side query needs a vertex"))?
                        .parse()
                        .map_err(|_| err(lineno, "bad vertex"))?;
                    body.push(Line::QuerySide { v });
                }
                other => {
                    return Err(err(lineno, format!("unknown query `{}`", other.unwrap_or(""))))
                }
            },
            other => return Err(err(lineno, format!("unknown directive `{other}`"))),
        }
    }
    Ok(StreamFile { header, body })
}

fn header_line(n: usize, mode: &str, seed: u64) -> String {
    format!("h n={n} mode={mode} seed={seed}\n")
}

/// G(n, p) build-up followed by a mixed churn phase.
pub fn generate_gnp(n: usize, p: f64, events: usize, seed: u64, mode: &str) -> String {
    let mut rng = SplitMix64::new(seed);
    let mut out = String::new();
    out.push_str("# gnp workload\n");
    out.push_str(&header_line(n, mode, seed));
    let mut live: Vec<u64> = Vec::new();
    let mut inserts = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_f64() < p {
                let w = 1 + rng.next_below(4);
                let _ = writeln!(out, "i {u} {v} {w}");
                live.push(inserts);
                inserts += 1;
            }
        }
    }
    for _ in 0..events {
        if live.len() < n || rng.next_below(2) == 0 {
            let u = rng.next_below(n as u64) as usize;
            let v = rng.next_below(n as u64) as usize;
            if u == v {
                continue;
            }
            let w = 1 + rng.next_below(4);
            let _ = writeln!(out, "i {u} {v} {w}");
            live.push(inserts);
            inserts += 1;
        } else {
            let k = rng.next_below(live.len() as u64) as usize;
            let id = live.swap_remove(k);
            let _ = writeln!(out, "d {id}");
        }
    }
    out
}

/// Bipartite churn over A = [0, n/2) and B = [n/2, n) with value queries.
pub fn generate_bipartite_churn(n: usize, events: usize, seed: u64, mode: &str) -> String {
    assert!(n >= 2 && n % 2 == 0, "bipartite-churn needs an even n");
    let half = n / 2;
    let mut rng = SplitMix64::new(seed);
    let mut out = String::new();
    out.push_str("# bipartite churn workload\n");
    out.push_str(&header_line(n, mode, seed));
    let mut live: Vec<u64> = Vec::new();
    let mut inserts = 0u64;
    for _ in 0..events {
        if live.len() < half || rng.next_below(3) > 0 {
            let a = rng.next_below(half as u64) as usize;
            let b = half + rng.next_below(half as u64) as usize;
            let _ = writeln!(out, "i {a} {b}");
            live.push(inserts);
            inserts += 1;
        } else {
            let k = rng.next_below(live.len() as u64) as usize;
            let id = live.swap_remove(k);
            let _ = writeln!(out, "d {id}");
        }
        if rng.next_below(4) == 0 {
            out.push_str("q value\n");
        }
    }
    out
}

/// Build-up followed by deletion of everything, oldest first.
pub fn generate_delete_all(n: usize, p: f64, seed: u64, mode: &str) -> String {
    let mut rng = SplitMix64::new(seed);
    let mut out = String::new();
    out.push_str("# delete-all workload\n");
    out.push_str(&header_line(n, mode, seed));
    let mut inserts = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_f64() < p {
                let w = 1 + rng.next_below(4);
                let _ = writeln!(out, "i {u} {v} {w}");
                inserts += 1;
            }
        }
    }
    for id in 0..inserts {
        let _ = writeln!(out, "d {id}");
    }
    out
}

/// Churn sized to cross at least two `n²` phase boundaries, exercising the
/// two-instance wrapper.
pub fn generate_phase_stress(n: usize, seed: u64, mode: &str) -> String {
    let mut rng = SplitMix64::new(seed);
    let mut out = String::new();
    out.push_str("# phase stress workload\n");
    out.push_str(&header_line(n, mode, seed));
    let events = 2 * n * n + n;
    let mut live: Vec<u64> = Vec::new();
    let mut inserts = 0u64;
    for _ in 0..events {
        if live.len() < 2 * n || rng.next_below(2) == 0 {
            let u = rng.next_below(n as u64) as usize;
            let v = rng.next_below(n as u64) as usize;
            if u == v {
                let _ = writeln!(out, "i {u} {}", (u + 1) % n);
            } else {
                let _ = writeln!(out, "i {u} {v}");
            }
            live.push(inserts);
            inserts += 1;
        } else {
            let k = rng.next_below(live.len() as u64) as usize;
            let id = live.swap_remove(k);
            let _ = writeln!(out, "d {id}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_stream() {
        let text = "# demo\nh n=4 mode=cut epsilon=0.5\ni 0 1 1.0\ni 1 2\nd 0\nq cuts\n";
        let sf = parse_stream(text).unwrap();
        assert_eq!(sf.header.n, Some(4));
        assert_eq!(sf.header.mode, Some(Mode::Cut));
        assert_eq!(sf.body.len(), 4);
        assert_eq!(sf.body[0], Line::Insert { u: 0, v: 1, w: 1.0 });
        assert_eq!(sf.body[1], Line::Insert { u: 1, v: 2, w: 1.0 });
        assert_eq!(sf.body[2], Line::Delete { insert_index: 0 });
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_stream("h n=4\nxyz 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_stream("h n=4\ni 0\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = generate_gnp(10, 0.5, 30, 1, "cut");
        let b = generate_gnp(10, 0.5, 30, 1, "cut");
        assert_eq!(a, b);
        assert_ne!(a, generate_gnp(10, 0.5, 30, 2, "cut"));
        parse_stream(&a).unwrap();
        parse_stream(&generate_bipartite_churn(8, 40, 3, "mincut2")).unwrap();
        parse_stream(&generate_delete_all(8, 0.6, 4, "spectral")).unwrap();
        parse_stream(&generate_phase_stress(4, 5, "cut")).unwrap();
    }

    #[test]
    fn delete_all_ends_empty() {
        let s = generate_delete_all(6, 0.8, 9, "spectral");
        let sf = parse_stream(&s).unwrap();
        let inserts = sf.body.iter().filter(|l| matches!(l, Line::Insert { .. })).count();
        let deletes = sf.body.iter().filter(|l| matches!(l, Line::Delete { .. })).count();
        assert_eq!(inserts, deletes);
    }

    #[test]
    fn bipartite_churn_crosses_the_bipartition() {
        let s = generate_bipartite_churn(10, 60, 7, "mincut1");
        let sf = parse_stream(&s).unwrap();
        for line in &sf.body {
            if let Line::Insert { u, v, .. } = line {
                assert!(*u < 5 && *v >= 5);
            }
        }
    }
}

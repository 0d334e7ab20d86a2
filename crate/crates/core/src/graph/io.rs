//! Plain-text graph formats.
//!
//! Edge list:
//!
//! ```text
//! # kout v1 n=<n> seed=<master>/<stream>
//! i j
//! ...
//! ```
//!
//! one `i j` pair per line with `i < j`, ascending lexicographic, 0-based node
//! indices. The `seed=` field is omitted for graphs that were not generated.
//!
//! Node-type sidecar: one `i t` line per node, `t` being the 0-based type
//! index (type 0 is the one-selection type in the two-type model).

use std::io::{BufRead, Write};

use super::{Graph, KOutGraph, Seed};
use crate::error::{Error, Result};

const MAGIC: &str = "# kout v1";

/// Parsed edge-list header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeListHeader {
    pub n: usize,
    pub seed: Option<Seed>,
}

impl EdgeListHeader {
    pub fn line(&self) -> String {
        match self.seed {
            Some(s) => format!("{MAGIC} n={} seed={}", self.n, s),
            None => format!("{MAGIC} n={}", self.n),
        }
    }
}

pub fn write_edge_list<W: Write>(mut w: W, graph: &Graph, seed: Option<Seed>) -> Result<()> {
    let header = EdgeListHeader {
        n: graph.node_count(),
        seed,
    };
    writeln!(w, "{}", header.line())?;
    for (i, j) in graph.edge_list() {
        writeln!(w, "{i} {j}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_kout_edge_list<W: Write>(w: W, g: &KOutGraph) -> Result<()> {
    write_edge_list(w, g.graph(), Some(g.seed()))
}

pub fn write_type_sidecar<W: Write>(mut w: W, g: &KOutGraph) -> Result<()> {
    for (i, t) in g.node_types().iter().enumerate() {
        writeln!(w, "{i} {t}")?;
    }
    w.flush()?;
    Ok(())
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<EdgeListHeader> {
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| perr(1, format!("expected header starting with '{MAGIC}'")))?;
    let mut n = None;
    let mut seed = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| perr(1, format!("malformed header field '{field}'")))?;
        match key {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| perr(1, format!("bad node count '{value}'")))?,
                )
            }
            "seed" => {
                let (m, s) = value
                    .split_once('/')
                    .ok_or_else(|| perr(1, format!("seed must be <master>/<stream>, got '{value}'")))?;
                let m = m.parse().map_err(|_| perr(1, format!("bad master seed '{m}'")))?;
                let s = s.parse().map_err(|_| perr(1, format!("bad stream index '{s}'")))?;
                seed = Some(Seed::new(m, s));
            }
            _ => return Err(perr(1, format!("unknown header field '{key}'"))),
        }
    }
    let n = n.ok_or_else(|| perr(1, "header is missing n=<n>"))?;
    Ok(EdgeListHeader { n, seed })
}

/// Reads an edge list. Pairs need not be sorted, but each must name two
/// distinct in-range nodes.
pub fn read_edge_list<R: BufRead>(r: R) -> Result<(EdgeListHeader, Graph)> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| perr(1, "empty input"))??;
    let header = parse_header(first.trim_end())?;
    let mut edges = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(perr(lineno, format!("expected 'i j', got '{line}'"))),
        };
        let a: usize = a.parse().map_err(|_| perr(lineno, format!("bad node index '{a}'")))?;
        let b: usize = b.parse().map_err(|_| perr(lineno, format!("bad node index '{b}'")))?;
        if a >= header.n || b >= header.n || a == b {
            return Err(perr(lineno, format!("invalid edge ({a}, {b}) for n={}", header.n)));
        }
        edges.push((a, b));
    }
    let graph = Graph::from_edges(header.n, edges)?;
    Ok((header, graph))
}

/// Reads a type sidecar into a vector indexed by node.
pub fn read_type_sidecar<R: BufRead>(r: R, n: usize) -> Result<Vec<usize>> {
    let mut types = vec![None; n];
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (i, t) = line
            .split_once(' ')
            .ok_or_else(|| perr(lineno, format!("expected 'i t', got '{line}'")))?;
        let i: usize = i.trim().parse().map_err(|_| perr(lineno, format!("bad node '{i}'")))?;
        let t: usize = t.trim().parse().map_err(|_| perr(lineno, format!("bad type '{t}'")))?;
        if i >= n {
            return Err(perr(lineno, format!("node {i} out of range for n={n}")));
        }
        types[i] = Some(t);
    }
    types
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| perr(0, format!("node {i} has no type"))))
        .collect()
}

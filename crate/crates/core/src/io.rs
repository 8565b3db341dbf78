//! Edge-list and Matrix Market readers and writers.
//!
//! Edge-list format, one record per line:
//!
//! ```text
//! # comment (anything after '#' is ignored)
//! n 4            optional header; ids must then be integers in 0..n
//! 0 1 2.5        edge {0, 1} with weight 2.5
//! 1 2            edge {1, 2} with weight 1
//! delta 3 0.5    killing weight δ(3) = 0.5
//! ```
//!
//! Without a header, node labels are arbitrary tokens numbered in order of
//! first appearance. Repeated edges are summed and zero weights dropped.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::embed::SymmetricMatrix;
use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    EdgeList,
    MatrixMarket,
}

impl Format {
    /// `.mtx` files are Matrix Market, everything else an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("mtx") => Format::MatrixMarket,
            _ => Format::EdgeList,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "edge-list" | "el" => Ok(Format::EdgeList),
            "mtx" | "matrix-market" | "mm" => Ok(Format::MatrixMarket),
            _ => Err(invalid(format!("unknown format '{s}'"))),
        }
    }
}

/// A graph together with the original node labels, when they were remapped.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    /// `labels[i]` is the input label of node `i`; `None` for integer-id inputs.
    pub labels: Option<Vec<String>>,
}

pub fn load_graph(path: &Path, format: Format) -> Result<LoadedGraph> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        Format::EdgeList => read_edge_list(reader),
        Format::MatrixMarket => {
            let m = read_matrix_market(reader)?;
            Ok(LoadedGraph {
                graph: m.into_graph()?,
                labels: None,
            })
        }
    }
}

pub fn load_matrix(path: &Path) -> Result<SymmetricMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))?.into_matrix()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_weight(tok: &str, line: usize) -> Result<f64> {
    let w: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad weight '{tok}'")))?;
    if !w.is_finite() {
        return Err(parse_err(line, format!("non-finite weight '{tok}'")));
    }
    if w < 0.0 {
        return Err(Error::NegativeWeight { line, weight: w });
    }
    Ok(w)
}

struct Ids {
    declared: Option<usize>,
    index: HashMap<String, usize>,
    labels: Vec<String>,
}

impl Ids {
    fn get(&mut self, tok: &str, line: usize) -> Result<usize> {
        if let Some(n) = self.declared {
            let id: usize = tok
                .parse()
                .map_err(|_| parse_err(line, format!("node id '{tok}' is not an integer")))?;
            if id >= n {
                return Err(parse_err(line, format!("node id {id} not below n = {n}")));
            }
            return Ok(id);
        }
        if let Some(&i) = self.index.get(tok) {
            return Ok(i);
        }
        let i = self.labels.len();
        self.index.insert(tok.to_string(), i);
        self.labels.push(tok.to_string());
        Ok(i)
    }
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut ids = Ids {
        declared: None,
        index: HashMap::new(),
        labels: Vec::new(),
    };
    let mut edges = Vec::new();
    let mut kills: Vec<(usize, f64)> = Vec::new();
    let mut seen_record = false;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "n" => {
                if seen_record || ids.declared.is_some() {
                    return Err(parse_err(line_no, "header 'n' must come first"));
                }
                if toks.len() != 2 {
                    return Err(parse_err(line_no, "expected 'n <count>'"));
                }
                let n = toks[1]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node count '{}'", toks[1])))?;
                ids.declared = Some(n);
            }
            "delta" => {
                if toks.len() != 3 {
                    return Err(parse_err(line_no, "expected 'delta <node> <weight>'"));
                }
                let x = ids.get(toks[1], line_no)?;
                kills.push((x, parse_weight(toks[2], line_no)?));
                seen_record = true;
            }
            _ => {
                if toks.len() < 2 || toks.len() > 3 {
                    return Err(parse_err(line_no, "expected 'u v [w]'"));
                }
                let u = ids.get(toks[0], line_no)?;
                let v = ids.get(toks[1], line_no)?;
                let w = match toks.get(2) {
                    Some(t) => parse_weight(t, line_no)?,
                    None => 1.0,
                };
                if u == v {
                    return Err(Error::SelfLoop { line: line_no, node: u });
                }
                edges.push((u, v, w));
                seen_record = true;
            }
        }
    }
    let n = ids.declared.unwrap_or(ids.labels.len());
    let mut graph = WeightedGraph::from_edges(n, edges)?;
    if !kills.is_empty() {
        let mut delta = vec![0.0; n];
        for (x, d) in kills {
            delta[x] += d;
        }
        graph = graph.with_kill_weights(delta)?;
    }
    Ok(LoadedGraph {
        graph,
        labels: ids.declared.is_none().then_some(ids.labels),
    })
}

/// Writes `g` with an `n` header, one edge per line and `delta` lines for killing weights.
pub fn write_edge_list<W: Write>(g: &WeightedGraph, mut out: W) -> Result<()> {
    writeln!(out, "n {}", g.n())?;
    for (x, y, w) in g.edges() {
        writeln!(out, "{x} {y} {w}")?;
    }
    for x in 0..g.n() {
        if g.kill_weight(x) > 0.0 {
            writeln!(out, "delta {x} {}", g.kill_weight(x))?;
        }
    }
    Ok(())
}

/// Raw Matrix Market coordinate content, symmetrized.
#[derive(Clone, Debug)]
pub struct MatrixMarket {
    pub n: usize,
    /// Entries `(i, j, v)` with `i ≤ j`, zero-based, duplicates summed.
    pub entries: Vec<(usize, usize, f64)>,
}

impl MatrixMarket {
    /// Off-diagonal entries as edge weights; diagonal entries must be zero.
    pub fn into_graph(self) -> Result<WeightedGraph> {
        let mut edges = Vec::with_capacity(self.entries.len());
        for (i, j, v) in self.entries {
            if i == j {
                if v != 0.0 {
                    return Err(Error::SelfLoop { line: 0, node: i });
                }
                continue;
            }
            if v < 0.0 {
                return Err(Error::NegativeWeight { line: 0, weight: v });
            }
            edges.push((i, j, v));
        }
        WeightedGraph::from_edges(self.n, edges)
    }

    pub fn into_matrix(self) -> Result<SymmetricMatrix> {
        SymmetricMatrix::from_entries(self.n, self.entries)
    }
}

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<MatrixMarket> {
    let mut lines = reader.lines().enumerate();
    let (_, banner) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let banner = banner?;
    let head: Vec<String> = banner
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if head.len() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
        return Err(parse_err(1, "missing '%%MatrixMarket matrix' banner"));
    }
    if head[2] != "coordinate" {
        return Err(parse_err(1, "only coordinate format is supported"));
    }
    let pattern = match head[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" => true,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetric = match head[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut raw: HashMap<(usize, usize), f64> = HashMap::new();
    let mut count = 0usize;
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let Some((n, nnz)) = size else {
            if toks.len() != 3 {
                return Err(parse_err(line_no, "expected 'rows cols entries'"));
            }
            let p = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad size '{s}'")))
            };
            let (r, c, nnz) = (p(toks[0])?, p(toks[1])?, p(toks[2])?);
            if r != c {
                return Err(parse_err(line_no, format!("matrix is {r}×{c}, not square")));
            }
            size = Some((r, nnz));
            continue;
        };
        let want = if pattern { 2 } else { 3 };
        if toks.len() != want {
            return Err(parse_err(line_no, format!("expected {want} fields")));
        }
        let idx = |s: &str| -> Result<usize> {
            let k: usize = s
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad index '{s}'")))?;
            if k == 0 || k > n {
                return Err(parse_err(line_no, format!("index {k} outside 1..={n}")));
            }
            Ok(k - 1)
        };
        let (r, c) = (idx(toks[0])?, idx(toks[1])?);
        let v = if pattern {
            1.0
        } else {
            let v: f64 = toks[2]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad value '{}'", toks[2])))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, "non-finite value"));
            }
            v
        };
        count += 1;
        if count > nnz {
            return Err(parse_err(line_no, format!("more than the declared {nnz} entries")));
        }
        let key = if symmetric { (r.min(c), r.max(c)) } else { (r, c) };
        *raw.entry(key).or_insert(0.0) += v;
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if count != nnz {
        return Err(parse_err(0, format!("declared {nnz} entries, found {count}")));
    }

    let mut entries: Vec<(usize, usize, f64)> = if symmetric {
        raw.into_iter().map(|((i, j), v)| (i, j, v)).collect()
    } else {
        let mut out = Vec::new();
        for (&(i, j), &v) in &raw {
            if i > j {
                continue;
            }
            if i < j {
                let w = raw.get(&(j, i)).copied().unwrap_or(0.0);
                if (v - w).abs() > 1e-12 * v.abs().max(w.abs()) {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
            out.push((i, j, v));
        }
        for &(i, j) in raw.keys() {
            if i > j && !raw.contains_key(&(j, i)) && raw[&(i, j)] != 0.0 {
                return Err(Error::Asymmetric { row: j, col: i });
            }
        }
        out
    };
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(MatrixMarket { n, entries })
}

//! Random and structured benchmark graphs with unit weights.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::seed::{stream, Stream};

fn rng(seed: u64) -> Stream {
    stream(seed, u64::MAX, 0)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

fn unit(n: usize, edges: Vec<(usize, usize)>) -> Result<WeightedGraph> {
    WeightedGraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
}

/// Pairs `(v, w)` with `w < v < n`, each kept independently with probability `p`.
fn bernoulli_pairs(n: usize, p: f64, rng: &mut Stream, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    // Geometric skipping over the lower triangle.
    let lp = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / lp).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            emit(v, w as usize);
        }
    }
}

/// G(n, p).
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    check_prob("p", p)?;
    let mut edges = Vec::new();
    bernoulli_pairs(n, p, &mut rng(seed), |v, w| edges.push((v, w)));
    unit(n, edges)
}

/// G(n, p) with `p = d / (n - 1)`.
pub fn erdos_renyi_mean_degree(n: usize, d: f64, seed: u64) -> Result<WeightedGraph> {
    if n < 2 || d < 0.0 || d > (n - 1) as f64 {
        return Err(invalid(format!("mean degree {d} impossible with {n} nodes")));
    }
    erdos_renyi(n, d / (n - 1) as f64, seed)
}

/// Preferential attachment from an initial clique on `m + 1` nodes.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<WeightedGraph> {
    if m == 0 || n <= m {
        return Err(invalid(format!("need 0 < m < n, got m = {m}, n = {n}")));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    for v in 0..=m {
        for w in 0..v {
            edges.push((v, w));
            ends.extend([v, w]);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((v, t));
            ends.extend([v, t]);
        }
    }
    unit(n, edges)
}

/// Stochastic block model with `blocks` communities of (nearly) equal size.
pub fn stochastic_block(
    n: usize,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<WeightedGraph> {
    check_prob("p_in", p_in)?;
    check_prob("p_out", p_out)?;
    if blocks == 0 || blocks > n {
        return Err(invalid(format!("cannot split {n} nodes into {blocks} blocks")));
    }
    let block = |x: usize| x * blocks / n;
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        for w in 0..v {
            let p = if block(v) == block(w) { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((v, w));
            }
        }
    }
    unit(n, edges)
}

/// Uniform points in the unit square, each linked to its `k` nearest neighbors.
pub fn sensor(n: usize, k: usize, seed: u64) -> Result<WeightedGraph> {
    if k == 0 || k >= n {
        return Err(invalid(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    let mut rng = rng(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let mut edges = Vec::with_capacity(n * k);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n);
    for (i, &(x, y)) in pts.iter().enumerate() {
        dist.clear();
        dist.extend(
            pts.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, &(u, v))| ((u - x).powi(2) + (v - y).powi(2), j)),
        );
        dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &dist[..k] {
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    unit(n, edges)
}

/// Root `0` with `branches` pendant leaves and one path of `tail` extra nodes.
pub fn comet(branches: usize, tail: usize) -> Result<WeightedGraph> {
    let n = 1 + branches + tail;
    let mut edges: Vec<_> = (1..=branches).map(|v| (0, v)).collect();
    let mut prev = 0;
    for v in branches + 1..n {
        edges.push((prev, v));
        prev = v;
    }
    unit(n, edges)
}

/// `w × h` periodic grid.
pub fn torus(w: usize, h: usize) -> Result<WeightedGraph> {
    if w < 3 || h < 3 {
        return Err(invalid("torus sides must be at least 3"));
    }
    let id = |i: usize, j: usize| i * h + j;
    let mut edges = Vec::with_capacity(2 * w * h);
    for i in 0..w {
        for j in 0..h {
            edges.push((id(i, j), id((i + 1) % w, j)));
            edges.push((id(i, j), id(i, (j + 1) % h)));
        }
    }
    unit(w * h, edges)
}

/// Center `0` joined to `n - 1` leaves.
pub fn star(n: usize) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(invalid("star needs at least one node"));
    }
    unit(n, (1..n).map(|v| (0, v)).collect())
}

pub fn path(n: usize) -> Result<WeightedGraph> {
    unit(n, (1..n).map(|v| (v - 1, v)).collect())
}

pub fn complete(n: usize) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for v in 1..n {
        for w in 0..v {
            edges.push((v, w));
        }
    }
    unit(n, edges)
}

/// A graph family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    Er { n: usize, p: f64 },
    ErMeanDegree { n: usize, d: f64 },
    Ba { n: usize, m: usize },
    Sbm { n: usize, c: usize, p_in: f64, p_out: f64 },
    Sensor { n: usize, k: usize },
    Comet { branches: usize, tail: usize },
    Torus { w: usize, h: usize },
    Star { n: usize },
    Path { n: usize },
    Complete { n: usize },
}

impl GraphFamily {
    /// Builds the graph; `seed` is ignored by deterministic families.
    pub fn build(&self, seed: u64) -> Result<WeightedGraph> {
        match *self {
            GraphFamily::Er { n, p } => erdos_renyi(n, p, seed),
            GraphFamily::ErMeanDegree { n, d } => erdos_renyi_mean_degree(n, d, seed),
            GraphFamily::Ba { n, m } => barabasi_albert(n, m, seed),
            GraphFamily::Sbm { n, c, p_in, p_out } => stochastic_block(n, c, p_in, p_out, seed),
            GraphFamily::Sensor { n, k } => sensor(n, k, seed),
            GraphFamily::Comet { branches, tail } => comet(branches, tail),
            GraphFamily::Torus { w, h } => torus(w, h),
            GraphFamily::Star { n } => star(n),
            GraphFamily::Path { n } => path(n),
            GraphFamily::Complete { n } => complete(n),
        }
    }

    /// Parses a family name and `key=value` parameters.
    pub fn parse(name: &str, params: &[&str]) -> Result<Self> {
        let mut kv: HashMap<&str, &str> = HashMap::new();
        for p in params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, got '{p}'")))?;
            kv.insert(k.trim(), v.trim());
        }
        let mut take = |key: &str| -> Result<&str> {
            kv.remove(key)
                .ok_or_else(|| invalid(format!("family '{name}' needs parameter '{key}'")))
        };
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| invalid(format!("cannot parse {key} = '{v}'")))
        }
        let fam = match name {
            "er" => GraphFamily::Er {
                n: num("n", take("n")?)?,
                p: num("p", take("p")?)?,
            },
            "er_mean_degree" | "er-mean-degree" => GraphFamily::ErMeanDegree {
                n: num("n", take("n")?)?,
                d: num("d", take("d")?)?,
            },
            "ba" => GraphFamily::Ba {
                n: num("n", take("n")?)?,
                m: num("m", take("m")?)?,
            },
            "sbm" => GraphFamily::Sbm {
                n: num("n", take("n")?)?,
                c: num("c", take("c")?)?,
                p_in: num("p_in", take("p_in")?)?,
                p_out: num("p_out", take("p_out")?)?,
            },
            "sensor" => GraphFamily::Sensor {
                n: num("n", take("n")?)?,
                k: num("k", take("k")?)?,
            },
            "comet" => GraphFamily::Comet {
                branches: num("branches", take("branches")?)?,
                tail: num("tail", take("tail")?)?,
            },
            "torus" => GraphFamily::Torus {
                w: num("w", take("w")?)?,
                h: num("h", take("h")?)?,
            },
            "star" => GraphFamily::Star {
                n: num("n", take("n")?)?,
            },
            "path" => GraphFamily::Path {
                n: num("n", take("n")?)?,
            },
            "complete" => GraphFamily::Complete {
                n: num("n", take("n")?)?,
            },
            other => return Err(invalid(format!("unknown graph family '{other}'"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(invalid(format!("unknown parameter '{k}' for '{name}'")));
        }
        Ok(fam)
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    /// Compact form `family:key=value,key=value`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let params: Vec<&str> = rest.split(',').filter(|p| !p.is_empty()).collect();
        GraphFamily::parse(name.trim(), &params)
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Er { n, p } => write!(f, "er:n={n},p={p}"),
            GraphFamily::ErMeanDegree { n, d } => write!(f, "er_mean_degree:n={n},d={d}"),
            GraphFamily::Ba { n, m } => write!(f, "ba:n={n},m={m}"),
            GraphFamily::Sbm { n, c, p_in, p_out } => {
                write!(f, "sbm:n={n},c={c},p_in={p_in},p_out={p_out}")
            }
            GraphFamily::Sensor { n, k } => write!(f, "sensor:n={n},k={k}"),
            GraphFamily::Comet { branches, tail } => {
                write!(f, "comet:branches={branches},tail={tail}")
            }
            GraphFamily::Torus { w, h } => write!(f, "torus:w={w},h={h}"),
            GraphFamily::Star { n } => write!(f, "star:n={n}"),
            GraphFamily::Path { n } => write!(f, "path:n={n}"),
            GraphFamily::Complete { n } => write!(f, "complete:n={n}"),
        }
    }
}

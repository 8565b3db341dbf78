//! Immutable weighted graphs in compressed adjacency form.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Undirected graph with non-negative edge weights and optional killing weights.
///
/// The associated (sub-)Laplacian `L` has off-diagonal entries `w(x, y)` and
/// diagonal `-(w(x) + δ(x))`, so `-L` is positive semi-definite.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    node_weight: Vec<f64>,
    kill_weight: Vec<f64>,
}

/// Scalars of the spectrum that are cheap to read off the graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GraphScalars {
    /// Maximum node weight `max w(x)`.
    pub alpha: f64,
    /// Mean diagonal of `-L`, i.e. `Tr(-L) / n`.
    pub lambda_bar: f64,
    /// Gershgorin bound on the largest eigenvalue of `-L`.
    pub spectral_upper: f64,
    /// Maximum total rate `max (w(x) + δ(x))`.
    pub max_rate: f64,
}

impl WeightedGraph {
    /// Builds a graph from undirected weighted edges.
    ///
    /// Duplicate pairs are summed and zero weights dropped. Self-loops,
    /// negative or non-finite weights and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n > u32::MAX as usize - 1 {
            return Err(Error::InvalidParameter(format!("too many nodes: {n}")));
        }
        let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v, w) in edges {
            let bad = |reason| Error::InvalidEdge { u, v, weight: w, reason };
            if u >= n || v >= n {
                return Err(bad("node id out of range"));
            }
            if u == v {
                return Err(bad("self-loop"));
            }
            if !w.is_finite() {
                return Err(bad("non-finite weight"));
            }
            if w < 0.0 {
                return Err(bad("negative weight"));
            }
            if w == 0.0 {
                continue;
            }
            arcs.push((u as u32, v as u32, w));
            arcs.push((v as u32, u as u32, w));
        }
        arcs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(arcs.len());
        let mut weights = Vec::with_capacity(arcs.len());
        let mut node_weight = vec![0.0; n];
        let mut i = 0;
        while i < arcs.len() {
            let (u, v, mut w) = arcs[i];
            i += 1;
            while i < arcs.len() && arcs[i].0 == u && arcs[i].1 == v {
                w += arcs[i].2;
                i += 1;
            }
            targets.push(v);
            weights.push(w);
            offsets[u as usize + 1] += 1;
            node_weight[u as usize] += w;
        }
        for x in 0..n {
            offsets[x + 1] += offsets[x];
        }
        Ok(Self {
            offsets,
            targets,
            weights,
            node_weight,
            kill_weight: vec![0.0; n],
        })
    }

    /// Attaches killing weights `δ(x) ≥ 0`, turning `L` into a sub-Laplacian.
    pub fn with_kill_weights(mut self, kill: Vec<f64>) -> Result<Self> {
        if kill.len() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: kill.len(),
            });
        }
        if let Some(x) = kill.iter().position(|d| !d.is_finite() || *d < 0.0) {
            return Err(invalid_kill(x, kill[x]));
        }
        self.kill_weight = kill;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.node_weight.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Neighbors of `x` with edge weights, in increasing id order.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[x]..self.offsets[x + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(&y, &w)| (y as usize, w))
    }

    /// Weight of edge `{x, y}`, zero when absent.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let r = self.offsets[x]..self.offsets[x + 1];
        match self.targets[r.clone()].binary_search(&(y as u32)) {
            Ok(i) => self.weights[r.start + i],
            Err(_) => 0.0,
        }
    }

    /// Each undirected edge once, as `(x, y, w)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |x| {
            self.neighbors(x)
                .filter(move |&(y, _)| x < y)
                .map(move |(y, w)| (x, y, w))
        })
    }

    pub fn node_weight(&self, x: usize) -> f64 {
        self.node_weight[x]
    }

    pub fn kill_weight(&self, x: usize) -> f64 {
        self.kill_weight[x]
    }

    pub fn kill_weights(&self) -> &[f64] {
        &self.kill_weight
    }

    /// `w(x) + δ(x)`, the total jump rate out of `x`.
    #[inline]
    pub fn total_rate(&self, x: usize) -> f64 {
        self.node_weight[x] + self.kill_weight[x]
    }

    pub fn has_killing(&self) -> bool {
        self.kill_weight.iter().any(|&d| d > 0.0)
    }

    pub fn scalars(&self) -> GraphScalars {
        let n = self.n();
        let alpha = self.node_weight.iter().copied().fold(0.0, f64::max);
        let trace: f64 = (0..n).map(|x| self.total_rate(x)).sum();
        let spectral_upper = (0..n)
            .map(|x| 2.0 * self.node_weight[x] + self.kill_weight[x])
            .fold(0.0, f64::max);
        let max_rate = (0..n).map(|x| self.total_rate(x)).fold(0.0, f64::max);
        GraphScalars {
            alpha,
            lambda_bar: if n == 0 { 0.0 } else { trace / n as f64 },
            spectral_upper,
            max_rate,
        }
    }

    /// Dense (sub-)Laplacian `L`: off-diagonal `w`, diagonal `-(w + δ)`.
    pub fn dense_laplacian(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut l = DMatrix::zeros(n, n);
        for x in 0..n {
            for (y, w) in self.neighbors(x) {
                l[(x, y)] = w;
            }
            l[(x, x)] = -self.total_rate(x);
        }
        l
    }

    /// 64-bit FNV-1a hash of the canonical edge list and killing weights.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        h.write(&(self.n() as u64).to_le_bytes());
        for (x, y, w) in self.edges() {
            h.write(&(x as u64).to_le_bytes());
            h.write(&(y as u64).to_le_bytes());
            h.write(&w.to_bits().to_le_bytes());
        }
        for d in &self.kill_weight {
            h.write(&d.to_bits().to_le_bytes());
        }
        h.0
    }
}

fn invalid_kill(x: usize, d: f64) -> Error {
    Error::InvalidParameter(format!("killing weight {d} at node {x}"))
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

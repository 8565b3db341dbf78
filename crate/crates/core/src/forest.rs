//! Kirchhoff random forests: Wilson sampling at fixed rate and coupled trajectories.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::alias::{NeighborSampler, Step};
use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;

const NONE: u32 = u32::MAX;

/// Rooted spanning forest in successor form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    next: Vec<u32>,
    killed: Vec<bool>,
}

impl Forest {
    /// Builds a forest from successors, checking acyclicity.
    ///
    /// `killed[x]` marks `x` as a root created by a killing arrow; it must only
    /// be set on roots.
    pub fn from_successors(next: &[Option<usize>], killed: Vec<bool>) -> Result<Self> {
        let n = next.len();
        if killed.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: killed.len(),
            });
        }
        let mut raw = Vec::with_capacity(n);
        for (x, s) in next.iter().enumerate() {
            match *s {
                Some(y) if y >= n || y == x => {
                    return Err(invalid(format!("bad successor {y} for node {x}")))
                }
                Some(_) if killed[x] => {
                    return Err(invalid(format!("node {x} is killed but has a successor")))
                }
                Some(y) => raw.push(y as u32),
                None => raw.push(NONE),
            }
        }
        let f = Forest { next: raw, killed };
        if !f.is_acyclic() {
            return Err(invalid("successor map contains a cycle"));
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.next.len()
    }

    pub fn next(&self, x: usize) -> Option<usize> {
        match self.next[x] {
            NONE => None,
            y => Some(y as usize),
        }
    }

    pub fn is_root(&self, x: usize) -> bool {
        self.next[x] == NONE
    }

    /// Root created by a killing arrow (sub-Laplacian runs only).
    pub fn is_kill_root(&self, x: usize) -> bool {
        self.killed[x]
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(|&x| self.is_root(x))
    }

    pub fn root_count(&self) -> usize {
        self.next.iter().filter(|&&y| y == NONE).count()
    }

    /// Root of `x`'s tree by plain pointer following.
    pub fn root_of(&self, x: usize) -> usize {
        let mut v = x;
        while self.next[v] != NONE {
            v = self.next[v] as usize;
        }
        v
    }

    /// Flat root lookup table for every node.
    pub fn root_map(&self) -> RootMap {
        let mut path = Vec::new();
        root_map(&self.next, &self.killed, true, &mut path)
    }

    /// Every node reaches a root within `n` steps.
    pub fn is_acyclic(&self) -> bool {
        // 0 unvisited, 1 on current path, 2 known to reach a root
        let mut state = vec![0u8; self.n()];
        let mut path = Vec::new();
        for x in 0..self.n() {
            let mut v = x;
            while state[v] == 0 {
                state[v] = 1;
                path.push(v);
                if self.next[v] == NONE {
                    break;
                }
                v = self.next[v] as usize;
            }
            if state[v] == 1 && self.next[v] != NONE {
                return false;
            }
            for p in path.drain(..) {
                state[p] = 2;
            }
        }
        true
    }

    /// Successor map as options, convenient for enumeration and hashing.
    pub fn successors(&self) -> Vec<Option<usize>> {
        (0..self.n()).map(|x| self.next(x)).collect()
    }
}

fn root_map(next: &[u32], killed: &[bool], keep_kills: bool, path: &mut Vec<u32>) -> RootMap {
    let n = next.len();
    let mut root = vec![NONE; n];
    for x in 0..n {
        if root[x] != NONE {
            continue;
        }
        let mut v = x as u32;
        while root[v as usize] == NONE && next[v as usize] != NONE {
            path.push(v);
            v = next[v as usize];
        }
        let r = if root[v as usize] == NONE {
            root[v as usize] = v;
            v
        } else {
            root[v as usize]
        };
        for p in path.drain(..) {
            root[p as usize] = r;
        }
    }
    RootMap {
        roots: root,
        kill_roots: if keep_kills && killed.contains(&true) {
            killed.to_vec()
        } else {
            Vec::new()
        },
    }
}

/// Root of every node of a forest, with the kind of each root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootMap {
    roots: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    kill_roots: Vec<bool>,
}

impl RootMap {
    pub fn n(&self) -> usize {
        self.roots.len()
    }

    #[inline]
    pub fn root(&self, x: usize) -> usize {
        self.roots[x] as usize
    }

    /// Whether root `r` was created by a killing arrow.
    #[inline]
    pub fn is_kill_root(&self, r: usize) -> bool {
        !self.kill_roots.is_empty() && self.kill_roots[r]
    }

    pub fn has_kill_tags(&self) -> bool {
        !self.kill_roots.is_empty()
    }

    pub fn root_count(&self) -> usize {
        (0..self.n()).filter(|&x| self.root(x) == x).count()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.roots
    }
}

/// Cost counters of a sampling run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostStats {
    /// Freshly drawn (mark, arrow) pairs.
    pub sampled: u64,
    /// Extra reads of arrows already drawn, during unfreezing.
    pub rereads: u64,
    /// Nodes of unfrozen trees visited for bookkeeping.
    pub scanned: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    rate: f64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rate
            .total_cmp(&other.rate)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Max-queue of `(q_x, x)` for the current MARK-roots. Ties pop the smaller id.
#[derive(Clone, Debug, Default)]
pub struct UnfreezeQueue {
    heap: BinaryHeap<Entry>,
}

impl UnfreezeQueue {
    pub fn push(&mut self, rate: f64, node: usize) {
        self.heap.push(Entry {
            rate,
            node: node as u32,
        });
    }

    pub fn peek(&self) -> Option<(f64, usize)> {
        self.heap.peek().map(|e| (e.rate, e.node as usize))
    }

    pub fn pop(&mut self) -> Option<(f64, usize)> {
        self.heap.pop().map(|e| (e.rate, e.node as usize))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Entries in popping order.
    pub fn into_sorted(self) -> Vec<(f64, usize)> {
        let mut v: Vec<_> = self
            .heap
            .into_sorted_vec()
            .into_iter()
            .map(|e| (e.rate, e.node as usize))
            .collect();
        v.reverse();
        v
    }
}

/// Output of a fixed-rate Wilson run.
#[derive(Clone, Debug)]
pub struct WilsonSample {
    pub forest: Forest,
    pub queue: UnfreezeQueue,
    pub cost: CostStats,
}

/// Optional extras recorded along a trajectory.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrajectoryOptions {
    /// Keep the full forest at every grid point.
    pub keep_forests: bool,
    /// Record the root map after every unfreezing event.
    pub record_events: bool,
    /// Check acyclicity after every event (O(n) each).
    pub audit: bool,
}

/// Root map recorded right after an unfreezing event.
#[derive(Clone, Debug, Serialize)]
pub struct EventSnapshot {
    pub q: f64,
    pub node: usize,
    pub roots: RootMap,
}

/// The coupled process `q ↦ Φ_q` observed on a grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub q_min: f64,
    pub q_max: f64,
    /// Requested grid, ascending.
    pub grid: Vec<f64>,
    /// Root map of `Φ_q` for each grid value.
    pub snapshots: Vec<RootMap>,
    /// Full forests per grid value, when requested.
    pub forests: Vec<Forest>,
    /// The forest at `q_max`.
    pub top: Forest,
    pub events: Vec<EventSnapshot>,
    pub cost: CostStats,
}

/// Graph plus alias tables, shareable across threads.
#[derive(Clone, Debug)]
pub struct ForestSampler<'g> {
    graph: &'g WeightedGraph,
    alias: NeighborSampler,
}

impl<'g> ForestSampler<'g> {
    pub fn new(graph: &'g WeightedGraph) -> Self {
        Self {
            graph,
            alias: NeighborSampler::new(graph),
        }
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn alias(&self) -> &NeighborSampler {
        &self.alias
    }

    /// Samples `Φ_q` with Wilson's algorithm.
    pub fn wilson<R: Rng + ?Sized>(&self, q: f64, rng: &mut R) -> Result<WilsonSample> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid(format!("rate must be positive and finite, got {q}")));
        }
        let mut st = State::new(self, false);
        st.wilson(q, rng);
        Ok(WilsonSample {
            forest: st.forest(),
            queue: st.queue,
            cost: st.cost,
        })
    }

    /// Samples the coupled trajectory from `q_max` down to `q_min`.
    ///
    /// The snapshot at grid value `g` is the forest after every unfreezing
    /// event with threshold strictly above `g`.
    pub fn trajectory<R: Rng + ?Sized>(
        &self,
        q_min: f64,
        q_max: f64,
        grid: &[f64],
        rng: &mut R,
        opts: TrajectoryOptions,
    ) -> Result<Trajectory> {
        if !(q_min > 0.0) || !(q_max >= q_min) || !q_max.is_finite() {
            return Err(invalid(format!(
                "need 0 < q_min <= q_max, got [{q_min}, {q_max}]"
            )));
        }
        if grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("grid must be sorted ascending"));
        }
        if grid.iter().any(|&g| !(g >= q_min && g <= q_max)) {
            return Err(invalid("grid values must lie in [q_min, q_max]"));
        }
        let keep_kills = self.graph.has_killing();
        let mut st = State::new(self, true);
        st.wilson(q_max, rng);
        st.link_all();
        let top = st.forest();

        let mut snapshots = vec![None; grid.len()];
        let mut forests = Vec::new();
        let mut events = Vec::new();
        let mut path = Vec::new();
        let mut gi = grid.len();
        loop {
            let next_q = st.queue.peek().map_or(0.0, |e| e.0);
            while gi > 0 && grid[gi - 1] >= next_q {
                gi -= 1;
                snapshots[gi] = Some(root_map(&st.next, &st.killed, keep_kills, &mut path));
                if opts.keep_forests {
                    forests.push(st.forest());
                }
            }
            if next_q <= q_min {
                break;
            }
            let (q, u) = st.queue.pop().expect("peeked entry");
            st.unfreeze(u, q, rng);
            if opts.audit {
                let f = st.forest();
                if !f.is_acyclic() {
                    return Err(Error::Degenerate(format!("cycle after event at q = {q}")));
                }
            }
            if opts.record_events {
                events.push(EventSnapshot {
                    q,
                    node: u,
                    roots: root_map(&st.next, &st.killed, keep_kills, &mut path),
                });
            }
        }
        forests.reverse();
        Ok(Trajectory {
            q_min,
            q_max,
            grid: grid.to_vec(),
            snapshots: snapshots
                .into_iter()
                .map(|s| s.expect("every grid value recorded"))
                .collect(),
            forests,
            top,
            events,
            cost: st.cost,
        })
    }
}

/// Samples `Φ_q` with Wilson's algorithm.
pub fn wilson_sample<R: Rng + ?Sized>(
    g: &WeightedGraph,
    q: f64,
    rng: &mut R,
) -> Result<WilsonSample> {
    ForestSampler::new(g).wilson(q, rng)
}

/// Samples a coupled trajectory observed at `grid`.
pub fn coupled_trajectory<R: Rng + ?Sized>(
    g: &WeightedGraph,
    q_min: f64,
    q_max: f64,
    grid: &[f64],
    rng: &mut R,
) -> Result<Trajectory> {
    ForestSampler::new(g).trajectory(q_min, q_max, grid, rng, TrajectoryOptions::default())
}

struct State<'s, 'g> {
    sampler: &'s ForestSampler<'g>,
    next: Vec<u32>,
    killed: Vec<bool>,
    in_forest: Vec<bool>,
    replay: Vec<bool>,
    first_child: Vec<u32>,
    sibling: Vec<u32>,
    queue: UnfreezeQueue,
    cost: CostStats,
    pending: Vec<u32>,
    tree: Vec<u32>,
    track: bool,
}

impl<'s, 'g> State<'s, 'g> {
    fn new(sampler: &'s ForestSampler<'g>, coupled: bool) -> Self {
        let n = sampler.graph.n();
        let links = if coupled { n } else { 0 };
        Self {
            sampler,
            next: vec![NONE; n],
            killed: vec![false; n],
            in_forest: vec![false; n],
            replay: vec![false; n],
            first_child: vec![NONE; links],
            sibling: vec![NONE; links],
            queue: UnfreezeQueue::default(),
            cost: CostStats::default(),
            pending: Vec::new(),
            tree: Vec::new(),
            track: coupled,
        }
    }

    fn forest(&self) -> Forest {
        Forest {
            next: self.next.clone(),
            killed: self.killed.clone(),
        }
    }

    fn wilson<R: Rng + ?Sized>(&mut self, q: f64, rng: &mut R) {
        for x in 0..self.next.len() {
            if !self.in_forest[x] {
                self.walk(x, q, NONE, rng);
            }
            self.pending.clear();
        }
    }

    /// Reads a fresh stack level at `v`. Returns the successor, if any.
    #[inline]
    fn draw<R: Rng + ?Sized>(&mut self, v: usize, q: f64, rng: &mut R) -> Option<usize> {
        self.cost.sampled += 1;
        let rate = self.sampler.graph.total_rate(v);
        let u: f64 = rng.random();
        let threshold = u * rate / (1.0 - u);
        if threshold <= q {
            self.next[v] = NONE;
            self.killed[v] = false;
            self.queue.push(threshold, v);
            return None;
        }
        match self.sampler.alias.sample(v, rng) {
            Step::To(y) => {
                self.next[v] = y as u32;
                self.killed[v] = false;
                Some(y)
            }
            Step::Kill => {
                self.next[v] = NONE;
                self.killed[v] = true;
                None
            }
        }
    }

    /// Loop-erased walk from `start` until it hits the current forest.
    fn walk<R: Rng + ?Sized>(&mut self, start: usize, q: f64, reactivated: u32, rng: &mut R) {
        let mut v = start;
        while !self.in_forest[v] {
            if self.track {
                self.pending.push(v as u32);
            }
            if self.replay[v] {
                self.replay[v] = false;
                if v as u32 != reactivated {
                    self.cost.rereads += 1;
                }
                debug_assert!(self.next[v] != NONE, "tagged node {v} without arrow");
                v = self.next[v] as usize;
                continue;
            }
            match self.draw(v, q, rng) {
                Some(y) => v = y,
                None => self.in_forest[v] = true,
            }
        }
        let mut v = start;
        while !self.in_forest[v] {
            self.in_forest[v] = true;
            v = self.next[v] as usize;
        }
    }

    fn link(&mut self, x: usize) {
        let p = self.next[x];
        if p != NONE {
            self.sibling[x] = self.first_child[p as usize];
            self.first_child[p as usize] = x as u32;
        }
    }

    fn link_all(&mut self) {
        for x in 0..self.next.len() {
            self.link(x);
        }
    }

    /// Unfreezes root `u` at rate `q` and rebuilds its tree in Wilson's order.
    fn unfreeze<R: Rng + ?Sized>(&mut self, u: usize, q: f64, rng: &mut R) {
        self.tree.clear();
        self.tree.push(u as u32);
        let mut i = 0;
        while i < self.tree.len() {
            let mut c = self.first_child[self.tree[i] as usize];
            while c != NONE {
                self.tree.push(c);
                c = self.sibling[c as usize];
            }
            i += 1;
        }
        self.cost.scanned += self.tree.len() as u64;

        // The arrow stored under the mark that just expired.
        match self.sampler.alias.sample(u, rng) {
            Step::Kill => {
                self.killed[u] = true;
                return;
            }
            Step::To(y) => self.next[u] = y as u32,
        }
        for k in 0..self.tree.len() {
            let x = self.tree[k] as usize;
            self.in_forest[x] = false;
            self.replay[x] = true;
            self.first_child[x] = NONE;
        }

        self.pending.clear();
        self.walk(u, q, u as u32, rng);
        while let Some(v) = self.pending.pop() {
            if !self.in_forest[v as usize] {
                self.walk(v as usize, q, u as u32, rng);
            }
        }

        for k in 0..self.tree.len() {
            let x = self.tree[k] as usize;
            // Never read again: the old arrow stands.
            self.in_forest[x] = true;
            self.replay[x] = false;
        }
        for k in 0..self.tree.len() {
            let x = self.tree[k] as usize;
            self.link(x);
        }
    }
}

/// Cost predictions for a trajectory run down to `q0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostBounds {
    /// `Tr((q0 - L)^{-1} (q0 + W))`, when the dense solve was allowed.
    pub expected_sampled: Option<f64>,
    /// `n (1 + λ̄ / q0)`.
    pub sampled_upper: f64,
    /// `n ln(1 + α / q0)`, with `α` the largest total rate.
    pub reread_upper: f64,
}

/// Largest `n` for which [`cost_bounds`] runs the dense solve.
pub const DENSE_COST_CAP: usize = 2000;

/// Cost bounds for a trajectory down to `q0`; the exact mean of `S` is
/// computed densely only when `n ≤ dense_cap`.
pub fn cost_bounds(g: &WeightedGraph, q0: f64, dense_cap: usize) -> Result<CostBounds> {
    if !(q0 > 0.0) {
        return Err(invalid(format!("q0 must be positive, got {q0}")));
    }
    let n = g.n() as f64;
    let s = g.scalars();
    let expected_sampled = if g.n() <= dense_cap {
        Some(expected_sampled_exact(g, q0, dense_cap)?)
    } else {
        None
    };
    Ok(CostBounds {
        expected_sampled,
        sampled_upper: n * (1.0 + s.lambda_bar / q0),
        reread_upper: n * (1.0 + s.max_rate / q0).ln(),
    })
}

/// Exact expected number of fresh draws, `Tr((q0 - L)^{-1} (q0 + W))`.
pub fn expected_sampled_exact(g: &WeightedGraph, q0: f64, cap: usize) -> Result<f64> {
    let n = g.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut a: DMatrix<f64> = -g.dense_laplacian();
    for x in 0..n {
        a[(x, x)] += q0;
    }
    let inv = a
        .cholesky()
        .ok_or_else(|| Error::Degenerate("q0 - L is not positive definite".into()))?
        .inverse();
    Ok((0..n).map(|x| inv[(x, x)] * (q0 + g.total_rate(x))).sum())
}

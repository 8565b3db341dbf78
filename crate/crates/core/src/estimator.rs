//! Monte Carlo estimates of the rational moments `m_k(q) = (1/n) Σ_j (q / (q + λ_j))^k`.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::forest::{CostStats, ForestSampler, RootMap, TrajectoryOptions};
use crate::graph::WeightedGraph;
use crate::seed::stream;

/// Geometric grid `q_i = q0·r^i`, `i = 0..=N`, ending exactly at the upper value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QGrid {
    pub q0: f64,
    pub eps0: f64,
    pub values: Vec<f64>,
}

impl QGrid {
    /// `N = ⌈1/eps0⌉` steps from `q0` to `upper`.
    pub fn geometric(q0: f64, upper: f64, eps0: f64) -> Result<Self> {
        if !(q0 > 0.0) || !(q0 < upper) || !upper.is_finite() {
            return Err(invalid(format!("need 0 < q0 < upper, got q0 = {q0}, upper = {upper}")));
        }
        if !(eps0 > 0.0 && eps0 <= 1.0) {
            return Err(invalid(format!("eps0 must lie in (0, 1], got {eps0}")));
        }
        let steps = (1.0 / eps0 - 1e-9).ceil().max(1.0) as usize;
        let span = (upper / q0).ln();
        let mut values: Vec<f64> = (0..=steps)
            .map(|i| q0 * (span * i as f64 / steps as f64).exp())
            .collect();
        values[0] = q0;
        values[steps] = upper;
        Ok(Self { q0, eps0, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Grid from `q0` to `2α`.
pub fn make_grid(q0: f64, alpha: f64, eps0: f64) -> Result<QGrid> {
    QGrid::geometric(q0, 2.0 * alpha, eps0)
}

/// `|ξ^k|` for `k = 1..=l` from `l` independent root maps at one rate.
///
/// `R^1(x)` is the root of `x` in the first forest, `R^{k+1}(x)` the root of
/// `R^k(x)` in forest `k + 1`, and `ξ^k = {x : R^k(x) = x}`. A chain that
/// reaches a kill root is dropped for that and all later `k`.
pub fn xi_sizes(maps: &[&RootMap]) -> Result<Vec<usize>> {
    let mut out = vec![0usize; maps.len()];
    let Some(first) = maps.first() else {
        return Ok(out);
    };
    let n = first.n();
    if let Some(m) = maps.iter().find(|m| m.n() != n) {
        return Err(Error::SizeMismatch {
            expected: n,
            found: m.n(),
        });
    }
    for x in 0..n {
        let mut y = x;
        for (k, m) in maps.iter().enumerate() {
            y = m.root(y);
            if m.is_kill_root(y) {
                break;
            }
            if y == x {
                out[k] += 1;
            }
        }
    }
    Ok(out)
}

/// Per-(q, k) moment estimates with standard errors across groups.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimates {
    pub grid: Vec<f64>,
    pub n: usize,
    pub replicas: usize,
    pub samples: usize,
    /// Sum over groups of `|ξ_q^k|`, index `q·l + (k - 1)`.
    sums: Vec<u64>,
    sums_sq: Vec<u128>,
    mean: Vec<f64>,
    stderr: Vec<f64>,
    /// Total cost over all trajectories.
    pub cost: CostStats,
}

impl MomentEstimates {
    /// Aggregates per-group counts laid out as `[q][k]`.
    pub fn from_counts(grid: Vec<f64>, n: usize, replicas: usize, groups: &[Vec<u32>]) -> Result<Self> {
        let cells = grid.len() * replicas;
        let s = groups.len();
        if s < 2 {
            return Err(invalid("need at least two groups"));
        }
        if n == 0 {
            return Err(invalid("empty graph"));
        }
        if let Some(g) = groups.iter().find(|g| g.len() != cells) {
            return Err(Error::SizeMismatch {
                expected: cells,
                found: g.len(),
            });
        }
        let mut sums = vec![0u64; cells];
        let mut sums_sq = vec![0u128; cells];
        for g in groups {
            for (i, &c) in g.iter().enumerate() {
                sums[i] += c as u64;
                sums_sq[i] += (c as u128) * (c as u128);
            }
        }
        let sf = s as f64;
        let nf = n as f64;
        let mean = sums.iter().map(|&t| t as f64 / (sf * nf)).collect();
        let stderr = (0..cells)
            .map(|i| (count_variance(sums[i], sums_sq[i], s) / sf).sqrt() / nf)
            .collect();
        Ok(Self {
            grid,
            n,
            replicas,
            samples: s,
            sums,
            sums_sq,
            mean,
            stderr,
            cost: CostStats::default(),
        })
    }

    fn idx(&self, qi: usize, k: usize) -> usize {
        assert!((1..=self.replicas).contains(&k), "moment order {k} out of range");
        qi * self.replicas + k - 1
    }

    /// `m̂_k(q_i)`.
    pub fn mean(&self, qi: usize, k: usize) -> f64 {
        self.mean[self.idx(qi, k)]
    }

    pub fn stderr(&self, qi: usize, k: usize) -> f64 {
        self.stderr[self.idx(qi, k)]
    }

    /// `(m̂_1, ..., m̂_l)` at grid index `qi`.
    pub fn moments(&self, qi: usize) -> &[f64] {
        &self.mean[qi * self.replicas..(qi + 1) * self.replicas]
    }

    pub fn stderrs(&self, qi: usize) -> &[f64] {
        &self.stderr[qi * self.replicas..(qi + 1) * self.replicas]
    }

    /// Mean of `|ξ_q^k|` over groups.
    pub fn count_mean(&self, qi: usize, k: usize) -> f64 {
        self.sums[self.idx(qi, k)] as f64 / self.samples as f64
    }

    /// Unbiased sample variance of `|ξ_q^k|` over groups.
    pub fn count_variance(&self, qi: usize, k: usize) -> f64 {
        let i = self.idx(qi, k);
        count_variance(self.sums[i], self.sums_sq[i], self.samples)
    }

    /// Pairs violating `m̂_k ≥ m̂_{k+1}` or monotonicity in `q` by more than `slack` standard errors.
    pub fn monotonicity_violations(&self, slack: f64) -> usize {
        let l = self.replicas;
        let mut bad = 0;
        for qi in 0..self.grid.len() {
            for k in 1..l {
                let tol = slack * (self.stderr(qi, k) + self.stderr(qi, k + 1));
                if self.mean(qi, k + 1) > self.mean(qi, k) + tol {
                    bad += 1;
                }
            }
            if qi + 1 < self.grid.len() {
                for k in 1..=l {
                    let tol = slack * (self.stderr(qi, k) + self.stderr(qi + 1, k));
                    if self.mean(qi, k) > self.mean(qi + 1, k) + tol {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }

    /// CSV with columns `q,k,mean,stderr,s,l`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "q,k,mean,stderr,s,l")?;
        for (qi, q) in self.grid.iter().enumerate() {
            for k in 1..=self.replicas {
                writeln!(
                    out,
                    "{q},{k},{},{},{},{}",
                    self.mean(qi, k),
                    self.stderr(qi, k),
                    self.samples,
                    self.replicas
                )?;
            }
        }
        Ok(())
    }
}

fn count_variance(sum: u64, sum_sq: u128, s: usize) -> f64 {
    let s = s as u128;
    let sum = sum as u128;
    let num = s * sum_sq - sum * sum;
    num as f64 / (s * (s - 1)) as f64
}

/// Runs `s` groups of `l` coupled trajectories over `grid` and averages `|ξ|`.
///
/// Group `j`, replica `r` uses the stream seeded from `(base_seed, j, r)`,
/// so results do not depend on the execution policy.
pub fn estimate_moments(
    g: &WeightedGraph,
    grid: &[f64],
    replicas: usize,
    samples: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<MomentEstimates> {
    if replicas == 0 {
        return Err(invalid("need at least one replica"));
    }
    if samples < 2 {
        return Err(invalid("need at least two groups"));
    }
    if grid.is_empty() {
        return Err(invalid("empty grid"));
    }
    let sampler = ForestSampler::new(g);
    let (q_min, q_max) = (grid[0], grid[grid.len() - 1]);
    let groups = exec.try_map(samples, |j| -> Result<(Vec<u32>, CostStats)> {
        let mut trajs = Vec::with_capacity(replicas);
        let mut cost = CostStats::default();
        for r in 0..replicas {
            let mut rng = stream(base_seed, j as u64, r as u64);
            let t = sampler.trajectory(q_min, q_max, grid, &mut rng, TrajectoryOptions::default())?;
            cost.sampled += t.cost.sampled;
            cost.rereads += t.cost.rereads;
            cost.scanned += t.cost.scanned;
            trajs.push(t);
        }
        let mut counts = Vec::with_capacity(grid.len() * replicas);
        let mut maps = Vec::with_capacity(replicas);
        for qi in 0..grid.len() {
            maps.clear();
            maps.extend(trajs.iter().map(|t| &t.snapshots[qi]));
            counts.extend(xi_sizes(&maps)?.into_iter().map(|c| c as u32));
        }
        Ok((counts, cost))
    })?;
    let mut cost = CostStats::default();
    let mut counts = Vec::with_capacity(samples);
    for (c, k) in groups {
        cost.sampled += k.sampled;
        cost.rereads += k.rereads;
        cost.scanned += k.scanned;
        counts.push(c);
    }
    let mut est = MomentEstimates::from_counts(grid.to_vec(), g.n(), replicas, &counts)?;
    est.cost = cost;
    Ok(est)
}

/// A cell whose group variance exceeds the allowed multiple of its mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceViolation {
    pub q: f64,
    pub k: usize,
    pub variance: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    pub checked: usize,
    pub violations: Vec<VarianceViolation>,
}

impl VarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Var |ξ_q^k| ≤ 1.2 · E |ξ_q^k|` on every cell; needs `s ≥ 30`.
pub fn group_variance_check(est: &MomentEstimates) -> Result<VarianceReport> {
    if est.samples < 30 {
        return Err(invalid(format!("variance check needs s >= 30, got {}", est.samples)));
    }
    let mut violations = Vec::new();
    let mut checked = 0;
    for (qi, &q) in est.grid.iter().enumerate() {
        for k in 1..=est.replicas {
            checked += 1;
            let (variance, mean) = (est.count_variance(qi, k), est.count_mean(qi, k));
            if variance > 1.2 * mean {
                violations.push(VarianceViolation { q, k, variance, mean });
            }
        }
    }
    Ok(VarianceReport { checked, violations })
}

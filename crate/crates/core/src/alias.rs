//! Walker alias tables for O(1) neighbor sampling.

use rand::Rng;

use crate::graph::WeightedGraph;

const KILL: u32 = u32::MAX;

/// Outcome of one jump attempt out of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    To(usize),
    Kill,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    threshold: f64,
    primary: u32,
    alias: u32,
}

/// Per-node alias tables over `w(x, ·)` plus a killing pseudo-arrow of weight `δ(x)`.
#[derive(Clone, Debug)]
pub struct NeighborSampler {
    offsets: Vec<usize>,
    slots: Vec<Slot>,
}

impl NeighborSampler {
    pub fn new(g: &WeightedGraph) -> Self {
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut slots = Vec::with_capacity(2 * g.edge_count() + n);
        let mut outcomes: Vec<(u32, f64)> = Vec::new();
        let mut small = Vec::new();
        let mut large = Vec::new();
        offsets.push(0);
        for x in 0..n {
            outcomes.clear();
            outcomes.extend(g.neighbors(x).map(|(y, w)| (y as u32, w)));
            if g.kill_weight(x) > 0.0 {
                outcomes.push((KILL, g.kill_weight(x)));
            }
            let k = outcomes.len();
            let total: f64 = outcomes.iter().map(|o| o.1).sum();
            let base = slots.len();
            for &(y, w) in &outcomes {
                slots.push(Slot {
                    threshold: w * k as f64 / total,
                    primary: y,
                    alias: y,
                });
            }
            small.clear();
            large.clear();
            for i in 0..k {
                if slots[base + i].threshold < 1.0 {
                    small.push(i);
                } else {
                    large.push(i);
                }
            }
            while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
                small.pop();
                let donor = slots[base + l].primary;
                slots[base + s].alias = donor;
                let rest = slots[base + l].threshold - (1.0 - slots[base + s].threshold);
                slots[base + l].threshold = rest;
                if rest < 1.0 {
                    large.pop();
                    small.push(l);
                }
            }
            // Leftovers differ from 1 only by roundoff.
            for &i in small.iter().chain(&large) {
                slots[base + i].threshold = 1.0;
            }
            offsets.push(slots.len());
        }
        Self { offsets, slots }
    }

    /// Draws a neighbor of `x` (or a kill) with probability proportional to its weight.
    ///
    /// `x` must have positive total rate.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Step {
        let lo = self.offsets[x];
        let k = self.offsets[x + 1] - lo;
        debug_assert!(k > 0, "sampling from node {x} with zero rate");
        let u = rng.random::<f64>() * k as f64;
        let i = (u as usize).min(k - 1);
        let slot = &self.slots[lo + i];
        let y = if u - (i as f64) < slot.threshold {
            slot.primary
        } else {
            slot.alias
        };
        if y == KILL {
            Step::Kill
        } else {
            Step::To(y as usize)
        }
    }

    /// Categorical law encoded by the table of `x`, reconstructed exactly.
    pub fn probabilities(&self, x: usize) -> Vec<(Step, f64)> {
        let lo = self.offsets[x];
        let k = self.offsets[x + 1] - lo;
        let mut out: Vec<(Step, f64)> = Vec::new();
        let mut add = |y: u32, p: f64| {
            let step = if y == KILL {
                Step::Kill
            } else {
                Step::To(y as usize)
            };
            match out.iter_mut().find(|e| e.0 == step) {
                Some(e) => e.1 += p,
                None => out.push((step, p)),
            }
        };
        for s in &self.slots[lo..lo + k] {
            add(s.primary, s.threshold / k as f64);
            add(s.alias, (1.0 - s.threshold) / k as f64);
        }
        out.retain(|e| e.1 > 0.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn law_matches(g: &WeightedGraph) {
        let s = NeighborSampler::new(g);
        for x in 0..g.n() {
            if g.total_rate(x) == 0.0 {
                continue;
            }
            let law = s.probabilities(x);
            let total = g.total_rate(x);
            for (step, p) in &law {
                let want = match step {
                    Step::To(y) => g.weight(x, *y) / total,
                    Step::Kill => g.kill_weight(x) / total,
                };
                assert!((p - want).abs() < 1e-12, "node {x}: {p} vs {want}");
            }
            let mass: f64 = law.iter().map(|e| e.1).sum();
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tables_are_exact() {
        let g = WeightedGraph::from_edges(
            5,
            [(0, 1, 3.0), (0, 2, 1.0), (0, 3, 0.25), (0, 4, 7.5), (1, 2, 1e-6), (2, 3, 2.0)],
        )
        .unwrap()
        .with_kill_weights(vec![0.5, 0.0, 3.0, 0.0, 0.0])
        .unwrap();
        law_matches(&g);
    }

    #[test]
    fn weighted_frequencies() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 3.0), (0, 2, 1.0)]).unwrap();
        let s = NeighborSampler::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| s.sample(0, &mut rng) == Step::To(1))
            .count() as f64;
        let sd = (draws as f64 * 0.75 * 0.25).sqrt();
        assert!((hits - 0.75 * draws as f64).abs() < 4.0 * sd);
    }

    #[test]
    fn kill_half() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 1.0)])
            .unwrap()
            .with_kill_weights(vec![1.0, 0.0])
            .unwrap();
        let s = NeighborSampler::new(&g);
        let law = s.probabilities(0);
        let kill = law.iter().find(|e| e.0 == Step::Kill).unwrap().1;
        assert!((kill - 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_is_uniform() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        law_matches(&g);
    }
}

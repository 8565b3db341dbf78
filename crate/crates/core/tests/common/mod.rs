//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::HashMap;

use forest_spectra::forest::Forest;
use forest_spectra::WeightedGraph;
use nalgebra::DMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn triangle() -> WeightedGraph {
    WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
}

pub fn k2() -> WeightedGraph {
    WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap()
}

pub fn p3() -> WeightedGraph {
    WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
}

/// Outcome of one node in a rooted forest: arrow to a neighbor, mark root or kill root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    To(usize),
    Mark,
    Kill,
}

pub type ForestKey = Vec<Slot>;

pub fn key_of(f: &Forest) -> ForestKey {
    (0..f.n())
        .map(|x| match f.next(x) {
            Some(y) => Slot::To(y),
            None if f.is_kill_root(x) => Slot::Kill,
            None => Slot::Mark,
        })
        .collect()
}

fn acyclic(key: &[Slot]) -> bool {
    let n = key.len();
    (0..n).all(|x| {
        let mut v = x;
        for _ in 0..=n {
            match key[v] {
                Slot::To(y) => v = y,
                _ => return true,
            }
        }
        false
    })
}

/// Every rooted spanning forest with weight `q^{#mark}·δ^{kill}·Π w`.
pub fn enumerate_forests(g: &WeightedGraph, q: f64) -> Vec<(ForestKey, f64)> {
    let n = g.n();
    let options: Vec<Vec<(Slot, f64)>> = (0..n)
        .map(|x| {
            let mut o = vec![(Slot::Mark, q)];
            if g.kill_weight(x) > 0.0 {
                o.push((Slot::Kill, g.kill_weight(x)));
            }
            o.extend(g.neighbors(x).map(|(y, w)| (Slot::To(y), w)));
            o
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let key: Vec<Slot> = (0..n).map(|x| options[x][idx[x]].0).collect();
        if acyclic(&key) {
            let w: f64 = (0..n).map(|x| options[x][idx[x]].1).product();
            out.push((key, w));
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Upper-tail p-value of Pearson's statistic for observed keys against the enumerated law.
pub fn chi_square_p(law: &[(ForestKey, f64)], observed: &HashMap<ForestKey, u64>) -> f64 {
    let z: f64 = law.iter().map(|e| e.1).sum();
    let total: u64 = observed.values().sum();
    let mut stat = 0.0;
    let mut seen = 0u64;
    for (key, w) in law {
        let expect = total as f64 * w / z;
        let obs = observed.get(key).copied().unwrap_or(0);
        seen += obs;
        stat += (obs as f64 - expect).powi(2) / expect;
    }
    assert_eq!(seen, total, "sampled a forest outside the enumeration");
    let df = (law.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

/// Sorted eigenvalues of `-L`.
pub fn spectrum(g: &WeightedGraph) -> Vec<f64> {
    sorted_eigs(&(-g.dense_laplacian()))
}

pub fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// `(1/n) Tr(K_q^k)` with `K_q = q (q - L)^{-1}`, from the spectrum.
pub fn rational_moment(eigs: &[f64], q: f64, k: i32) -> f64 {
    eigs.iter().map(|l| (q / (q + l)).powi(k)).sum::<f64>() / eigs.len() as f64
}

/// `(1/n) #{λ ≤ q}`.
pub fn cdf(eigs: &[f64], q: f64) -> f64 {
    eigs.iter().filter(|&&l| l <= q * (1.0 + 1e-9) + 1e-12).count() as f64 / eigs.len() as f64
}

//! Dense eigendecomposition reference for validation runs.

use serde::Serialize;

use crate::embed::{SymmetricMatrix, TabulatedCdf};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub const DEFAULT_EXACT_CAP: usize = 4000;

/// Sorted eigenvalues of `-L` (or `-M`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactSpectrum {
    pub eigenvalues: Vec<f64>,
}

impl ExactSpectrum {
    fn from_dense(neg: nalgebra::DMatrix<f64>) -> Self {
        let mut eigenvalues: Vec<f64> = neg.symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `F(q) = #{λ ≤ q} / n`, with a round-off allowance on the comparison.
    pub fn cdf(&self, q: f64) -> f64 {
        let n = self.n();
        if n == 0 {
            return 0.0;
        }
        let scale = self.eigenvalues.iter().fold(1.0f64, |acc, l| acc.max(l.abs()));
        let cut = q + 1e-10 * scale;
        self.eigenvalues.partition_point(|&l| l <= cut) as f64 / n as f64
    }

    pub fn tabulate(&self, q: &[f64]) -> TabulatedCdf {
        TabulatedCdf {
            q: q.to_vec(),
            f: q.iter().map(|&x| self.cdf(x)).collect(),
        }
    }

    /// `(1/n) Σ (q / (q + λ))^k`.
    pub fn rational_moment(&self, q: f64, k: usize) -> f64 {
        let s: f64 = self
            .eigenvalues
            .iter()
            .map(|l| (q / (q + l)).powi(k as i32))
            .sum();
        s / self.n() as f64
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Spectrum of `-L`.
pub fn exact_oracle(g: &WeightedGraph, cap: usize) -> Result<ExactSpectrum> {
    check_cap(g.n(), cap)?;
    Ok(ExactSpectrum::from_dense(-g.dense_laplacian()))
}

/// Spectrum of `-M`.
pub fn exact_matrix_oracle(m: &SymmetricMatrix, cap: usize) -> Result<ExactSpectrum> {
    check_cap(m.n(), cap)?;
    Ok(ExactSpectrum::from_dense(-m.dense()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{path, star};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10)
    }

    #[test]
    fn small_spectra() {
        let tri = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert!(close(&exact_oracle(&tri, 10).unwrap().eigenvalues, &[0.0, 3.0, 3.0]));
        assert!(close(
            &exact_oracle(&star(5).unwrap(), 10).unwrap().eigenvalues,
            &[0.0, 1.0, 1.0, 1.0, 5.0]
        ));
        assert!(close(&exact_oracle(&path(3).unwrap(), 10).unwrap().eigenvalues, &[0.0, 1.0, 3.0]));
    }

    #[test]
    fn cdf_steps() {
        let s = exact_oracle(&path(3).unwrap(), 10).unwrap();
        assert!((s.cdf(0.5) - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.cdf(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.cdf(10.0), 1.0);
        assert!((s.rational_moment(1.0, 1) - (1.0 + 0.5 + 0.25) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            exact_oracle(&path(20).unwrap(), 10),
            Err(Error::TooLarge { n: 20, cap: 10 })
        ));
    }
}

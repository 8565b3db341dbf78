//! Reduction of real symmetric matrices to sub-Laplacians.
//!
//! A symmetric `M` is shifted to `M' = M - c·I` with
//! `M'(x, x) ≤ -Σ_y |M'(x, y)|`. Then `L1` (off-diagonals `|M'|`) and the
//! `2n`-node cover `L2` (positive parts within a sheet, negative parts across)
//! satisfy `spec(-L2) = spec(-L1) ⊎ spec(-M')`, hence `F = 2·F2 - F1`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;

/// Sparse real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    diag: Vec<f64>,
    /// Strict upper triangle, sorted, no duplicates, no zeros.
    upper: Vec<(usize, usize, f64)>,
}

impl SymmetricMatrix {
    /// Builds `M` from entries `(i, j, v)` meaning `M(i, j) = M(j, i) = v`.
    /// Repeated positions are summed.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut diag = vec![0.0; n];
        let mut upper = Vec::new();
        for (i, j, v) in entries {
            if i >= n || j >= n {
                return Err(invalid(format!("entry ({i}, {j}) outside a {n}×{n} matrix")));
            }
            if !v.is_finite() {
                return Err(invalid(format!("non-finite entry at ({i}, {j})")));
            }
            if i == j {
                diag[i] += v;
            } else {
                upper.push((i.min(j), i.max(j), v));
            }
        }
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        Ok(Self {
            diag,
            upper: merged,
        })
    }

    /// Reads a dense matrix, which must be symmetric to `1e-12` (relative to its largest entry).
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(invalid("matrix is not square"));
        }
        let scale = m.amax().max(1.0);
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, m[(i, i)]));
            for j in i + 1..n {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
                entries.push((i, j, 0.5 * (m[(i, j)] + m[(j, i)])));
            }
        }
        Self::from_entries(n, entries)
    }

    /// Laplacian of a graph, as a matrix.
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let n = g.n();
        let entries = g
            .edges()
            .chain((0..n).map(|x| (x, x, -g.total_rate(x))));
        Self::from_entries(n, entries).expect("graph entries are valid")
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self, x: usize) -> f64 {
        self.diag[x]
    }

    /// Strict upper-triangle entries `(i, j, M(i, j))` with `i < j`.
    pub fn off_diagonal(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    /// `Σ_{y≠x} |M(x, y)|` for every `x`.
    pub fn abs_row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n()];
        for &(i, j, v) in &self.upper {
            s[i] += v.abs();
            s[j] += v.abs();
        }
        s
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for &(i, j, v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// `M - c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d - c).collect(),
            upper: self.upper.clone(),
        }
    }
}

/// Smallest `c ≥ 0` making `M - c·I` diagonally dominant with non-positive diagonal.
pub fn dominance_shift(m: &SymmetricMatrix) -> f64 {
    let rows = m.abs_row_sums();
    (0..m.n())
        .map(|x| m.diag(x) + rows[x])
        .fold(0.0, f64::max)
}

/// Returns `(M - c·I, c)` with the minimal dominance-restoring `c`.
pub fn shift_to_dominant(m: &SymmetricMatrix) -> (SymmetricMatrix, f64) {
    let c = dominance_shift(m);
    (m.shifted(c), c)
}

fn dominance_tol(m: &SymmetricMatrix, x: usize, rows: &[f64]) -> f64 {
    1e-12 * (m.diag(x).abs() + rows[x]).max(1.0)
}

/// Graph with `w(x, y) = M'(x, y)` and `δ(x) = -M'(x, x) - Σ_y M'(x, y)`.
pub fn make_sub_laplacian(m: &SymmetricMatrix) -> Result<WeightedGraph> {
    if let Some(&(i, j, v)) = m.off_diagonal().iter().find(|e| e.2 < 0.0) {
        return Err(invalid(format!("negative off-diagonal {v} at ({i}, {j})")));
    }
    let rows = m.abs_row_sums();
    let kill = killing_weights(m, &rows)?;
    WeightedGraph::from_edges(m.n(), m.off_diagonal().iter().copied())?.with_kill_weights(kill)
}

fn killing_weights(m: &SymmetricMatrix, rows: &[f64]) -> Result<Vec<f64>> {
    (0..m.n())
        .map(|x| {
            let d = -m.diag(x) - rows[x];
            if d < -dominance_tol(m, x, rows) {
                Err(invalid(format!(
                    "row {x} is not diagonally dominant (excess {})",
                    -d
                )))
            } else {
                Ok(d.max(0.0))
            }
        })
        .collect()
}

/// The two sub-Laplacians whose spectra combine into that of `M'`.
#[derive(Clone, Debug)]
pub struct CoverPair {
    /// Off-diagonals `|M'|` on `n` nodes.
    pub l1: WeightedGraph,
    /// Double cover on `2n` nodes; node `x + n` is the mirror of `x`.
    pub l2: WeightedGraph,
    /// Diagonal shift `c` with `M' = M - c·I`.
    pub shift: f64,
}

/// Builds the cover pair of a dominant `M'` (no shift applied).
pub fn double_cover(m: &SymmetricMatrix) -> Result<CoverPair> {
    let n = m.n();
    let rows = m.abs_row_sums();
    let kill = killing_weights(m, &rows)?;
    let l1 = WeightedGraph::from_edges(n, m.off_diagonal().iter().map(|&(i, j, v)| (i, j, v.abs())))?
        .with_kill_weights(kill.clone())?;
    let mut edges = Vec::with_capacity(2 * m.off_diagonal().len());
    for &(i, j, v) in m.off_diagonal() {
        if v > 0.0 {
            edges.push((i, j, v));
            edges.push((i + n, j + n, v));
        } else {
            edges.push((i, j + n, -v));
            edges.push((i + n, j, -v));
        }
    }
    let mut kill2 = kill.clone();
    kill2.extend_from_slice(&kill);
    let l2 = WeightedGraph::from_edges(2 * n, edges)?.with_kill_weights(kill2)?;
    Ok(CoverPair { l1, l2, shift: 0.0 })
}

/// Shifts `M` by the dominance value plus `extra_shift` and builds the cover pair.
pub fn embed(m: &SymmetricMatrix, extra_shift: f64) -> Result<CoverPair> {
    if !(extra_shift >= 0.0) {
        return Err(invalid(format!("extra shift must be non-negative, got {extra_shift}")));
    }
    let c = dominance_shift(m) + extra_shift;
    let mut pair = double_cover(&m.shifted(c))?;
    pair.shift = c;
    Ok(pair)
}

/// CDF values on a grid of rates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TabulatedCdf {
    pub q: Vec<f64>,
    pub f: Vec<f64>,
}

/// CDF of `-M` recovered from the cover pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CombinedCdf {
    /// `q - c`, abscissa for `-M`.
    pub abscissa: Vec<f64>,
    /// `2·F2 - F1` as computed.
    pub raw: Vec<f64>,
    /// `raw` clamped to `[0, 1]`.
    pub clamped: Vec<f64>,
    /// `clamped` after the non-decreasing projection.
    pub monotone: Vec<f64>,
}

pub fn combine_cdfs(f1: &TabulatedCdf, f2: &TabulatedCdf, c: f64) -> Result<CombinedCdf> {
    let same = f1.q.len() == f2.q.len()
        && f1
            .q
            .iter()
            .zip(&f2.q)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    if !same || f1.f.len() != f1.q.len() || f2.f.len() != f2.q.len() {
        return Err(invalid("cover CDFs are tabulated on different grids"));
    }
    let raw: Vec<f64> = f1.f.iter().zip(&f2.f).map(|(a, b)| 2.0 * b - a).collect();
    let clamped: Vec<f64> = raw.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Ok(CombinedCdf {
        abscissa: f1.q.iter().map(|q| q - c).collect(),
        monotone: isotonic(&clamped),
        raw,
        clamped,
    })
}

/// Least-squares non-decreasing fit (pool adjacent violators).
pub fn isotonic(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().unwrap();
            *last = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, k)| std::iter::repeat_n(v, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig(m: &DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = (-m.clone()).symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn laplacian_needs_no_shift() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let m = SymmetricMatrix::from_graph(&g);
        let (m2, c) = shift_to_dominant(&m);
        assert_eq!(c, 0.0);
        assert_eq!(m2, m);
        let back = make_sub_laplacian(&m).unwrap();
        assert_eq!(back, g);
        assert!(!back.has_killing());
    }

    #[test]
    fn diagonal_shift() {
        let m = SymmetricMatrix::from_entries(2, [(0, 0, 1.0), (1, 1, -3.0)]).unwrap();
        let (m2, c) = shift_to_dominant(&m);
        assert_eq!(c, 1.0);
        assert_eq!((m2.diag(0), m2.diag(1)), (0.0, -4.0));
    }

    #[test]
    fn k2_with_killing() {
        let m = SymmetricMatrix::from_entries(2, [(0, 0, -2.0), (1, 1, -2.0), (0, 1, 1.0)]).unwrap();
        let g = make_sub_laplacian(&m).unwrap();
        assert_eq!(g.kill_weights(), &[1.0, 1.0]);
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn sign_conditions_enforced() {
        let neg = SymmetricMatrix::from_entries(2, [(0, 0, -2.0), (1, 1, -2.0), (0, 1, -1.0)]).unwrap();
        assert!(make_sub_laplacian(&neg).is_err());
        let weak = SymmetricMatrix::from_entries(2, [(0, 0, -0.5), (1, 1, -2.0), (0, 1, 1.0)]).unwrap();
        assert!(make_sub_laplacian(&weak).is_err());
        assert!(double_cover(&weak).is_err());
    }

    #[test]
    fn asymmetric_dense_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(
            SymmetricMatrix::from_dense(&m),
            Err(Error::Asymmetric { row: 0, col: 1 })
        ));
    }

    #[test]
    fn small_cover_spectra() {
        let m = SymmetricMatrix::from_entries(2, [(0, 0, -1.0), (1, 1, -1.0), (0, 1, -1.0)]).unwrap();
        let pair = double_cover(&m).unwrap();
        assert!(!pair.l1.has_killing());
        let s1 = eig(&pair.l1.dense_laplacian());
        let s2 = eig(&pair.l2.dense_laplacian());
        let s = eig(&m.dense());
        for (a, b) in s1.iter().zip([0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in s2.iter().zip([0.0, 0.0, 2.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in s.iter().zip([0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_offdiagonals_give_two_copies() {
        let m = SymmetricMatrix::from_entries(3, [(0, 0, -3.0), (1, 1, -2.0), (2, 2, -2.0), (0, 1, 1.0), (0, 2, 1.5)])
            .unwrap();
        let pair = double_cover(&m).unwrap();
        assert_eq!(pair.l2.edge_count(), 2 * pair.l1.edge_count());
        for x in 0..3 {
            assert!(pair.l2.neighbors(x).all(|(y, _)| y < 3));
        }
    }

    #[test]
    fn combine_identities() {
        let q = vec![1.0, 2.0, 3.0];
        let f1 = TabulatedCdf { q: q.clone(), f: vec![0.1, 0.4, 0.9] };
        let same = combine_cdfs(&f1, &f1, 0.0).unwrap();
        assert_eq!(same.clamped, f1.f);
        let zero = TabulatedCdf { q: q.clone(), f: vec![0.0; 3] };
        let half = TabulatedCdf { q: q.clone(), f: vec![0.5; 3] };
        let one = combine_cdfs(&zero, &half, 2.0).unwrap();
        assert_eq!(one.clamped, vec![1.0; 3]);
        assert_eq!(one.abscissa, vec![-1.0, 0.0, 1.0]);
        let other = TabulatedCdf { q: vec![1.0, 2.0], f: vec![0.0; 2] };
        assert!(combine_cdfs(&f1, &other, 0.0).is_err());
    }

    #[test]
    fn pav_pools_violators() {
        assert_eq!(isotonic(&[1.0, 3.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(isotonic(&[3.0, 2.0, 1.0]), vec![2.0, 2.0, 2.0]);
        assert!(isotonic(&[]).is_empty());
    }
}

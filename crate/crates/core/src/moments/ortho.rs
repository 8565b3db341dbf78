//! Orthogonal polynomials of a moment functional via the three-term recurrence.

use serde::Serialize;

use super::poly::Poly;

/// `⟨P, Q⟩ = Σ p_i q_j m_{i+j}`; requires `deg P + deg Q < m.len()`.
pub fn inner(p: &Poly, q: &Poly, m: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, &a) in p.coeffs().iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in q.coeffs().iter().enumerate() {
            if b != 0.0 {
                s += a * b * m[i + j];
            }
        }
    }
    s
}

/// Monic `U_k` and normalized `V_k = U_k / √⟨U_k, U_k⟩`.
///
/// With `l = m.len() - 1`, an even `l = 2r` yields `U, V` up to degree `r`
/// and an odd `l = 2r + 1` yields `U` up to `r + 1` and `V` up to `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalPolynomials {
    pub monic: Vec<Poly>,
    pub normalized: Vec<Poly>,
    /// `⟨U_k, U_k⟩` for each normalized degree.
    pub norms: Vec<f64>,
    /// First degree whose squared norm fell below tolerance.
    pub singular_at: Option<usize>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

/// Runs the recurrence; `tol(k)` is the singularity threshold for `⟨U_k, U_k⟩`.
pub fn orthogonal_system(m: &[f64], tol: impl Fn(usize) -> f64) -> OrthogonalPolynomials {
    let l = m.len().saturating_sub(1);
    let mut monic = vec![Poly::constant(1.0)];
    let mut norms = Vec::new();
    let mut singular_at = None;
    if m.is_empty() || !(m[0] > tol(0)) {
        singular_at = Some(0);
    } else {
        norms.push(m[0]);
        let mut k = 0;
        while 2 * k + 1 <= l {
            let uk = &monic[k];
            let beta = inner(&uk.times_x_minus(0.0), uk, m) / norms[k];
            let mut next = uk.times_x_minus(beta);
            if k >= 1 {
                next = next.add_scaled(&monic[k - 1], -norms[k] / norms[k - 1]);
            }
            monic.push(next);
            if 2 * (k + 1) > l {
                break;
            }
            let nk = inner(&monic[k + 1], &monic[k + 1], m);
            if !(nk > tol(k + 1)) {
                singular_at = Some(k + 1);
                break;
            }
            norms.push(nk);
            k += 1;
        }
    }
    let normalized = norms
        .iter()
        .zip(&monic)
        .map(|(n, u)| u.scale(1.0 / n.sqrt()))
        .collect();
    OrthogonalPolynomials {
        monic,
        normalized,
        norms,
        singular_at,
    }
}

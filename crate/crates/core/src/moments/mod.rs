//! Truncated moment problem on a compact interval.
//!
//! Everything is computed on `[0, 1]` after the affine map `u = (x - a) / (b - a)`
//! and mapped back; weights are unchanged by the map.

mod ortho;
mod poly;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub use ortho::{inner, orthogonal_system, OrthogonalPolynomials};
pub use poly::{real_roots, Poly};

/// Moments `m_0..m_l` of a measure on `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    pub a: f64,
    pub b: f64,
    pub moments: Vec<f64>,
}

impl MomentSequence {
    pub fn new(a: f64, b: f64, moments: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("need a finite interval a < b, got [{a}, {b}]")));
        }
        if moments.is_empty() || moments.iter().any(|m| !m.is_finite()) {
            return Err(invalid("moments must be finite and include m_0"));
        }
        Ok(Self { a, b, moments })
    }

    /// Highest moment index `l`.
    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn m0(&self) -> f64 {
        self.moments[0]
    }

    /// `m_0..m_k`.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            a: self.a,
            b: self.b,
            moments: self.moments[..=k].to_vec(),
        }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.a) / self.width()
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.a + self.width() * u
    }

    /// Moments of the pushed-forward measure on `[0, 1]`.
    pub fn unit_moments(&self) -> Vec<f64> {
        let (a, w) = (self.a, self.width());
        let mut binom = vec![1.0f64];
        (0..self.moments.len())
            .map(|k| {
                if k > 0 {
                    let mut next = vec![1.0; k + 1];
                    for j in 1..k {
                        next[j] = binom[j - 1] + binom[j];
                    }
                    binom = next;
                }
                let s: f64 = (0..=k)
                    .map(|j| binom[j] * (-a).powi((k - j) as i32) * self.moments[j])
                    .sum();
                s / w.powi(k as i32)
            })
            .collect()
    }

    fn unit(&self) -> Unit {
        Unit {
            m: self.unit_moments(),
            width: self.width(),
        }
    }

    fn map_back(&self, mu: AtomicMeasure) -> AtomicMeasure {
        AtomicMeasure {
            atoms: mu.atoms.iter().map(|&u| self.from_unit(u)).collect(),
            weights: mu.weights,
        }
    }
}

/// Finite positive combination of point masses, atoms ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(invalid("atoms and weights differ in length"));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            atoms: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn moment(&self, k: usize) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(k as i32))
            .sum()
    }

    /// `m_0..m_l`.
    pub fn moments(&self, l: usize) -> Vec<f64> {
        (0..=l).map(|k| self.moment(k)).collect()
    }

    /// Mass of `]ξ, ∞[`.
    pub fn mass_above(&self, xi: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(x, _)| **x > xi)
            .map(|(_, w)| w)
            .sum()
    }

    /// Mass of `[ξ, ∞[`.
    pub fn mass_from(&self, xi: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(x, _)| **x >= xi)
            .map(|(_, w)| w)
            .sum()
    }

    /// Endpoint atoms count once, interior atoms twice.
    pub fn index(&self, a: f64, b: f64) -> usize {
        self.atoms
            .iter()
            .map(|&x| if x == a || x == b { 1 } else { 2 })
            .sum()
    }
}

/// Outcome of testing a sequence for admissibility.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Regularity {
    /// Every moment lies strictly inside its admissible interval.
    Regular,
    /// `m_order` sits on the boundary; the representing measure is unique.
    Singular {
        order: usize,
        representation: AtomicMeasure,
    },
    /// No positive measure on `[a, b]` has these moments; `order` is the first offending index.
    Inadmissible { order: usize },
}

/// Moments in unit coordinates with the original width, for tolerances.
struct Unit {
    m: Vec<f64>,
    width: f64,
}

const REPRODUCE_TOL: f64 = 1e-9;
const BOUNDARY_TOL: f64 = 1e-12;
const WEIGHT_FLOOR: f64 = 1e-12;
const MERGE_TOL: f64 = 1e-12;
const ROOT_SLACK: f64 = 1e-9;

fn unit_ortho(m: &[f64], width: f64) -> OrthogonalPolynomials {
    let m0 = m.first().copied().unwrap_or(0.0).abs();
    // Singularity threshold stated for the original interval, moved to unit scale.
    let s = (width.max(1.0) / width).powi(2);
    orthogonal_system(m, |k| 1e-12 * m0 * s.powi(k as i32))
}

fn degenerate(what: &str) -> Error {
    Error::Degenerate(what.to_string())
}

/// Roots of `p` in `[0, 1]`, requiring exactly `count` of them.
fn unit_roots(p: &Poly, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let roots: Vec<f64> = real_roots(p)
        .into_iter()
        .filter(|&x| x > -ROOT_SLACK && x < 1.0 + ROOT_SLACK)
        .map(|x| x.clamp(0.0, 1.0))
        .collect();
    if roots.len() != count {
        return Err(degenerate("orthogonal polynomial root outside the interval"));
    }
    Ok(roots)
}

/// Roots of the degree-`deg` orthogonal polynomial of the functional `m`.
fn orthogonal_roots(m: &[f64], deg: usize, width: f64) -> Result<Vec<f64>> {
    if deg == 0 {
        return Ok(Vec::new());
    }
    let o = unit_ortho(m, width);
    let u = o
        .monic
        .get(deg)
        .ok_or(Error::Singular { order: deg })?;
    if let Some(s) = o.singular_at {
        if s < deg {
            return Err(Error::Singular { order: s });
        }
    }
    unit_roots(u, deg)
}

/// Christoffel kernel `Σ_{k≤deg} V_k(ξ) V_k` of the functional `m`.
fn kernel(m: &[f64], deg: usize, xi: f64, width: f64) -> Result<Poly> {
    let o = unit_ortho(m, width);
    if o.normalized.len() <= deg {
        return Err(Error::Singular {
            order: o.normalized.len(),
        });
    }
    Ok(o.normalized[..=deg]
        .iter()
        .fold(Poly::constant(0.0), |acc, v| acc.add_scaled(v, v.eval(xi))))
}

/// Sorts atoms and merges those closer than the merge tolerance, keeping `keep` exact.
fn merge_atoms(mut atoms: Vec<f64>, keep: Option<f64>) -> Vec<f64> {
    atoms.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(atoms.len());
    for x in atoms {
        match out.last_mut() {
            Some(last) if (x - *last).abs() <= MERGE_TOL => {
                if Some(x) == keep {
                    *last = x;
                }
            }
            _ => out.push(x),
        }
    }
    out
}

/// Weights on `atoms` matching `m_0..m_{p-1}`, checked against every moment.
fn fit_weights(atoms: Vec<f64>, m: &[f64]) -> Result<AtomicMeasure> {
    let p = atoms.len();
    if p == 0 || p > m.len() {
        return Err(degenerate("bad atom count"));
    }
    let v = DMatrix::from_fn(p, p, |i, j| atoms[j].powi(i as i32));
    let rhs = DVector::from_column_slice(&m[..p]);
    let w = v
        .lu()
        .solve(&rhs)
        .ok_or_else(|| degenerate("singular Vandermonde system"))?;
    let scale = m[0].abs().max(f64::MIN_POSITIVE);
    let mut weights = Vec::with_capacity(p);
    for &x in w.iter() {
        if !x.is_finite() || x < -WEIGHT_FLOOR * scale {
            return Err(degenerate("negative weight"));
        }
        weights.push(x.max(0.0));
    }
    let mu = AtomicMeasure { atoms, weights };
    for (k, &mk) in m.iter().enumerate() {
        if (mu.moment(k) - mk).abs() > REPRODUCE_TOL * scale {
            return Err(degenerate("representation does not reproduce the moments"));
        }
    }
    Ok(mu)
}

impl Unit {
    fn l(&self) -> usize {
        self.m.len() - 1
    }

    /// `m^a_k = m_{k+1}` (measure `u·μ`).
    fn times_u(&self) -> Vec<f64> {
        self.m[1..].to_vec()
    }

    /// `m^b_k = m_k - m_{k+1}` (measure `(1 - u)·μ`).
    fn times_one_minus_u(&self) -> Vec<f64> {
        self.m.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// `m^{ab}_k = m_{k+1} - m_{k+2}` (measure `u(1 - u)·μ`).
    fn times_u_one_minus_u(&self) -> Vec<f64> {
        self.m.windows(3).map(|w| w[1] - w[2]).collect()
    }

    fn principal(&self) -> Result<(AtomicMeasure, AtomicMeasure)> {
        let l = self.l();
        let w = self.width;
        let (lower, upper) = if l % 2 == 0 {
            let r = l / 2;
            let mut lo = vec![0.0];
            lo.extend(orthogonal_roots(&self.times_u(), r, w)?);
            let mut hi = vec![1.0];
            hi.extend(orthogonal_roots(&self.times_one_minus_u(), r, w)?);
            (lo, hi)
        } else {
            let r = (l - 1) / 2;
            let lo = orthogonal_roots(&self.m, r + 1, w)?;
            let mut hi = vec![0.0, 1.0];
            hi.extend(orthogonal_roots(&self.times_u_one_minus_u(), r, w)?);
            (lo, hi)
        };
        Ok((
            fit_weights(merge_atoms(lower, None), &self.m)?,
            fit_weights(merge_atoms(upper, None), &self.m)?,
        ))
    }

    fn classify(&self) -> Result<Regularity> {
        let m0 = self.m[0];
        if !(m0 > 0.0) {
            if m0 == 0.0 && self.m.iter().all(|&v| v == 0.0) {
                return Ok(Regularity::Singular {
                    order: 0,
                    representation: AtomicMeasure {
                        atoms: Vec::new(),
                        weights: Vec::new(),
                    },
                });
            }
            return Ok(Regularity::Inadmissible { order: 0 });
        }
        let tol = BOUNDARY_TOL * m0;
        for k in 1..=self.l() {
            let prefix = Unit {
                m: self.m[..k].to_vec(),
                width: self.width,
            };
            let (lo, hi) = prefix.principal()?;
            let (mlo, mhi) = (lo.moment(k), hi.moment(k));
            let mk = self.m[k];
            if mk < mlo - tol || mk > mhi + tol {
                return Ok(Regularity::Inadmissible { order: k });
            }
            let (dlo, dhi) = (mk - mlo, mhi - mk);
            if dlo <= tol || dhi <= tol {
                let rep = if dlo <= dhi { lo } else { hi };
                for j in k + 1..=self.l() {
                    if (rep.moment(j) - self.m[j]).abs() > REPRODUCE_TOL * m0 {
                        return Ok(Regularity::Inadmissible { order: j });
                    }
                }
                return Ok(Regularity::Singular {
                    order: k,
                    representation: rep,
                });
            }
        }
        Ok(Regularity::Regular)
    }

    /// Canonical representation with an atom at `xi ∈ (0, 1)`; returns it with the weight at `xi`.
    fn canonical(&self, xi: f64) -> Result<(AtomicMeasure, f64)> {
        let l = self.l();
        let w = self.width;
        let mut branches: Vec<(f64, Result<Vec<f64>>)> = Vec::new();
        let with_roots = |mut base: Vec<f64>, q: &Poly, deg: usize| -> Result<Vec<f64>> {
            base.extend(unit_roots(q, deg)?);
            Ok(base)
        };
        if l % 2 == 1 {
            let r = (l - 1) / 2;
            let qa = kernel(&self.times_u(), r, xi, w)?;
            let qb = kernel(&self.times_one_minus_u(), r, xi, w)?;
            branches.push((xi * qa.eval(xi), with_roots(vec![xi, 0.0], &qa, r)));
            branches.push(((1.0 - xi) * qb.eval(xi), with_roots(vec![xi, 1.0], &qb, r)));
        } else {
            let r = l / 2;
            let q = kernel(&self.m, r, xi, w)?;
            branches.push((q.eval(xi), with_roots(vec![xi], &q, r)));
            if r >= 1 {
                let qab = kernel(&self.times_u_one_minus_u(), r - 1, xi, w)?;
                branches.push((
                    xi * (1.0 - xi) * qab.eval(xi),
                    with_roots(vec![xi, 0.0, 1.0], &qab, r - 1),
                ));
            }
        }
        branches.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut last = degenerate("no canonical branch");
        for (_, atoms) in branches {
            let fitted = atoms.and_then(|a| fit_weights(merge_atoms(a, Some(xi)), &self.m));
            match fitted {
                Ok(mu) => {
                    let t = mu
                        .atoms
                        .iter()
                        .zip(&mu.weights)
                        .find(|(x, _)| **x == xi)
                        .map_or(0.0, |(_, w)| *w);
                    return Ok((mu, t));
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

/// Recurrence polynomials of the functional in the original variable.
pub fn orthogonal_polynomials(ms: &MomentSequence) -> OrthogonalPolynomials {
    let m0 = ms.m0().abs();
    let s = ms.width().abs().max(1.0).powi(2);
    orthogonal_system(&ms.moments, |k| 1e-12 * m0 * s.powi(k as i32))
}

pub fn classify(ms: &MomentSequence) -> Result<Regularity> {
    let u = ms.unit();
    Ok(match u.classify()? {
        Regularity::Singular {
            order,
            representation,
        } => Regularity::Singular {
            order,
            representation: ms.map_back(representation),
        },
        other => other,
    })
}

fn require_regular(ms: &MomentSequence) -> Result<()> {
    match classify(ms)? {
        Regularity::Regular => Ok(()),
        Regularity::Singular { order, .. } => Err(Error::Singular { order }),
        Regularity::Inadmissible { order } => Err(Error::NotAdmissible { order }),
    }
}

/// Lower and upper principal representations of a regular sequence.
pub fn principal_representations(ms: &MomentSequence) -> Result<(AtomicMeasure, AtomicMeasure)> {
    require_regular(ms)?;
    let (lo, hi) = ms.unit().principal()?;
    Ok((ms.map_back(lo), ms.map_back(hi)))
}

/// Range `[m⁻_{l+1}, m⁺_{l+1}]` of the next moment over all representing measures.
pub fn admissible_interval(ms: &MomentSequence) -> Result<(f64, f64)> {
    let (lo, hi) = principal_representations(ms)?;
    let l = ms.order() + 1;
    Ok((lo.moment(l), hi.moment(l)))
}

/// Number of leading moments whose whole confidence interval is admissible.
///
/// `radii[k]` is the half-width for `m_k` (`radii[0]` is ignored). Moment `k`
/// counts when `[m_k - r_k, m_k + r_k]` lies inside the interval allowed by
/// the central values `m_0..m_{k-1}`.
pub fn validate_sequence(ms: &MomentSequence, radii: &[f64]) -> usize {
    let l = ms.order();
    for k in 1..=l {
        let r = radii.get(k).copied().unwrap_or(0.0);
        let prefix = ms.prefix(k - 1);
        let bounds = principal_representations(&prefix).map(|(lo, hi)| (lo.moment(k), hi.moment(k)));
        match bounds {
            Ok((lo, hi)) if ms.moments[k] - r >= lo && ms.moments[k] + r <= hi => {}
            _ => return k - 1,
        }
    }
    l
}

/// Representation with a prescribed atom at `xi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalRepresentation {
    pub measure: AtomicMeasure,
    pub xi: f64,
    /// Weight of the atom at `xi`.
    pub weight: f64,
}

pub fn canonical_representation(ms: &MomentSequence, xi: f64) -> Result<CanonicalRepresentation> {
    if !(xi > ms.a && xi < ms.b) {
        return Err(invalid(format!("ξ = {xi} not inside ]{}, {}[", ms.a, ms.b)));
    }
    require_regular(ms)?;
    let (mu, t) = ms.unit().canonical(ms.to_unit(xi))?;
    let mut measure = ms.map_back(mu);
    // Keep the prescribed atom bit-exact after the round trip.
    if let Some(i) = measure
        .atoms
        .iter()
        .position(|&x| (x - xi).abs() <= 4.0 * f64::EPSILON * ms.width())
    {
        measure.atoms[i] = xi;
    }
    Ok(CanonicalRepresentation {
        measure,
        xi,
        weight: t,
    })
}

/// Sharp bounds on `μ(]ξ, b])` and `μ([ξ, b])` over all `μ` with these moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarkovBounds {
    /// Smallest possible `μ(]ξ, b])`.
    pub lower: f64,
    /// Largest possible `μ([ξ, b])`.
    pub upper: f64,
    /// `upper - lower`.
    pub atom_weight: f64,
}

pub fn markov_bounds(ms: &MomentSequence, xi: f64) -> Result<MarkovBounds> {
    let m0 = ms.m0();
    if xi <= ms.a {
        return Ok(MarkovBounds {
            lower: m0,
            upper: m0,
            atom_weight: 0.0,
        });
    }
    if xi >= ms.b {
        return Ok(MarkovBounds {
            lower: 0.0,
            upper: 0.0,
            atom_weight: 0.0,
        });
    }
    let u = ms.unit();
    let ux = ms.to_unit(xi);
    match u.classify()? {
        Regularity::Inadmissible { order } => Err(Error::NotAdmissible { order }),
        Regularity::Singular { representation, .. } => {
            let eps = MERGE_TOL;
            let lower = representation.mass_above(ux + eps);
            let upper = representation.mass_from(ux - eps);
            Ok(MarkovBounds {
                lower,
                upper,
                atom_weight: upper - lower,
            })
        }
        Regularity::Regular => {
            let (mu, t) = u.canonical(ux)?;
            let lower = mu.mass_above(ux);
            Ok(MarkovBounds {
                lower,
                upper: lower + t,
                atom_weight: t,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(m: &[f64]) -> MomentSequence {
        MomentSequence::new(0.0, 1.0, m.to_vec()).unwrap()
    }

    fn uniform(l: usize) -> Vec<f64> {
        (0..=l).map(|k| 1.0 / (k as f64 + 1.0)).collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn one_moment_principals() {
        let (lo, hi) = principal_representations(&seq(&[1.0, 0.5])).unwrap();
        assert_eq!(lo.atoms, vec![0.5]);
        assert!(close(lo.weights[0], 1.0, 1e-15));
        assert_eq!(hi.atoms, vec![0.0, 1.0]);
        assert!(close(hi.weights[0], 0.5, 1e-15) && close(hi.weights[1], 0.5, 1e-15));
    }

    #[test]
    fn radau_lower_for_uniform() {
        let (lo, _) = principal_representations(&seq(&uniform(2))).unwrap();
        assert_eq!(lo.atoms.len(), 2);
        assert!(close(lo.atoms[0], 0.0, 1e-15) && close(lo.atoms[1], 2.0 / 3.0, 1e-14));
        assert!(close(lo.weights[0], 0.25, 1e-12) && close(lo.weights[1], 0.75, 1e-12));
        for (k, m) in uniform(2).iter().enumerate() {
            assert!(close(lo.moment(k), *m, 1e-12));
        }
    }

    #[test]
    fn next_moment_interval() {
        let (lo, hi) = admissible_interval(&seq(&[1.0, 0.5])).unwrap();
        assert!(close(lo, 0.25, 1e-15) && close(hi, 0.5, 1e-15));
        for c in [0.0, 1.0] {
            assert!(matches!(
                admissible_interval(&seq(&[1.0, c])),
                Err(Error::Singular { order: 1 })
            ));
        }
    }

    #[test]
    fn canonical_examples() {
        let c = canonical_representation(&seq(&[1.0, 0.5]), 0.25).unwrap();
        assert!(close(c.weight, 2.0 / 3.0, 1e-14));
        assert_eq!(c.measure.atoms, vec![0.25, 1.0]);
        assert!(close(c.measure.weights[1], 1.0 / 3.0, 1e-14));
        let d = canonical_representation(&seq(&[1.0, 0.5]), 0.5).unwrap();
        assert!(close(d.weight, 1.0, 1e-14));
        assert!(close(d.measure.mass_above(0.5), 0.0, 1e-14));
    }

    #[test]
    fn markov_examples() {
        let b = markov_bounds(&seq(&[1.0, 0.5]), 0.5).unwrap();
        assert!(close(b.lower, 0.0, 1e-14) && close(b.upper, 1.0, 1e-14));
        let b = markov_bounds(&seq(&[1.0, 0.5]), 0.25).unwrap();
        assert!(close(b.lower, 1.0 / 3.0, 1e-14) && close(b.upper, 1.0, 1e-14));
        let b = markov_bounds(&seq(&[1.0, 0.5]), -1.0).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let b = markov_bounds(&seq(&[1.0, 0.5]), 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn singular_sequence_is_evaluated_exactly() {
        let mu = AtomicMeasure::new(vec![0.2, 0.5, 0.9], vec![0.3, 0.3, 0.4]).unwrap();
        let ms = seq(&mu.moments(6));
        match classify(&ms).unwrap() {
            Regularity::Singular { order, representation } => {
                assert_eq!(order, 6);
                for (a, b) in representation.atoms.iter().zip(&mu.atoms) {
                    assert!(close(*a, *b, 1e-6));
                }
            }
            other => panic!("{other:?}"),
        }
        for xi in [0.1, 0.35, 0.6, 0.95] {
            let b = markov_bounds(&ms, xi).unwrap();
            let truth = mu.mass_above(xi);
            assert!(close(b.lower, truth, 1e-9) && close(b.upper, truth, 1e-9), "{xi}: {b:?}");
        }
    }

    #[test]
    fn inadmissible_detected() {
        assert!(matches!(
            classify(&seq(&[1.0, 1.5])).unwrap(),
            Regularity::Inadmissible { order: 1 }
        ));
        assert!(matches!(
            classify(&seq(&[1.0, 0.5, 0.2])).unwrap(),
            Regularity::Inadmissible { order: 2 }
        ));
        assert!(matches!(
            classify(&seq(&[-1.0, 0.5])).unwrap(),
            Regularity::Inadmissible { order: 0 }
        ));
        assert!(markov_bounds(&seq(&[1.0, 0.5, 0.6]), 0.5).is_err());
    }

    #[test]
    fn validation_examples() {
        let u = seq(&uniform(4));
        assert_eq!(validate_sequence(&u, &[0.0; 5]), 4);
        let s = seq(&[1.0, 0.5, 0.375]);
        assert_eq!(validate_sequence(&s, &[0.0, 0.3, 0.2]), 1);
        assert_eq!(validate_sequence(&s, &[0.0, 0.6, 0.0]), 0);
    }

    #[test]
    fn shifted_interval_round_trip() {
        let mu = AtomicMeasure::new(vec![0.3, 0.55, 0.8, 0.95], vec![0.1, 0.4, 0.3, 0.2]).unwrap();
        let ms = MomentSequence::new(0.25, 1.0, mu.moments(4)).unwrap();
        let (lo, hi) = principal_representations(&ms).unwrap();
        for k in 0..=4 {
            assert!(close(lo.moment(k), ms.moments[k], 1e-9));
            assert!(close(hi.moment(k), ms.moments[k], 1e-9));
        }
        assert!(lo.atoms.contains(&0.25) && hi.atoms.contains(&1.0));
        let b = markov_bounds(&ms, 0.5).unwrap();
        assert!(b.lower <= mu.mass_above(0.5) + 1e-9 && mu.mass_from(0.5) <= b.upper + 1e-9);
    }

    #[test]
    fn orthogonality_from_moments() {
        let mu = AtomicMeasure::new(vec![0.1, 0.3, 0.45, 0.7, 0.9], vec![0.2, 0.1, 0.3, 0.25, 0.15]).unwrap();
        let m = mu.moments(4);
        let o = orthogonal_polynomials(&seq(&m));
        for j in 0..o.monic.len() {
            for k in 0..j {
                if j + k <= 4 {
                    assert!(inner(&o.monic[j], &o.monic[k], &m).abs() < 1e-10);
                }
            }
        }
    }
}

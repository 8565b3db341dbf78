//! Maximum-entropy densities `ν_β(dy) ∝ exp(-Σ_j β_j y^j) dy` on `[a, b]`.
//!
//! Fits run in the unit variable `u = (y - a) / (b - a)`, where the sufficient
//! statistics are well scaled; multipliers are reported in both variables.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::moments::{classify, MomentSequence, Regularity};

pub const DEFAULT_MAX_ITER: usize = 50;
const PANELS: usize = 8;
const NODES: usize = 32;
const GRAD_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 30;
const BETA_LIMIT: f64 = 1e6;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

/// Composite rule on `[lo, hi]`.
fn composite(lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> {
    let h = (hi - lo) / PANELS as f64;
    (0..PANELS).flat_map(move |p| {
        let c = lo + h * (p as f64 + 0.5);
        gauss_legendre()
            .iter()
            .map(move |&(x, w)| (c + 0.5 * h * x, 0.5 * h * w))
    })
}

fn unit_nodes() -> &'static [(f64, f64)] {
    static NODES01: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES01.get_or_init(|| composite(0.0, 1.0).collect())
}

/// `-Σ_{j≥1} γ_j u^j`.
fn exponent(gamma: &[f64], u: f64) -> f64 {
    -gamma.iter().rev().fold(0.0, |acc, g| (acc + g) * u)
}

/// `ln ∫_0^1 exp(-Σ γ_j u^j) du` and `E[u^p]` for `p ≤ max_power`.
fn unit_integrals(gamma: &[f64], max_power: usize) -> (f64, Vec<f64>) {
    let nodes = unit_nodes();
    let shift = nodes
        .iter()
        .map(|&(u, _)| exponent(gamma, u))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = vec![0.0; max_power + 1];
    for &(u, w) in nodes {
        let mut t = w * (exponent(gamma, u) - shift).exp();
        for a in acc.iter_mut() {
            *a += t;
            t *= u;
        }
    }
    let z = acc[0];
    (shift + z.ln(), acc.iter().map(|a| a / z).collect())
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; k + 1];
    for i in 1..k {
        row[i] = row[i - 1] * (k - i + 1) as f64 / i as f64;
    }
    row
}

/// Coefficients of `p(a + w u)` given those of `p(y)`.
fn compose_affine(p: &[f64], a: f64, w: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (j, &c) in p.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let row = binomial_row(j);
        for (i, b) in row.iter().enumerate() {
            out[i] += c * b * a.powi((j - i) as i32) * w.powi(i as i32);
        }
    }
    out
}

/// Unit multipliers and the constant `P(a)` for original multipliers `β`.
fn to_unit(beta: &[f64], a: f64, w: f64) -> (Vec<f64>, f64) {
    let mut p = vec![0.0];
    p.extend_from_slice(beta);
    let c = compose_affine(&p, a, w);
    (c[1..].to_vec(), c[0])
}

/// Original multipliers for unit multipliers `γ`.
fn to_original(gamma: &[f64], a: f64, w: f64) -> Vec<f64> {
    let mut p = vec![0.0];
    p.extend_from_slice(gamma);
    compose_affine(&p, -a / w, 1.0 / w)[1..].to_vec()
}

/// `E[y^j]` from `E[u^j]` with `y = a + w u`.
fn to_original_moments(unit: &[f64], a: f64, w: f64) -> Vec<f64> {
    (0..unit.len())
        .map(|j| {
            binomial_row(j)
                .iter()
                .enumerate()
                .map(|(i, b)| b * a.powi((j - i) as i32) * w.powi(i as i32) * unit[i])
                .sum()
        })
        .collect()
}

/// Fitted exponential-family density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxentModel {
    pub a: f64,
    pub b: f64,
    pub order: usize,
    /// `β_1..β_k` in the original variable.
    pub beta: Vec<f64>,
    /// Multipliers in the unit variable.
    pub unit_beta: Vec<f64>,
    /// `ln Ξ_β` in the original variable.
    pub log_partition: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl MaxentModel {
    /// Model with given original-variable multipliers.
    pub fn from_beta(a: f64, b: f64, beta: &[f64]) -> Result<Self> {
        check_interval(a, b)?;
        let w = b - a;
        let (gamma, c0) = to_unit(beta, a, w);
        let (ln_z, _) = unit_integrals(&gamma, 0);
        Ok(Self {
            a,
            b,
            order: beta.len(),
            beta: beta.to_vec(),
            unit_beta: gamma,
            log_partition: w.ln() - c0 + ln_z,
            converged: true,
            iterations: 0,
        })
    }

    fn from_unit(a: f64, b: f64, gamma: Vec<f64>, converged: bool, iterations: usize) -> Self {
        let w = b - a;
        let beta = to_original(&gamma, a, w);
        let (_, c0) = to_unit(&beta, a, w);
        let (ln_z, _) = unit_integrals(&gamma, 0);
        Self {
            a,
            b,
            order: gamma.len(),
            beta,
            unit_beta: gamma,
            log_partition: w.ln() - c0 + ln_z,
            converged,
            iterations,
        }
    }

    /// Normalized density at `y`.
    pub fn density(&self, y: f64) -> f64 {
        if y < self.a || y > self.b {
            return 0.0;
        }
        let p: f64 = self.beta.iter().rev().fold(0.0, |acc, g| (acc + g) * y);
        (-p - self.log_partition).exp()
    }

    /// `E[y^j]` for `j ≤ max_power`.
    pub fn moments(&self, max_power: usize) -> Vec<f64> {
        let (_, unit) = unit_integrals(&self.unit_beta, max_power);
        to_original_moments(&unit, self.a, self.b - self.a)
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(invalid(format!("need a finite interval a < b, got [{a}, {b}]")))
    }
}

/// Log-partition and `E[y^j]`, `j = 0..=max_power`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentIntegrals {
    pub log_partition: f64,
    pub moments: Vec<f64>,
}

pub fn moment_integrals(beta: &[f64], a: f64, b: f64, max_power: usize) -> Result<MomentIntegrals> {
    check_interval(a, b)?;
    if beta.iter().any(|x| !x.is_finite()) {
        return Err(invalid("multipliers must be finite"));
    }
    let w = b - a;
    let (gamma, c0) = to_unit(beta, a, w);
    let (ln_z, unit) = unit_integrals(&gamma, max_power);
    Ok(MomentIntegrals {
        log_partition: w.ln() - c0 + ln_z,
        moments: to_original_moments(&unit, a, w),
    })
}

/// Objective `ln Ξ_β + Σ β_j m_j` with gradient and Hessian, original variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

/// `ms.moments[1..]` are the targets; `beta.len()` must equal `ms.order()`.
pub fn objective(ms: &MomentSequence, beta: &[f64]) -> Result<Objective> {
    let k = ms.order();
    if beta.len() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            found: beta.len(),
        });
    }
    let mi = moment_integrals(beta, ms.a, ms.b, 2 * k)?;
    Ok(assemble(mi.log_partition, &mi.moments, &ms.moments, beta))
}

fn assemble(ln_z: f64, e: &[f64], m: &[f64], beta: &[f64]) -> Objective {
    let k = beta.len();
    let value = ln_z + beta.iter().zip(&m[1..]).map(|(b, m)| b * m).sum::<f64>();
    let gradient = (1..=k).map(|j| m[j] - e[j]).collect();
    let hessian = DMatrix::from_fn(k, k, |i, j| e[i + j + 2] - e[i + 1] * e[j + 1]);
    Objective {
        value,
        gradient,
        hessian,
    }
}

fn unit_objective(m: &[f64], gamma: &[f64]) -> Objective {
    let (ln_z, e) = unit_integrals(gamma, 2 * gamma.len());
    assemble(ln_z, &e, m, gamma)
}

fn unit_value(m: &[f64], gamma: &[f64]) -> f64 {
    let (ln_z, _) = unit_integrals(gamma, 0);
    ln_z + gamma.iter().zip(&m[1..]).map(|(b, m)| b * m).sum::<f64>()
}

fn grad_ratio(g: &[f64], m: &[f64]) -> f64 {
    g.iter()
        .zip(&m[1..])
        .map(|(g, m)| g.abs() / m.max(1e-3))
        .fold(0.0, f64::max)
}

/// Newton direction with diagonal rescaling; `None` when the Hessian is singular.
fn newton_step(obj: &Objective) -> Option<Vec<f64>> {
    let k = obj.gradient.len();
    let d: Vec<f64> = (0..k).map(|i| obj.hessian[(i, i)]).collect();
    if d.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return None;
    }
    let s: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let h = DMatrix::from_fn(k, k, |i, j| obj.hessian[(i, j)] * s[i] * s[j]);
    let chol = h.cholesky()?;
    let lmin = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |acc, &x| acc.min(x.abs()));
    if lmin * lmin < 1e-15 {
        return None;
    }
    let rhs = DVector::from_iterator(k, (0..k).map(|i| -obj.gradient[i] * s[i]));
    let x = chol.solve(&rhs);
    Some((0..k).map(|i| x[i] * s[i]).collect())
}

/// Fits `β` to `m_1..m_k` with an optional original-variable starting point.
pub fn maxent_fit(ms: &MomentSequence, init: Option<&[f64]>, max_iter: usize) -> Result<MaxentModel> {
    let start = init
        .map(|b| {
            if b.len() != ms.order() {
                return Err(Error::SizeMismatch {
                    expected: ms.order(),
                    found: b.len(),
                });
            }
            Ok(to_unit(b, ms.a, ms.width()).0)
        })
        .transpose()?;
    maxent_fit_unit(ms, start.as_deref(), max_iter)
}

/// As [`maxent_fit`], with the start given by unit-variable multipliers.
pub fn maxent_fit_unit(ms: &MomentSequence, init: Option<&[f64]>, max_iter: usize) -> Result<MaxentModel> {
    let k = ms.order();
    if k == 0 {
        return Err(invalid("maxent needs at least one moment beyond m_0"));
    }
    if (ms.m0() - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("maxent needs m_0 = 1, got {}", ms.m0())));
    }
    match classify(ms)? {
        Regularity::Regular => {}
        Regularity::Singular { order, .. } => return Err(Error::Singular { order }),
        Regularity::Inadmissible { order } => return Err(Error::NotAdmissible { order }),
    }
    let m = ms.unit_moments();
    let mut gamma = match init {
        Some(g) if g.len() == k && g.iter().all(|x| x.is_finite()) => g.to_vec(),
        Some(g) => {
            return Err(Error::SizeMismatch {
                expected: k,
                found: g.len(),
            })
        }
        None => vec![0.0; k],
    };
    let mut obj = unit_objective(&m, &gamma);
    let mut iterations = 0;
    let mut converged = grad_ratio(&obj.gradient, &m) <= GRAD_TOL;
    while !converged && iterations < max_iter {
        iterations += 1;
        let step = newton_step(&obj).ok_or_else(|| Error::Degenerate("singular maxent Hessian".into()))?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = gamma.iter().zip(&step).map(|(g, s)| g + t * s).collect();
            let v = unit_value(&m, &trial);
            if v.is_finite() && v <= obj.value + 1e-15 * obj.value.abs() {
                accepted = Some(trial);
                break;
            }
            t *= 0.5;
        }
        let Some(next) = accepted else { break };
        gamma = next;
        if gamma.iter().any(|g| g.abs() > BETA_LIMIT) {
            return Err(Error::Degenerate("maxent multipliers diverge".into()));
        }
        obj = unit_objective(&m, &gamma);
        converged = grad_ratio(&obj.gradient, &m) <= GRAD_TOL;
    }
    if converged {
        // One extra full step to squeeze the residual further.
        if let Some(step) = newton_step(&obj) {
            let trial: Vec<f64> = gamma.iter().zip(&step).map(|(g, s)| g + s).collect();
            let o = unit_objective(&m, &trial);
            if o.value <= obj.value && grad_ratio(&o.gradient, &m) <= grad_ratio(&obj.gradient, &m) {
                gamma = trial;
            }
        }
    }
    Ok(MaxentModel::from_unit(ms.a, ms.b, gamma, converged, iterations))
}

/// `ν_β([ξ, b])`.
pub fn tail_probability(model: &MaxentModel, xi: f64) -> f64 {
    if xi <= model.a {
        return 1.0;
    }
    if xi >= model.b {
        return 0.0;
    }
    let u0 = (xi - model.a) / (model.b - model.a);
    let gamma = &model.unit_beta;
    let (ln_z, _) = unit_integrals(gamma, 0);
    let s: f64 = composite(u0, 1.0)
        .map(|(u, w)| w * (exponent(gamma, u) - ln_z).exp())
        .sum();
    s.clamp(0.0, 1.0)
}

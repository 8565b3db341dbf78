//! End-to-end estimation of `F(q) = σ([0, q])` from forest moments.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::embed::{embed, make_sub_laplacian, SymmetricMatrix};
use crate::error::{invalid, Error, Result};
use crate::estimator::{estimate_moments, MomentEstimates, QGrid};
use crate::exec::Execution;
use crate::forest::{cost_bounds, CostStats, ForestSampler, TrajectoryOptions, DENSE_COST_CAP};
use crate::generate::GraphFamily;
use crate::graph::WeightedGraph;
use crate::io::{load_graph, load_matrix, Format};
use crate::maxent::{maxent_fit_unit, tail_probability, MaxentModel};
use crate::moments::{classify, markov_bounds, validate_sequence, MomentSequence, Regularity};
use crate::oracle::{exact_matrix_oracle, exact_oracle};
use crate::seed::{mix, stream};

/// Point of the transformed axis where the tail is read.
pub const XI: f64 = 0.5;
/// Half-width multiplier for moment confidence intervals.
pub const Z95: f64 = 1.96;
/// Markov windows with half-width below this fraction of the midpoint are final.
pub const TIGHT_WINDOW: f64 = 0.01;
const BRACKET_SLACK: f64 = 1e-6;
const COVER_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Laplacian,
    SubLaplacian,
    Symmetric,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(Mode::Laplacian),
            "sub-laplacian" | "sublaplacian" => Ok(Mode::SubLaplacian),
            "symmetric" => Ok(Mode::Symmetric),
            _ => Err(invalid(format!("unknown mode '{s}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Laplacian => "laplacian",
            Mode::SubLaplacian => "sub-laplacian",
            Mode::Symmetric => "symmetric",
        })
    }
}

/// Numerical settings of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    pub eps0: f64,
    /// Replicas `l` per group, also the highest moment order.
    pub replicas: usize,
    /// Number of groups `s`.
    pub samples: usize,
    pub seed: u64,
    /// Size cap for the dense reference; `None` disables it.
    pub exact_cap: Option<usize>,
    pub isotonic: bool,
    /// Added to the dominance shift in symmetric mode.
    pub extra_shift: f64,
    pub max_iter: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            eps0: 0.01,
            replicas: 4,
            samples: 400,
            seed: 0,
            exact_cap: None,
            isotonic: false,
            extra_shift: 0.0,
            max_iter: crate::maxent::DEFAULT_MAX_ITER,
            execution: Execution::Parallel,
        }
    }
}

impl Params {
    fn check(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0 <= 1.0) {
            return Err(invalid(format!("eps0 must lie in (0, 1], got {}", self.eps0)));
        }
        if self.replicas == 0 {
            return Err(invalid("replicas must be at least 1"));
        }
        if self.samples < 2 {
            return Err(invalid("samples must be at least 2"));
        }
        if !(self.extra_shift >= 0.0) {
            return Err(invalid("extra shift must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Input {
    File { path: PathBuf, format: Format },
    Generator { family: GraphFamily, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: Input,
    pub mode: Mode,
    pub params: Params,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MarkovExact,
    Maxent,
    Trivial,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::MarkovExact => "markov-exact",
            Method::Maxent => "maxent",
            Method::Trivial => "trivial",
        })
    }
}

/// One grid point of the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub q: f64,
    /// Point at which `F` is estimated; `q - c` in symmetric mode.
    pub abscissa: f64,
    /// Left end `q / (q + upper)` of the transformed interval.
    pub a: f64,
    pub moments: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Largest order whose confidence interval is admissible.
    pub k_valid: usize,
    /// Order actually used after fallbacks.
    pub k_used: usize,
    pub method: Method,
    pub markov_lower: f64,
    pub markov_upper: f64,
    /// Bounds widened over the moment confidence box.
    pub envelope_lower: f64,
    pub envelope_upper: f64,
    pub maxent_f: Option<f64>,
    /// `maxent_f`, or the window midpoint for `markov-exact`.
    pub prediction: Option<f64>,
    pub prediction_isotonic: Option<f64>,
    pub exact_f: Option<f64>,
    /// Unit-variable multipliers of the fitted model.
    pub beta: Vec<f64>,
    pub iterations: usize,
}

/// A maxent fit that did not produce a usable model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitEvent {
    pub q: f64,
    pub k: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub version: String,
    pub mode: Mode,
    pub n: usize,
    pub graph_hash: String,
    pub q0: f64,
    /// Upper end of the grid, a bound on the spectrum.
    pub upper: f64,
    /// Diagonal shift in symmetric mode, else 0.
    pub shift: f64,
    pub params: Params,
    pub rows: Vec<ReportRow>,
    pub events: Vec<FitEvent>,
    pub cost: CostStats,
    /// The two cover runs in symmetric mode.
    pub components: Vec<SpectralReport>,
    #[serde(skip)]
    pub estimates: Vec<MomentEstimates>,
}

impl SpectralReport {
    /// Grid rows carrying a prediction, with their exact value when known.
    pub fn scored(&self, min_k: usize) -> impl Iterator<Item = (&ReportRow, f64, f64)> {
        self.rows.iter().filter_map(move |r| match (r.prediction, r.exact_f) {
            (Some(p), Some(e)) if r.k_valid >= min_k => Some((r, p, e)),
            _ => None,
        })
    }

    /// Mean `|prediction - exact|` over rows with `k_valid ≥ min_k`.
    pub fn mean_abs_error(&self, min_k: usize) -> Option<f64> {
        let v: Vec<f64> = self.scored(min_k).map(|(_, p, e)| (p - e).abs()).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Fraction of rows with `exact_f` inside the envelope widened by `slack`.
    pub fn envelope_coverage(&self, slack: f64) -> Option<f64> {
        let hits: Vec<bool> = self
            .rows
            .iter()
            .filter_map(|r| {
                r.exact_f
                    .map(|e| e >= r.envelope_lower - slack && e <= r.envelope_upper + slack)
            })
            .collect();
        (!hits.is_empty()).then(|| hits.iter().filter(|h| **h).count() as f64 / hits.len() as f64)
    }

    /// CSV with `#` metadata lines and one row per grid value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let p = &self.params;
        writeln!(out, "# forest-spectra {}", self.version)?;
        writeln!(
            out,
            "# mode={} eps0={} replicas={} samples={} seed={} isotonic={} exact_cap={} extra_shift={} max_iter={}",
            self.mode,
            p.eps0,
            p.replicas,
            p.samples,
            p.seed,
            p.isotonic,
            p.exact_cap.map_or("none".to_string(), |c| c.to_string()),
            p.extra_shift,
            p.max_iter
        )?;
        writeln!(
            out,
            "# n={} graph_hash={} q0={} upper={} shift={} fit_failures={}",
            self.n,
            self.graph_hash,
            self.q0,
            self.upper,
            self.shift,
            self.events.len()
        )?;
        let l = p.replicas;
        let mut header = String::from(
            "q,abscissa,a,k_valid,k_used,method,markov_lower,markov_upper,envelope_lower,envelope_upper,maxent_f,prediction,prediction_isotonic,exact_f",
        );
        for k in 1..=l {
            header.push_str(&format!(",m{k}"));
        }
        for k in 1..=l {
            header.push_str(&format!(",se{k}"));
        }
        writeln!(out, "{header}")?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &self.rows {
            let mut line = format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.q,
                r.abscissa,
                r.a,
                r.k_valid,
                r.k_used,
                r.method,
                r.markov_lower,
                r.markov_upper,
                r.envelope_lower,
                r.envelope_upper,
                opt(r.maxent_f),
                opt(r.prediction),
                opt(r.prediction_isotonic),
                opt(r.exact_f)
            );
            for k in 0..l {
                line.push(',');
                line.push_str(&opt(r.moments.get(k).copied()));
            }
            for k in 0..l {
                line.push(',');
                line.push_str(&opt(r.stderrs.get(k).copied()));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Grid and spectral upper bound; an edgeless graph gets a unit placeholder scale.
pub fn grid_for(g: &WeightedGraph, eps0: f64) -> Result<(QGrid, f64)> {
    let s = g.scalars();
    if s.spectral_upper > 0.0 {
        let grid = QGrid::geometric(eps0 * s.lambda_bar, s.spectral_upper, eps0)?;
        Ok((grid, s.spectral_upper))
    } else {
        Ok((QGrid::geometric(eps0, 2.0, eps0)?, 0.0))
    }
}

fn unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0) + 0.0
}

struct Analyzer<'a> {
    est: &'a MomentEstimates,
    upper: f64,
    max_iter: usize,
    fits: HashMap<(usize, usize), Option<Vec<f64>>>,
    events: Vec<FitEvent>,
}

impl<'a> Analyzer<'a> {
    fn sequence(&self, qi: usize, a: f64) -> Result<MomentSequence> {
        let mut m = vec![1.0];
        m.extend_from_slice(self.est.moments(qi));
        MomentSequence::new(a, 1.0, m)
    }

    /// Converged unit multipliers at `(qi, k)`, fitting on demand.
    fn fit(&mut self, qi: usize, k: usize, full: &MomentSequence) -> Option<MaxentModel> {
        let init = match self.fits.get(&(qi + 1, k)) {
            Some(Some(b)) => Some(b.clone()),
            _ if k >= 2 => self.cached(qi, k - 1, full).map(|mut b| {
                b.push(0.0);
                b
            }),
            _ => None,
        };
        let ms = full.prefix(k);
        let q = self.est.grid[qi];
        let attempt = |start: Option<&[f64]>| match maxent_fit_unit(&ms, start, self.max_iter) {
            Ok(m) if m.converged => Ok(m),
            Ok(m) => Err(format!("not converged after {} iterations", m.iterations)),
            Err(e) => Err(e.to_string()),
        };
        let mut result = attempt(init.as_deref());
        if result.is_err() && init.is_some() {
            result = attempt(None);
        }
        match result {
            Ok(m) => {
                self.fits.insert((qi, k), Some(m.unit_beta.clone()));
                Some(m)
            }
            Err(reason) => {
                self.events.push(FitEvent { q, k, reason });
                self.fits.insert((qi, k), None);
                None
            }
        }
    }

    fn cached(&mut self, qi: usize, k: usize, full: &MomentSequence) -> Option<Vec<f64>> {
        if let Some(b) = self.fits.get(&(qi, k)) {
            return b.clone();
        }
        self.fit(qi, k, full).map(|m| m.unit_beta)
    }

    /// Bounds over the `2^k` corners of the moment confidence box.
    fn envelope(&self, qi: usize, full: &MomentSequence, k: usize, lo: f64, hi: f64) -> (f64, f64) {
        let se = self.est.stderrs(qi);
        let (mut elo, mut ehi) = (lo, hi);
        for mask in 0u32..(1 << k) {
            let mut m = full.moments[..=k].to_vec();
            for j in 1..=k {
                let sign = if mask >> (j - 1) & 1 == 1 { 1.0 } else { -1.0 };
                m[j] += sign * Z95 * se[j - 1];
            }
            let Ok(ms) = MomentSequence::new(full.a, full.b, m) else {
                continue;
            };
            if let Ok(b) = markov_bounds(&ms, XI) {
                elo = elo.min(b.lower);
                ehi = ehi.max(b.upper);
            }
        }
        (unit(elo), unit(ehi))
    }

    fn row(&mut self, qi: usize) -> Result<ReportRow> {
        let q = self.est.grid[qi];
        let a = if self.upper > 0.0 { q / (q + self.upper) } else { 1.0 };
        let mut row = ReportRow {
            q,
            abscissa: q,
            a,
            moments: self.est.moments(qi).to_vec(),
            stderrs: self.est.stderrs(qi).to_vec(),
            k_valid: 0,
            k_used: 0,
            method: Method::Trivial,
            markov_lower: 0.0,
            markov_upper: 1.0,
            envelope_lower: 0.0,
            envelope_upper: 1.0,
            maxent_f: None,
            prediction: None,
            prediction_isotonic: None,
            exact_f: None,
            beta: Vec::new(),
            iterations: 0,
        };
        if XI <= a {
            // The whole transformed spectrum lies in [ξ, 1].
            row.k_valid = row.moments.len();
            row.method = Method::MarkovExact;
            row.markov_lower = 1.0;
            row.envelope_lower = 1.0;
            row.prediction = Some(1.0);
            return Ok(row);
        }
        let full = self.sequence(qi, a)?;
        let mut radii = vec![0.0];
        radii.extend(row.stderrs.iter().map(|s| Z95 * s));
        row.k_valid = validate_sequence(&full, &radii);
        let mut k = row.k_valid;
        while k > 0 {
            let ms = full.prefix(k);
            let bounds = match markov_bounds(&ms, XI) {
                Ok(b) => b,
                Err(e) => {
                    self.events.push(FitEvent {
                        q,
                        k,
                        reason: format!("markov bounds: {e}"),
                    });
                    k -= 1;
                    continue;
                }
            };
            let (lo, hi) = (unit(bounds.lower), unit(bounds.upper.max(bounds.lower)));
            let (elo, ehi) = self.envelope(qi, &full, k, lo, hi);
            row.k_used = k;
            row.markov_lower = lo;
            row.markov_upper = hi;
            row.envelope_lower = elo;
            row.envelope_upper = ehi;
            let mid = 0.5 * (lo + hi);
            let singular = matches!(classify(&ms), Ok(Regularity::Singular { .. }));
            if singular || 0.5 * (hi - lo) <= TIGHT_WINDOW * mid {
                row.method = Method::MarkovExact;
                row.prediction = Some(mid);
                return Ok(row);
            }
            if k == 1 {
                row.method = Method::Trivial;
                return Ok(row);
            }
            if let Some(model) = self.fit(qi, k, &full) {
                let f = tail_probability(&model, XI);
                if f >= lo - BRACKET_SLACK && f <= hi + BRACKET_SLACK {
                    row.method = Method::Maxent;
                    row.maxent_f = Some(f);
                    row.prediction = Some(f);
                    row.beta = model.unit_beta;
                    row.iterations = model.iterations;
                    return Ok(row);
                }
                self.events.push(FitEvent {
                    q,
                    k,
                    reason: format!("tail {f} outside [{lo}, {hi}]"),
                });
            }
            k -= 1;
        }
        row.k_used = 0;
        row.method = Method::Trivial;
        row.markov_lower = 0.0;
        row.markov_upper = 1.0;
        row.envelope_lower = 0.0;
        row.envelope_upper = 1.0;
        Ok(row)
    }
}

/// Per-q moment problem and maxent work, descending along the warm-start chain.
fn analyse(est: &MomentEstimates, upper: f64, max_iter: usize) -> Result<(Vec<ReportRow>, Vec<FitEvent>)> {
    let mut an = Analyzer {
        est,
        upper,
        max_iter,
        fits: HashMap::new(),
        events: Vec::new(),
    };
    let mut rows = Vec::with_capacity(est.grid.len());
    for qi in (0..est.grid.len()).rev() {
        rows.push(an.row(qi)?);
    }
    rows.reverse();
    Ok((rows, an.events))
}

fn apply_isotonic(rows: &mut [ReportRow]) {
    let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].prediction.is_some()).collect();
    let vals: Vec<f64> = idx.iter().map(|&i| rows[i].prediction.unwrap()).collect();
    for (i, v) in idx.into_iter().zip(crate::embed::isotonic(&vals)) {
        rows[i].prediction_isotonic = Some(v);
    }
}

fn run_on_grid(g: &WeightedGraph, grid: &QGrid, upper: f64, p: &Params, seed: u64) -> Result<SpectralReport> {
    let est = estimate_moments(g, &grid.values, p.replicas, p.samples, seed, p.execution)?;
    let (mut rows, events) = analyse(&est, upper, p.max_iter)?;
    if let Some(cap) = p.exact_cap {
        let spec = exact_oracle(g, cap)?;
        for r in &mut rows {
            r.exact_f = Some(spec.cdf(r.q));
        }
    }
    if p.isotonic {
        apply_isotonic(&mut rows);
    }
    Ok(SpectralReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: if g.has_killing() { Mode::SubLaplacian } else { Mode::Laplacian },
        n: g.n(),
        graph_hash: format!("{:016x}", g.fingerprint()),
        q0: grid.q0,
        upper,
        shift: 0.0,
        params: Params { seed, ..p.clone() },
        rows,
        events,
        cost: est.cost,
        components: Vec::new(),
        estimates: vec![est],
    })
}

/// Full pipeline on a (sub-)Laplacian.
pub fn run_graph(g: &WeightedGraph, p: &Params) -> Result<SpectralReport> {
    p.check()?;
    if g.n() == 0 {
        return Err(invalid("graph has no nodes"));
    }
    let (grid, upper) = grid_for(g, p.eps0)?;
    run_on_grid(g, &grid, upper, p, p.seed)
}

/// Symmetric-matrix pipeline: runs both cover sub-Laplacians and combines `F = 2F₂ - F₁`.
pub fn run_symmetric(m: &SymmetricMatrix, p: &Params) -> Result<SpectralReport> {
    p.check()?;
    if m.n() == 0 {
        return Err(invalid("matrix is empty"));
    }
    let pair = embed(m, p.extra_shift)?;
    let c = pair.shift;
    let (grid, upper) = grid_for(&pair.l1, p.eps0)?;
    let sub = Params {
        exact_cap: None,
        isotonic: false,
        ..p.clone()
    };
    let r1 = run_on_grid(&pair.l1, &grid, upper, &sub, p.seed)?;
    let r2 = run_on_grid(&pair.l2, &grid, upper, &sub, mix(p.seed ^ COVER_SEED_SALT))?;
    let exact = match p.exact_cap {
        Some(cap) => Some(exact_matrix_oracle(&m.shifted(c), cap)?),
        None => None,
    };
    let mut rows: Vec<ReportRow> = r1
        .rows
        .iter()
        .zip(&r2.rows)
        .map(|(x, y)| combine_rows(x, y, c))
        .collect();
    if let Some(spec) = &exact {
        for r in &mut rows {
            r.exact_f = Some(spec.cdf(r.q));
        }
    }
    if p.isotonic {
        apply_isotonic(&mut rows);
    }
    let mut events = r1.events.clone();
    events.extend(r2.events.iter().cloned());
    let cost = CostStats {
        sampled: r1.cost.sampled + r2.cost.sampled,
        rereads: r1.cost.rereads + r2.cost.rereads,
        scanned: r1.cost.scanned + r2.cost.scanned,
    };
    Ok(SpectralReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: Mode::Symmetric,
        n: m.n(),
        graph_hash: format!("{:016x}", pair.l2.fingerprint()),
        q0: grid.q0,
        upper,
        shift: c,
        params: p.clone(),
        rows,
        events,
        cost,
        components: vec![r1, r2],
        estimates: Vec::new(),
    })
}

fn combine_rows(x: &ReportRow, y: &ReportRow, c: f64) -> ReportRow {
    let prediction = match (x.prediction, y.prediction) {
        (Some(p1), Some(p2)) => Some(unit(2.0 * p2 - p1)),
        _ => None,
    };
    let method = match (prediction, x.method, y.method) {
        (None, _, _) => Method::Trivial,
        (_, Method::MarkovExact, Method::MarkovExact) => Method::MarkovExact,
        _ => Method::Maxent,
    };
    ReportRow {
        q: x.q,
        abscissa: x.q - c,
        a: x.a,
        moments: Vec::new(),
        stderrs: Vec::new(),
        k_valid: x.k_valid.min(y.k_valid),
        k_used: x.k_used.min(y.k_used),
        method,
        markov_lower: unit(2.0 * y.markov_lower - x.markov_upper),
        markov_upper: unit(2.0 * y.markov_upper - x.markov_lower),
        envelope_lower: unit(2.0 * y.envelope_lower - x.envelope_upper),
        envelope_upper: unit(2.0 * y.envelope_upper - x.envelope_lower),
        maxent_f: if method == Method::Maxent { prediction } else { None },
        prediction,
        prediction_isotonic: None,
        exact_f: None,
        beta: Vec::new(),
        iterations: 0,
    }
}

/// Loads the input named by `cfg` and runs the pipeline in its mode.
pub fn estimate_cdf(cfg: &RunConfig) -> Result<SpectralReport> {
    match (&cfg.input, cfg.mode) {
        (Input::File { path, format }, mode) => match (format, mode) {
            (Format::MatrixMarket, Mode::Symmetric) => run_symmetric(&load_matrix(path)?, &cfg.params),
            (Format::MatrixMarket, Mode::SubLaplacian) => {
                run_graph(&make_sub_laplacian(&load_matrix(path)?)?, &cfg.params)
            }
            (_, mode) => {
                let g = load_graph(path, *format)?.graph;
                run_loaded(&g, mode, &cfg.params)
            }
        },
        (Input::Generator { family, seed }, mode) => run_loaded(&family.build(*seed)?, mode, &cfg.params),
    }
}

fn run_loaded(g: &WeightedGraph, mode: Mode, p: &Params) -> Result<SpectralReport> {
    match mode {
        Mode::Laplacian if g.has_killing() => Err(invalid(
            "input has killing weights; use the sub-laplacian mode",
        )),
        Mode::Symmetric => run_symmetric(&SymmetricMatrix::from_graph(g), p),
        _ => run_graph(g, p),
    }
}

/// Measured trajectory costs next to their theoretical values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub n: usize,
    pub q0: f64,
    pub q_max: f64,
    pub trajectories: usize,
    pub mean_sampled: f64,
    /// Standard error of `mean_sampled`.
    pub stderr_sampled: f64,
    pub mean_rereads: f64,
    /// Mean number of tree nodes visited while unfreezing.
    pub mean_scanned: f64,
    /// `Tr((q0 - L)^{-1} (q0 + W))` when `n` is small enough.
    pub expected_sampled: Option<f64>,
    /// `n (1 + λ̄ / q0)`.
    pub sampled_upper: f64,
    /// `n ln(1 + α / q0)`.
    pub reread_upper: f64,
    pub seconds_per_trajectory: f64,
}

/// Runs full trajectories from the spectral bound down to `q0` and tallies their cost.
pub fn bench_costs(
    g: &WeightedGraph,
    q0: f64,
    trajectories: usize,
    seed: u64,
    exec: Execution,
) -> Result<CostReport> {
    if trajectories < 2 {
        return Err(invalid("need at least two trajectories"));
    }
    let bounds = cost_bounds(g, q0, DENSE_COST_CAP)?;
    let q_max = g.scalars().spectral_upper.max(q0);
    let sampler = ForestSampler::new(g);
    let runs = exec.try_map(trajectories, |t| -> Result<(CostStats, f64)> {
        let mut rng = stream(seed, t as u64, 0);
        let start = Instant::now();
        let tr = sampler.trajectory(q0, q_max, &[], &mut rng, TrajectoryOptions::default())?;
        Ok((tr.cost, start.elapsed().as_secs_f64()))
    })?;
    let m = trajectories as f64;
    let s: Vec<f64> = runs.iter().map(|r| r.0.sampled as f64).collect();
    let mean_sampled = s.iter().sum::<f64>() / m;
    let var = s.iter().map(|x| (x - mean_sampled).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(CostReport {
        n: g.n(),
        q0,
        q_max,
        trajectories,
        mean_sampled,
        stderr_sampled: (var / m).sqrt(),
        mean_rereads: runs.iter().map(|r| r.0.rereads as f64).sum::<f64>() / m,
        mean_scanned: runs.iter().map(|r| r.0.scanned as f64).sum::<f64>() / m,
        expected_sampled: bounds.expected_sampled,
        sampled_upper: bounds.sampled_upper,
        reread_upper: bounds.reread_upper,
        seconds_per_trajectory: runs.iter().map(|r| r.1).sum::<f64>() / m,
    })
}

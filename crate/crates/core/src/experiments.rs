//! Monte Carlo sweeps over `(n, r)` cells.
//!
//! A [`SweepConfig`] fixes the density, complex type, radius rule and the
//! list of sample sizes. Every trial is a pure function of the config, `n`
//! and the trial index: its seed is a 64-bit hash of `(seed, n, trial)`, so
//! results do not depend on how many workers run the sweep. Aggregation runs
//! sequentially in `(n, trial)` order after all trials finish.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{census_report, connected_components, CensusReport};
use crate::complex::{cech_complex_on_graph, rips_complex_with_budget, ComplexKind, DEFAULT_FACE_BUDGET};
use crate::geometry::{build_geometric_graph, sample_points, Density, DensityKind, PointCloud, RNG_NAME};
use crate::homology::{betti_numbers_with, euler_characteristic, BettiOptions, BettiProfile, PrimeField};
use crate::morse::{build_gradient_field, critical_cells, distance_order_with, validate_gradient_field, CriticalCensus, OriginRule};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("coverage is defined for bounded domains only, got {0:?}")]
    UnboundedDomain(DensityKind),
    #[error("need at least 3 distinct n with positive mean beta_{k}, have {have}")]
    TooFewPoints { k: usize, have: usize },
    #[error("mean beta_{k} is zero at (n, r) = {cells:?}; log undefined")]
    ZeroMean { k: usize, cells: Vec<(usize, f64)> },
    #[error("trial {trial} at n = {n}, r = {r}: {source}")]
    Trial { n: usize, r: f64, trial: usize, source: Box<crate::Error> },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ExperimentError {
    pub fn is_resource_exhausted(&self) -> bool {
        matches!(self, ExperimentError::Trial { source, .. } if source.is_resource_exhausted())
    }
}

/// How the graph radius depends on `n` (and the dimension `d`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusRule {
    /// `r = c * n^(-alpha)`.
    PowerLaw { c: f64, alpha: f64 },
    /// `r = c * (ln n / n)^(1/d)`.
    ConnectivityScale { c: f64 },
    Fixed { r: f64 },
}

impl RadiusRule {
    pub fn radius(&self, n: usize, dim: usize) -> f64 {
        let nf = n as f64;
        match *self {
            RadiusRule::PowerLaw { c, alpha } => c * nf.powf(-alpha),
            RadiusRule::ConnectivityScale { c } => c * (nf.ln() / nf).powf(1.0 / dim as f64),
            RadiusRule::Fixed { r } => r,
        }
    }

    fn validate(&self, n_values: &[usize], dim: usize) -> Result<(), String> {
        match *self {
            RadiusRule::PowerLaw { c, alpha } if !(c > 0.0 && alpha > 0.0) => {
                return Err(format!("power law needs c > 0 and alpha > 0, got c = {c}, alpha = {alpha}"))
            }
            RadiusRule::ConnectivityScale { c } if !(c > 0.0) => {
                return Err(format!("connectivity scale needs c > 0, got {c}"))
            }
            _ => {}
        }
        for &n in n_values {
            let r = self.radius(n, dim);
            if !(r.is_finite() && r > 0.0) {
                return Err(format!("radius rule gives r = {r} at n = {n}"));
            }
        }
        Ok(())
    }
}

fn default_field() -> u32 {
    2
}

fn default_workers() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_face_budget() -> usize {
    DEFAULT_FACE_BUDGET
}

/// One sweep. JSON field names are the config file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub density: DensityKind,
    pub dim: usize,
    #[serde(rename = "type")]
    pub complex: ComplexKind,
    pub k_max: usize,
    /// Defaults to `k_max + 1`.
    #[serde(default)]
    pub max_dim: Option<usize>,
    pub n: Vec<usize>,
    pub radius: RadiusRule,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_field")]
    pub field: u32,
    /// Parallelism only; never changes results.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_true")]
    pub homology: bool,
    /// Critical-cell census (Rips only).
    #[serde(default = "default_true")]
    pub morse: bool,
    /// Defaults to off for [`RadiusRule::ConnectivityScale`], on otherwise.
    #[serde(default)]
    pub census: Option<bool>,
    /// Coverage check (bounded densities only).
    #[serde(default = "default_true")]
    pub coverage: bool,
    /// Give every trial of a cell the same seed.
    #[serde(default)]
    pub shared_seed: bool,
    #[serde(default = "default_face_budget")]
    pub face_budget: usize,
}

impl SweepConfig {
    /// Everything enabled except as the regime defaults say; `max_dim = k_max + 1`.
    pub fn new(density: DensityKind, dim: usize, complex: ComplexKind, k_max: usize, n: Vec<usize>, radius: RadiusRule) -> Self {
        SweepConfig {
            density,
            dim,
            complex,
            k_max,
            max_dim: None,
            n,
            radius,
            trials: 1,
            seed: 0,
            out: None,
            field: default_field(),
            workers: 1,
            homology: true,
            morse: true,
            census: None,
            coverage: true,
            shared_seed: false,
            face_budget: DEFAULT_FACE_BUDGET,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::InvalidConfig(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim.unwrap_or(self.k_max + 1)
    }

    pub fn census(&self) -> bool {
        self.census.unwrap_or(!matches!(self.radius, RadiusRule::ConnectivityScale { .. }))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::InvalidConfig(msg));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.n.is_empty() {
            return bad("n must list at least one sample size".into());
        }
        if self.complex == ComplexKind::Abstract {
            return bad("type must be rips or cech".into());
        }
        if self.homology && self.k_max + 1 > self.max_dim() {
            return bad(format!("k_max + 1 = {} exceeds max_dim = {}", self.k_max + 1, self.max_dim()));
        }
        PrimeField::new(self.field).map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        self.radius.validate(&self.n, self.dim).map_err(ExperimentError::InvalidConfig)
    }

    fn density_spec(&self) -> Density {
        Density::new(self.density, self.dim).expect("validated dimension")
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at sample size `n`.
pub fn trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    mix(mix(mix(master) ^ n as u64) ^ trial as u64)
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub r: f64,
    /// `n * r^d`.
    pub w: f64,
    pub trial: usize,
    pub seed: u64,
    pub betti: Option<BettiProfile>,
    pub critical: Option<CriticalCensus>,
    pub census: Option<CensusReport>,
    pub covered: Option<bool>,
    /// Per-instance identities that failed; empty on a healthy run.
    pub violations: Vec<String>,
    pub wall_time_secs: f64,
}

impl TrialRecord {
    /// Whether an O_k-skeleton component exists (needs the census).
    pub fn has_crosspolytope(&self, k: usize) -> Option<bool> {
        self.census.as_ref().map(|c| c.o_tilde(k) > 0)
    }
}

fn trial_error(config: &SweepConfig, n: usize, trial: usize) -> impl Fn(crate::Error) -> ExperimentError {
    let r = config.radius.radius(n, config.dim);
    move |e| ExperimentError::Trial { n, r, trial, source: Box::new(e) }
}

/// Runs trial `trial` of the cell at sample size `n`.
pub fn run_trial(config: &SweepConfig, n: usize, trial: usize) -> Result<TrialRecord, ExperimentError> {
    config.validate()?;
    let wrap = trial_error(config, n, trial);
    let start = Instant::now();
    let r = config.radius.radius(n, config.dim);
    let seed = trial_seed(config.seed, n, if config.shared_seed { 0 } else { trial });
    let density = config.density_spec();
    let cloud = sample_points(density, n, seed).map_err(|e| wrap(e.into()))?;
    let graph = build_geometric_graph(&cloud, r).map_err(|e| wrap(e.into()))?;
    let max_dim = config.max_dim();
    let complex = match config.complex {
        ComplexKind::Cech => cech_complex_on_graph(&cloud, &graph, max_dim, config.face_budget),
        _ => rips_complex_with_budget(&graph, max_dim, config.face_budget),
    }
    .map_err(|e| wrap(e.into()))?;

    let mut violations = Vec::new();
    let betti = if config.homology {
        let opts = BettiOptions { field: PrimeField::new(config.field).expect("validated field"), ..BettiOptions::default() };
        let profile = betti_numbers_with(&complex, config.k_max, opts).map_err(|e| wrap(e.into()))?;
        if complex.is_complete() && complex.top_dim().is_none_or(|t| t <= config.k_max) && profile.euler_characteristic() != euler_characteristic(&complex) {
            violations.push(format!("euler: sum (-1)^k beta_k = {}, sum (-1)^k f_k = {}", profile.euler_characteristic(), euler_characteristic(&complex)));
        }
        Some(profile)
    } else {
        None
    };

    let critical = if config.morse && config.complex == ComplexKind::Rips {
        let order = distance_order_with(&cloud, &OriginRule::DomainCenter).map_err(|e| wrap(e.into()))?;
        let field = build_gradient_field(&complex, &graph, &order).map_err(|e| wrap(e.into()))?;
        let report = validate_gradient_field(&complex, &field);
        if !report.is_valid() {
            violations.push(format!("gradient field: {:?}", report.violations.first()));
        }
        Some(critical_cells(&complex, &field))
    } else {
        None
    };

    let census = config.census().then(|| {
        let partition = connected_components(&graph);
        let cloud_for_cech = (config.complex == ComplexKind::Cech).then_some(&cloud);
        census_report(&graph, &complex, &partition, cloud_for_cech, config.k_max)
    });

    let covered = if config.coverage && config.density.is_bounded() {
        Some(coverage_check(&cloud, r, density)?)
    } else {
        None
    };

    let mut record = TrialRecord {
        n,
        r,
        w: n as f64 * r.powi(config.dim as i32),
        trial,
        seed,
        betti,
        critical,
        census,
        covered,
        violations,
        wall_time_secs: 0.0,
    };
    record.violations.extend(check_record(&record, config.complex, config.k_max));
    record.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Sandwich bounds and the Morse inequality for `1 <= k <= k_max`.
fn check_record(record: &TrialRecord, kind: ComplexKind, k_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    let Some(betti) = &record.betti else { return out };
    for k in 1..=k_max {
        let b = betti.betti(k);
        if let Some(c) = &record.census {
            let (lower, tail) = match kind {
                ComplexKind::Cech => (c.s_tilde(k), c.f_ge(k, k + 3)),
                _ => (c.o_tilde(k), c.f_ge(k, 2 * k + 3)),
            };
            if b < lower || b > lower + tail {
                out.push(format!("sandwich at k = {k}: {lower} <= {b} <= {lower} + {tail} fails"));
            }
        }
    }
    if let Some(crit) = &record.critical {
        for k in 0..=k_max.min(crit.counts.len().saturating_sub(1)) {
            if betti.betti(k) > crit.count(k) {
                out.push(format!("morse inequality at k = {k}: beta = {} > C = {}", betti.betti(k), crit.count(k)));
            }
        }
    }
    out
}

/// Mean and unbiased variance of one statistic over a cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub var: f64,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let m = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / m;
        let var = if samples.len() < 2 {
            0.0
        } else {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
        };
        Some(Moments { mean, var })
    }
}

/// Aggregates of one `(n, r)` cell. Vectors are indexed by `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub r: f64,
    pub w: f64,
    /// Completed trials.
    pub trials: usize,
    pub failed: usize,
    pub betti: Vec<Moments>,
    pub nonvanishing_fraction: Vec<f64>,
    pub critical: Vec<Moments>,
    pub o_tilde: Vec<Moments>,
    pub s_tilde: Vec<Moments>,
    /// Fraction of trials with at least one O_k-skeleton component.
    pub crosspolytope_fraction: Vec<f64>,
    pub coverage_fraction: Option<f64>,
    /// `mean beta_k / (n^(2k+2) r^(d(2k+1)))` for Rips, `mean beta_k / (n^(k+2) r^(d(k+1)))` for Čech.
    pub normalized_betti: Vec<f64>,
    pub violations: usize,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl CellSummary {
    fn aggregate(n: usize, r: f64, dim: usize, kind: ComplexKind, k_max: usize, records: Vec<TrialRecord>, failed: usize) -> Self {
        let per_k = |f: &dyn Fn(&TrialRecord, usize) -> Option<f64>| -> Vec<Moments> {
            (0..=k_max)
                .map_while(|k| {
                    let xs: Option<Vec<f64>> = records.iter().map(|t| f(t, k)).collect();
                    xs.and_then(|xs| Moments::of(&xs))
                })
                .collect()
        };
        let betti = per_k(&|t, k| t.betti.as_ref().map(|b| b.betti(k) as f64));
        let critical = per_k(&|t, k| t.critical.as_ref().map(|c| c.count(k) as f64));
        let o_tilde = per_k(&|t, k| t.census.as_ref().map(|c| c.o_tilde(k) as f64));
        let s_tilde = if kind == ComplexKind::Cech {
            per_k(&|t, k| t.census.as_ref().map(|c| c.s_tilde(k) as f64))
        } else {
            Vec::new()
        };
        let fraction = |pred: &dyn Fn(&TrialRecord) -> Option<bool>| -> Option<f64> {
            let flags: Option<Vec<bool>> = records.iter().map(pred).collect();
            let flags = flags.filter(|f| !f.is_empty())?;
            Some(flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64)
        };
        let nonvanishing_fraction = (0..betti.len())
            .map(|k| fraction(&|t| t.betti.as_ref().map(|b| b.betti(k) > 0)).unwrap_or(f64::NAN))
            .collect();
        let crosspolytope_fraction = (0..o_tilde.len())
            .map(|k| fraction(&|t| t.has_crosspolytope(k)).unwrap_or(f64::NAN))
            .collect();
        let coverage_fraction = fraction(&|t| t.covered);
        let d = dim as f64;
        let nf = n as f64;
        let normalized_betti = betti
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let k = k as f64;
                let scale = match kind {
                    ComplexKind::Cech => nf.powf(k + 2.0) * r.powf(d * (k + 1.0)),
                    _ => nf.powf(2.0 * k + 2.0) * r.powf(d * (2.0 * k + 1.0)),
                };
                m.mean / scale
            })
            .collect();
        CellSummary {
            n,
            r,
            w: nf * r.powi(dim as i32),
            trials: records.len(),
            failed,
            betti,
            nonvanishing_fraction,
            critical,
            o_tilde,
            s_tilde,
            crosspolytope_fraction,
            coverage_fraction,
            normalized_betti,
            violations: records.iter().map(|t| t.violations.len()).sum(),
            records,
        }
    }
}

/// A trial that did not complete.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub n: usize,
    pub r: f64,
    pub trial: usize,
    pub error: String,
    pub resource_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub cells: Vec<CellSummary>,
    pub failures: Vec<TrialFailure>,
}

impl SweepResult {
    /// One row per `(n, r, k)`; a cell with no completed trial writes `NaN`s.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,r,W,k,mean_betti,var_betti,mean_C,nonvanishing_fraction,coverage_fraction,trials\n");
        let num = |x: Option<f64>| x.map_or_else(|| "NaN".to_string(), |v| v.to_string());
        for cell in &self.cells {
            for k in 0..=self.config.k_max {
                let b = cell.betti.get(k);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    cell.n,
                    cell.r,
                    cell.w,
                    k,
                    num(b.map(|m| m.mean)),
                    num(b.map(|m| m.var)),
                    num(cell.critical.get(k).map(|m| m.mean)),
                    num(cell.nonvanishing_fraction.get(k).copied()),
                    num(cell.coverage_fraction),
                    cell.trials
                )
                .expect("writing to a string");
            }
        }
        out
    }

    /// Config echo, generator, crate version, per-cell aggregates and failures.
    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "config": self.config,
            "rng": RNG_NAME,
            "software": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
            "cells": self.cells,
            "failures": self.failures,
        });
        serde_json::to_string_pretty(&doc).expect("result serializes")
    }

    /// Writes `path` (CSV) and `path` with extension `json`.
    pub fn write(&self, path: &Path) -> Result<(), ExperimentError> {
        let io = |p: &Path| {
            let p = p.to_path_buf();
            move |source| ExperimentError::Io { path: p, source }
        };
        fs::write(path, self.to_csv()).map_err(io(path))?;
        let sidecar = path.with_extension("json");
        fs::write(&sidecar, self.to_json()).map_err(io(&sidecar))
    }
}

/// Runs every `(n, trial)` pair on `config.workers` threads, aggregates in
/// order and writes the outputs when `config.out` is set. Failed trials are
/// listed in the result; the remaining ones are still aggregated.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, ExperimentError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config.n.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::InvalidConfig(format!("cannot start {} workers: {e}", config.workers)))?;
    let outcomes: Vec<Result<TrialRecord, ExperimentError>> =
        pool.install(|| jobs.par_iter().map(|&(n, t)| run_trial(config, n, t)).collect());

    let mut cells = Vec::with_capacity(config.n.len());
    let mut failures = Vec::new();
    let mut outcomes = outcomes.into_iter();
    for &n in &config.n {
        let r = config.radius.radius(n, config.dim);
        let mut records = Vec::with_capacity(config.trials);
        let mut failed = 0;
        for (trial, outcome) in (0..config.trials).zip(&mut outcomes) {
            match outcome {
                Ok(rec) => records.push(rec),
                Err(e) => {
                    failed += 1;
                    failures.push(TrialFailure { n, r, trial, resource_exhausted: e.is_resource_exhausted(), error: e.to_string() });
                }
            }
        }
        cells.push(CellSummary::aggregate(n, r, config.dim, config.complex, config.k_max, records, failed));
    }
    let result = SweepResult { config: config.clone(), cells, failures };
    if let Some(path) = &config.out {
        result.write(path)?;
    }
    Ok(result)
}

/// Every grid box of side `r / (4 sqrt d)`, aligned to the lattice
/// `lambda Z^d`, that lies inside the domain contains a sample point.
pub fn coverage_check(cloud: &PointCloud, r: f64, domain: Density) -> Result<bool, ExperimentError> {
    if !domain.kind.is_bounded() {
        return Err(ExperimentError::UnboundedDomain(domain.kind));
    }
    if cloud.is_empty() {
        return Ok(false);
    }
    let d = domain.dim;
    let lambda = r / (4.0 * (d as f64).sqrt());
    let occupied: std::collections::HashSet<Vec<i64>> =
        cloud.points().map(|p| p.iter().map(|x| (x / lambda).floor() as i64).collect()).collect();
    let (lo, hi) = match domain.kind {
        DensityKind::UniformCube => (0i64, (1.0 / lambda).floor() as i64),
        _ => {
            let m = (1.0 / lambda).ceil() as i64;
            (-m, m)
        }
    };
    let inside = |cell: &[i64]| match domain.kind {
        DensityKind::UniformCube => cell.iter().all(|&i| (i + 1) as f64 * lambda <= 1.0),
        _ => {
            let far: f64 = cell
                .iter()
                .map(|&i| {
                    let a = (i as f64 * lambda).abs().max(((i + 1) as f64 * lambda).abs());
                    a * a
                })
                .sum();
            far <= 1.0
        }
    };
    let mut cell = vec![lo; d];
    loop {
        if inside(&cell) && !occupied.contains(&cell) {
            return Ok(false);
        }
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(true);
            }
            cell[axis] += 1;
            if cell[axis] < hi {
                break;
            }
            cell[axis] = lo;
            axis += 1;
        }
    }
}

/// Least-squares fit of `ln y = intercept + slope * ln x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

/// Fits `ln y` against `ln x`; needs at least three points with distinct `x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<ScalingFit> {
    let m = points.len();
    if m < 3 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mf = m as f64;
    let xbar = xs.iter().sum::<f64>() / mf;
    let ybar = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = (ssr / (mf - 2.0) / sxx).sqrt();
    Some(ScalingFit { slope, intercept, slope_stderr, points: m })
}

/// Slope of `ln mean beta_k` against `ln n` over the cells of a sweep.
pub fn fit_scaling(result: &SweepResult, k: usize) -> Result<ScalingFit, ExperimentError> {
    let usable: Vec<&CellSummary> = result.cells.iter().filter(|c| c.betti.len() > k).collect();
    let zero: Vec<(usize, f64)> = usable.iter().filter(|c| c.betti[k].mean <= 0.0).map(|c| (c.n, c.r)).collect();
    if !zero.is_empty() {
        return Err(ExperimentError::ZeroMean { k, cells: zero });
    }
    let mut distinct: Vec<usize> = usable.iter().map(|c| c.n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(ExperimentError::TooFewPoints { k, have: distinct.len() });
    }
    let points: Vec<(f64, f64)> = usable.iter().map(|c| (c.n as f64, c.betti[k].mean)).collect();
    Ok(fit_power_law(&points).expect("three distinct positive points"))
}

/// Exponent of `n` in `E[beta_k]` when `r = c n^(-alpha)` in the sparse regime.
pub fn predicted_slope(kind: ComplexKind, dim: usize, k: usize, alpha: f64) -> f64 {
    let (d, k) = (dim as f64, k as f64);
    match kind {
        ComplexKind::Cech => (k + 2.0) - d * alpha * (k + 1.0),
        _ => (2.0 * k + 2.0) - d * alpha * (2.0 * k + 1.0),
    }
}

/// Fraction of trials with `beta_k > 0` in a cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFraction {
    pub n: usize,
    pub r: f64,
    pub fraction: f64,
}

/// Per cell, the fraction of trials with `beta_k > 0` (`NaN` without data).
pub fn vanishing_fraction(result: &SweepResult, k: usize) -> Vec<CellFraction> {
    result
        .cells
        .iter()
        .map(|c| CellFraction { n: c.n, r: c.r, fraction: c.nonvanishing_fraction.get(k).copied().unwrap_or(f64::NAN) })
        .collect()
}

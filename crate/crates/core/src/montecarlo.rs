//! Seeded Monte Carlo ensembles: RMSE and bias against the CRLB, noise and
//! target sweeps, and paired empirical error CDFs for WLS versus ML.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{LocError, Result};
use crate::estimator::{self, EstimatorOptions};
use crate::geometry::{self, NoiseModel, SensorPair};
use crate::reference::{self, MlOptions};
use crate::rng;
use crate::Position;

/// Default ensemble size.
pub const DEFAULT_RUNS: usize = 10_000;

/// Noise-scaling sweep defaults.
pub const DEFAULT_RHO_VALUES: [f64; 6] = [0.05, 0.1, 0.2, 0.4, 0.8, 1.0];

/// Per-ρ noise of the noise-scaling experiment: `σ_r = 40ρ` m,
/// `σ_φ = σ_θ = 0.1ρ` rad.
pub fn unit_sweep_noise() -> NoiseModel {
    NoiseModel::new(40.0, 0.1, 0.1).expect("constant noise is valid")
}

/// Ten x positions evenly spaced over `[200, 2000]` m.
pub fn default_x_values() -> Vec<f64> {
    (0..10).map(|i| 200.0 + 200.0 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sensors: SensorPair,
    pub target: Position,
    pub noise: NoiseModel,
    pub estimator_opts: EstimatorOptions,
    /// When present, every run also runs the ML estimator. Its
    /// `initial_guess` is replaced by the true target.
    pub ml_opts: Option<MlOptions>,
    pub runs: usize,
    pub master_seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(LocError::Config("runs must be at least 1".into()));
        }
        if !self.target.iter().all(|v| v.is_finite()) {
            return Err(LocError::Config("target coordinates must be finite".into()));
        }
        self.estimator_opts.validate()?;
        if let Some(ml) = &self.ml_opts {
            ml.validate()?;
        }
        Ok(())
    }

    fn ml_options(&self) -> Option<MlOptions> {
        self.ml_opts.map(|o| MlOptions {
            initial_guess: self.target,
            ..o
        })
    }
}

/// Error statistics of one estimator over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    /// `sqrt(mean ||û - u||²)` over successful runs; NaN if none succeeded.
    pub rmse: f64,
    /// `mean(û) - u` over successful runs, meters.
    pub bias: Vector3<f64>,
    pub failure_count: usize,
    /// Position error norm of each run in run order, `None` where the
    /// estimator failed.
    pub errors: Vec<Option<f64>>,
}

impl EnsembleStats {
    fn from_runs(target: &Position, estimates: &[Option<Position>]) -> Self {
        let mut sum_sq = 0.0;
        let mut sum = Vector3::zeros();
        let mut ok = 0usize;
        let errors = estimates
            .iter()
            .map(|e| {
                e.map(|p| {
                    let diff = p - target;
                    sum_sq += diff.norm_squared();
                    sum += diff;
                    ok += 1;
                    diff.norm()
                })
            })
            .collect();
        let n = ok as f64;
        Self {
            rmse: (sum_sq / n).sqrt(),
            bias: if ok > 0 { sum / n } else { Vector3::repeat(f64::NAN) },
            failure_count: estimates.len() - ok,
            errors,
        }
    }

    pub fn runs(&self) -> usize {
        self.errors.len()
    }

    pub fn successful_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.errors.iter().filter_map(|e| *e)
    }

    /// Successful errors sorted ascending.
    pub fn sorted_errors(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.successful_errors().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn median_error(&self) -> f64 {
        median(&self.sorted_errors())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub wls: EnsembleStats,
    pub ml: Option<EnsembleStats>,
}

struct RunOutcome {
    wls: Option<Position>,
    ml: Option<Position>,
}

/// Runs every ensemble member on its own substream. Per-run estimator
/// failures are counted, never propagated; only an invalid scenario or an
/// unmeasurable target aborts.
pub fn run_ensemble(sc: &Scenario) -> Result<EnsembleReport> {
    sc.validate()?;
    // Fails fast on a target the forward model cannot measure.
    geometry::true_measurement(&sc.target, &sc.sensors)?;
    let ml_opts = sc.ml_options();

    let outcomes: Vec<RunOutcome> = (0..sc.runs)
        .into_par_iter()
        .map(|l| {
            let mut stream = rng::substream(sc.master_seed, l as u64);
            let m = match geometry::sample_measurement(&sc.target, &sc.sensors, &sc.noise, &mut stream) {
                Ok(m) => m,
                Err(_) => return RunOutcome { wls: None, ml: None },
            };
            let wls = estimator::locate(&m, &sc.sensors, &sc.noise, &sc.estimator_opts)
                .ok()
                .map(|e| e.position);
            let ml = ml_opts.as_ref().and_then(|o| {
                reference::ml_locate(&m, &sc.sensors, &sc.noise, o)
                    .ok()
                    .map(|e| e.position)
            });
            RunOutcome { wls, ml }
        })
        .collect();

    let wls: Vec<_> = outcomes.iter().map(|o| o.wls).collect();
    let ml = ml_opts.map(|_| {
        let ml: Vec<_> = outcomes.iter().map(|o| o.ml).collect();
        EnsembleStats::from_runs(&sc.target, &ml)
    });
    Ok(EnsembleReport {
        wls: EnsembleStats::from_runs(&sc.target, &wls),
        ml,
    })
}

/// One sweep: aligned per-point RMSE and CRLB columns. `None` marks a point
/// whose ensemble or bound could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_values: Vec<f64>,
    pub rmse_wls: Vec<Option<f64>>,
    pub crlb_bound: Vec<Option<f64>>,
    pub rmse_ml: Option<Vec<Option<f64>>>,
    pub failures: Vec<usize>,
}

impl SweepResult {
    fn new(with_ml: bool) -> Self {
        Self {
            axis_values: Vec::new(),
            rmse_wls: Vec::new(),
            crlb_bound: Vec::new(),
            rmse_ml: with_ml.then(Vec::new),
            failures: Vec::new(),
        }
    }

    fn push(&mut self, axis: f64, sc: &Scenario) {
        let report = run_ensemble(sc).ok();
        let finite = |v: f64| v.is_finite().then_some(v);
        self.axis_values.push(axis);
        self.rmse_wls
            .push(report.as_ref().and_then(|r| finite(r.wls.rmse)));
        if let Some(col) = self.rmse_ml.as_mut() {
            col.push(
                report
                    .as_ref()
                    .and_then(|r| r.ml.as_ref())
                    .and_then(|s| finite(s.rmse)),
            );
        }
        self.failures.push(
            report
                .as_ref()
                .map(|r| r.wls.failure_count)
                .unwrap_or(sc.runs),
        );
        self.crlb_bound.push(
            reference::crlb(&sc.target, &sc.sensors, &sc.noise)
                .ok()
                .map(|c| c.rmse_bound),
        );
    }

    pub fn len(&self) -> usize {
        self.axis_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis_values.is_empty()
    }
}

/// For each ρ, noise = `ρ · unit_noise`. All points share `base.master_seed`,
/// so they see the same standard-normal draws.
pub fn noise_sweep(base: &Scenario, rho_values: &[f64], unit_noise: &NoiseModel) -> Result<SweepResult> {
    base.validate()?;
    if rho_values.is_empty() {
        return Err(LocError::Config("noise sweep needs at least one rho value".into()));
    }
    if rho_values.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(LocError::Config("rho values must be positive and finite".into()));
    }
    if rho_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(LocError::Config("rho values must be ascending".into()));
    }
    let mut out = SweepResult::new(base.ml_opts.is_some());
    for &rho in rho_values {
        let sc = Scenario {
            noise: unit_noise.scaled(rho)?,
            ..base.clone()
        };
        out.push(rho, &sc);
    }
    Ok(out)
}

/// Moves the target along x, keeping the base target's y and z.
pub fn target_sweep(base: &Scenario, x_values: &[f64]) -> Result<SweepResult> {
    base.validate()?;
    if x_values.is_empty() {
        return Err(LocError::Config("target sweep needs at least one x value".into()));
    }
    if x_values.iter().any(|x| !x.is_finite()) {
        return Err(LocError::Config("x values must be finite".into()));
    }
    let mut out = SweepResult::new(base.ml_opts.is_some());
    for &x in x_values {
        let sc = Scenario {
            target: Vector3::new(x, base.target.y, base.target.z),
            ..base.clone()
        };
        out.push(x, &sc);
    }
    Ok(out)
}

/// Relative distance below which two observed errors are one grid point of
/// the merged CDF table.
pub const GRID_MERGE_TOLERANCE: f64 = 1e-9;

/// Sorted errors with empirical CDF levels `l / runs`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub points: Vec<(f64, f64)>,
    pub runs: usize,
}

impl EmpiricalCdf {
    pub fn from_stats(stats: &EnsembleStats) -> Self {
        let runs = stats.runs();
        let points = stats
            .sorted_errors()
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, (i + 1) as f64 / runs as f64))
            .collect();
        Self { points, runs }
    }

    /// Fraction of runs with error `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.points.partition_point(|&(e, _)| e <= x);
        count as f64 / self.runs as f64
    }

    pub fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCdfs {
    pub wls: EmpiricalCdf,
    pub ml: EmpiricalCdf,
}

impl ErrorCdfs {
    /// `(error, cdf_wls, cdf_ml)` at every observed error of either
    /// estimator, ascending. Errors within [`GRID_MERGE_TOLERANCE`]
    /// (relative) of the previous grid point share it; the grid keeps the
    /// largest member so both step functions have already jumped there.
    pub fn merged(&self) -> Vec<(f64, f64, f64)> {
        let mut all: Vec<f64> = self.wls.errors().chain(self.ml.errors()).collect();
        all.sort_by(f64::total_cmp);
        let mut grid: Vec<f64> = Vec::with_capacity(all.len());
        let mut cluster_start = f64::NEG_INFINITY;
        for e in all {
            match grid.last_mut() {
                Some(last) if e - cluster_start <= GRID_MERGE_TOLERANCE * e.abs() => *last = e,
                _ => {
                    cluster_start = e;
                    grid.push(e);
                }
            }
        }
        grid.into_iter()
            .map(|e| (e, self.wls.eval(e), self.ml.eval(e)))
            .collect()
    }

    /// Two-sample Kolmogorov-Smirnov statistic between the two CDFs.
    pub fn ks_statistic(&self) -> f64 {
        self.merged()
            .into_iter()
            .map(|(_, a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Paired WLS/ML error CDFs from one ensemble.
pub fn error_cdf(sc: &Scenario) -> Result<ErrorCdfs> {
    if sc.ml_opts.is_none() {
        return Err(LocError::Config("error CDF comparison needs ML options".into()));
    }
    let report = run_ensemble(sc)?;
    let ml = report.ml.expect("ML stats present when ml_opts is set");
    Ok(ErrorCdfs {
        wls: EmpiricalCdf::from_stats(&report.wls),
        ml: EmpiricalCdf::from_stats(&ml),
    })
}

/// Median of an ascending slice; NaN when empty.
pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

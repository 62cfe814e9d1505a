//! Subcommand drivers. Each writes its primary output to `out` and
//! diagnostics to `diag`, so they can run in-process under test.

use std::io::Write;

use hybridloc::geometry::Measurement;
use hybridloc::montecarlo::{self, SweepResult};
use hybridloc::{estimator, reference};

use crate::args::EstimatorSet;
use crate::config::{AngleUnit, ScenarioConfig};
use crate::error::CliError;
use crate::output::{
    cell, matrix_rows, vector, write_csv, CrlbOutput, LocateOutput, ResultRecord, SimulationSummary,
    StatsSummary,
};

/// What to echo into result records.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub arguments: Vec<String>,
    pub timestamp: bool,
}

/// Flag overrides for the ensemble size and seed.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &ScenarioConfig) -> Result<ScenarioConfig, CliError> {
        let mut cfg = cfg.clone();
        if let Some(runs) = self.runs {
            cfg.runs = runs;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Scale all three noise standard deviations by each value.
    Noise,
    /// Move the target's x coordinate to each value.
    Target,
}

pub fn locate(
    cfg: &ScenarioConfig,
    unit: AngleUnit,
    measurement_deg: (f64, f64, f64),
    inv: &Invocation,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (r, az, el) = measurement_deg;
    if ![r, az, el].iter().all(|v| v.is_finite()) {
        return Err(CliError::Config("measurement values must be finite".into()));
    }
    let m = Measurement::from_degrees(r, az, el);
    let sensors = cfg.sensor_pair()?;
    let noise = cfg.noise_model(unit)?;
    let est = estimator::locate(&m, &sensors, &noise, &cfg.estimator_options())?;
    let output = LocateOutput {
        position_m: vector(&est.position),
        covariance_m2: matrix_rows(&est.covariance),
        iterations_used: est.iterations_used,
        condition_number: est.condition_number,
    };
    ResultRecord::new("locate", inv.arguments.clone(), cfg.clone(), output)
        .stamped(inv.timestamp)
        .write_json(out)?;
    Ok(())
}

pub fn crlb(cfg: &ScenarioConfig, unit: AngleUnit, inv: &Invocation, out: &mut dyn Write) -> Result<(), CliError> {
    let c = reference::crlb(&cfg.target(), &cfg.sensor_pair()?, &cfg.noise_model(unit)?)?;
    let output = CrlbOutput {
        fim: matrix_rows(&c.fim),
        crlb_m2: matrix_rows(&c.crlb),
        rmse_bound_m: c.rmse_bound,
    };
    ResultRecord::new("crlb", inv.arguments.clone(), cfg.clone(), output)
        .stamped(inv.timestamp)
        .write_json(out)?;
    Ok(())
}

/// Per-run error CSV on `out`, summary record on `summary`.
pub fn simulate(
    cfg: &ScenarioConfig,
    unit: AngleUnit,
    overrides: Overrides,
    estimators: EstimatorSet,
    inv: &Invocation,
    out: &mut dyn Write,
    summary: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = overrides.apply(cfg)?;
    let sc = cfg.scenario(unit, estimators.ml)?;
    let report = montecarlo::run_ensemble(&sc)?;

    let mut header = vec!["run_index", "error_wls_m"];
    if report.ml.is_some() {
        header.push("error_ml_m");
    }
    let rows = (0..sc.runs).map(|l| {
        let mut row = vec![l.to_string(), cell(report.wls.errors[l])];
        if let Some(ml) = &report.ml {
            row.push(cell(ml.errors[l]));
        }
        row
    });
    write_csv(out, &header, rows)?;

    let bound = reference::crlb(&sc.target, &sc.sensors, &sc.noise).ok().map(|c| c.rmse_bound);
    let output = SimulationSummary {
        runs: sc.runs,
        seed: sc.master_seed,
        wls: StatsSummary::from(&report.wls),
        ml: report.ml.as_ref().map(StatsSummary::from),
        crlb_rmse_bound_m: bound,
    };
    ResultRecord::new("simulate", inv.arguments.clone(), cfg, output)
        .stamped(inv.timestamp)
        .write_json(summary)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    cfg: &ScenarioConfig,
    unit: AngleUnit,
    mode: SweepMode,
    values: Option<Vec<f64>>,
    overrides: Overrides,
    estimators: EstimatorSet,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = overrides.apply(cfg)?;
    let base = cfg.scenario(unit, estimators.ml)?;
    let result: SweepResult = match mode {
        SweepMode::Noise => {
            let rho = values.unwrap_or_else(|| montecarlo::DEFAULT_RHO_VALUES.to_vec());
            montecarlo::noise_sweep(&base, &rho, &base.noise)?
        }
        SweepMode::Target => {
            let xs = values.unwrap_or_else(montecarlo::default_x_values);
            montecarlo::target_sweep(&base, &xs)?
        }
    };

    for i in 0..result.len() {
        let axis = result.axis_values[i];
        if result.rmse_wls[i].is_none() {
            writeln!(diag, "warning: no successful WLS runs at axis value {axis}")?;
        } else if result.failures[i] > 0 {
            writeln!(diag, "warning: {} of {} WLS runs failed at axis value {axis}", result.failures[i], base.runs)?;
        }
        if result.crlb_bound[i].is_none() {
            writeln!(diag, "warning: CRLB undefined at axis value {axis}")?;
        }
    }

    let mut header = vec!["axis_value", "rmse_wls_m", "crlb_bound_m"];
    if result.rmse_ml.is_some() {
        header.push("rmse_ml_m");
    }
    let rows = (0..result.len()).map(|i| {
        let mut row = vec![
            cell(Some(result.axis_values[i])),
            cell(result.rmse_wls[i]),
            cell(result.crlb_bound[i]),
        ];
        if let Some(ml) = &result.rmse_ml {
            row.push(cell(ml[i]));
        }
        row
    });
    write_csv(out, &header, rows)?;
    Ok(())
}

/// WLS and ML empirical CDFs on the merged error grid.
pub fn cdf(cfg: &ScenarioConfig, unit: AngleUnit, overrides: Overrides, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = overrides.apply(cfg)?;
    let sc = cfg.scenario(unit, true)?;
    let cdfs = montecarlo::error_cdf(&sc)?;
    let rows = cdfs
        .merged()
        .into_iter()
        .map(|(e, a, b)| vec![cell(Some(e)), cell(Some(a)), cell(Some(b))]);
    write_csv(out, &["error_m", "cdf_wls", "cdf_ml"], rows)?;
    Ok(())
}

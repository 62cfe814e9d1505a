//! Result records (JSON) and CSV tables.
//!
//! CSV numbers use the shortest decimal string that round-trips to the same
//! `f64`; cells are comma separated, lines end with `\n`, and a missing
//! value is an empty cell.

use std::io::Write;

use hybridloc::montecarlo::EnsembleStats;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope for every JSON result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord<T> {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: ScenarioConfig,
    pub version: String,
    /// Seconds since the Unix epoch; only written with `--timestamp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub output: T,
}

impl<T: Serialize> ResultRecord<T> {
    pub fn new(command: &str, arguments: Vec<String>, config: ScenarioConfig, output: T) -> Self {
        Self {
            command: command.to_owned(),
            arguments,
            config,
            version: VERSION.to_owned(),
            timestamp_unix: None,
            output,
        }
    }

    pub fn stamped(mut self, stamp: bool) -> Self {
        if stamp {
            self.timestamp_unix = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs());
        }
        self
    }

    pub fn write_json<W: Write + ?Sized>(&self, w: &mut W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, self)?;
        writeln!(w)
    }
}

pub type Matrix = [[f64; 3]; 3];

pub fn matrix_rows(m: &Matrix3<f64>) -> Matrix {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

pub fn vector(v: &Vector3<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocateOutput {
    pub position_m: [f64; 3],
    pub covariance_m2: Matrix,
    pub iterations_used: usize,
    pub condition_number: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrlbOutput {
    pub fim: Matrix,
    pub crlb_m2: Matrix,
    pub rmse_bound_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub rmse_m: Option<f64>,
    pub bias_m: Option<[f64; 3]>,
    pub failure_count: usize,
}

impl From<&EnsembleStats> for StatsSummary {
    fn from(s: &EnsembleStats) -> Self {
        let ok = s.failure_count < s.runs();
        Self {
            rmse_m: ok.then_some(s.rmse),
            bias_m: ok.then(|| vector(&s.bias)),
            failure_count: s.failure_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub runs: usize,
    pub seed: u64,
    pub wls: StatsSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ml: Option<StatsSummary>,
    /// Absent when the bound is undefined (zero noise, singular geometry).
    pub crlb_rmse_bound_m: Option<f64>,
}

/// One CSV cell.
pub fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x}"),
        _ => String::new(),
    }
}

/// Writes a header and rows with `\n` line endings.
pub fn write_csv<W: Write + ?Sized>(w: &mut W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

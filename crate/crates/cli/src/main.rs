use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hybridloc_cli::args::{parse_estimators, parse_value_list};
use hybridloc_cli::commands::{self, Invocation, Overrides, SweepMode};
use hybridloc_cli::{AngleUnit, CliError, ScenarioConfig};

/// Closed-form TDOA/AOA source localization, CRLB and Monte Carlo experiments.
///
/// Exit codes: 0 success, 2 configuration or parse error, 3 numerical or
/// geometry error.
#[derive(Parser)]
#[command(name = "hybridloc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    config: PathBuf,
    /// Read noise.sigma_az_deg and noise.sigma_el_deg as radians.
    #[arg(long)]
    radians: bool,
}

#[derive(Args)]
struct Ensemble {
    /// Override the number of runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Ensemble {
    fn overrides(&self) -> Overrides {
        Overrides {
            runs: self.runs,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Noise,
    Target,
}

#[derive(Subcommand)]
enum Command {
    /// Locate a source from one measurement.
    Locate {
        #[command(flatten)]
        common: Common,
        /// Range difference ||u - s2|| - ||u - s1||, meters.
        #[arg(long = "r", allow_hyphen_values = true)]
        range_diff: f64,
        /// Azimuth, degrees.
        #[arg(long = "az", allow_hyphen_values = true)]
        azimuth: f64,
        /// Elevation, degrees.
        #[arg(long = "el", allow_hyphen_values = true)]
        elevation: f64,
        /// Add a Unix timestamp to the record.
        #[arg(long)]
        timestamp: bool,
    },
    /// Print the Fisher information, CRLB and RMSE bound for the configured target.
    Crlb {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        timestamp: bool,
    },
    /// Run an ensemble; per-run errors as CSV on stdout.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
        /// Estimators to run: wls or wls,ml.
        #[arg(long, default_value = "wls")]
        estimators: String,
        /// Write the summary record here instead of standard error.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        timestamp: bool,
    },
    /// RMSE and CRLB over noise scale factors or target x positions.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Comma-separated axis values (rho factors or x in meters).
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long, default_value = "wls")]
        estimators: String,
    },
    /// Empirical error CDFs of WLS and ML on paired draws.
    Cdf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
    },
}

fn unit(common: &Common) -> AngleUnit {
    if common.radians {
        AngleUnit::Radians
    } else {
        AngleUnit::Degrees
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let inv = |timestamp: bool| Invocation {
        arguments: std::env::args().skip(1).collect(),
        timestamp,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = io::stderr();

    match cli.command {
        Command::Locate {
            common,
            range_diff,
            azimuth,
            elevation,
            timestamp,
        } => {
            let cfg = ScenarioConfig::from_path(&common.config)?;
            commands::locate(&cfg, unit(&common), (range_diff, azimuth, elevation), &inv(timestamp), &mut out)?;
        }
        Command::Crlb { common, timestamp } => {
            let cfg = ScenarioConfig::from_path(&common.config)?;
            commands::crlb(&cfg, unit(&common), &inv(timestamp), &mut out)?;
        }
        Command::Simulate {
            common,
            ensemble,
            estimators,
            summary,
            timestamp,
        } => {
            let cfg = ScenarioConfig::from_path(&common.config)?;
            let set = parse_estimators(&estimators)?;
            let mut sidecar: Box<dyn Write> = match summary {
                Some(path) => Box::new(BufWriter::new(File::create(path)?)),
                None => Box::new(io::stderr()),
            };
            commands::simulate(&cfg, unit(&common), ensemble.overrides(), set, &inv(timestamp), &mut out, &mut sidecar)?;
            sidecar.flush()?;
        }
        Command::Sweep {
            common,
            ensemble,
            mode,
            values,
            estimators,
        } => {
            let cfg = ScenarioConfig::from_path(&common.config)?;
            let set = parse_estimators(&estimators)?;
            let values = values.as_deref().map(parse_value_list).transpose()?;
            let mode = match mode {
                Mode::Noise => SweepMode::Noise,
                Mode::Target => SweepMode::Target,
            };
            commands::sweep(&cfg, unit(&common), mode, values, ensemble.overrides(), set, &mut out, &mut err)?;
        }
        Command::Cdf { common, ensemble } => {
            let cfg = ScenarioConfig::from_path(&common.config)?;
            commands::cdf(&cfg, unit(&common), ensemble.overrides(), &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

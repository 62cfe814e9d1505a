//! Library side of the `hybridloc` command-line tool: scenario files,
//! argument parsing, result serialization and the subcommand drivers.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{AngleUnit, ScenarioConfig};
pub use error::CliError;

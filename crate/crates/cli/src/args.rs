//! Parsers for list-valued command-line flags.

use crate::error::CliError;

/// Estimators an ensemble command should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorSet {
    pub ml: bool,
}

/// Parses `v1,v2,...` into finite numbers. Surrounding whitespace is
/// ignored; empty items are errors.
pub fn parse_value_list(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Config("value list is empty".into()));
    }
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let v: f64 = item
                .parse()
                .map_err(|_| CliError::Config(format!("not a number: {item:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Config(format!("value must be finite: {item:?}")))
            }
        })
        .collect()
}

/// Parses `wls` or `wls,ml` (any order, no duplicates). WLS always runs.
pub fn parse_estimators(text: &str) -> Result<EstimatorSet, CliError> {
    let mut wls = false;
    let mut ml = false;
    for item in text.split(',').map(str::trim) {
        let slot = match item.to_ascii_lowercase().as_str() {
            "wls" => &mut wls,
            "ml" => &mut ml,
            other => {
                return Err(CliError::Config(format!(
                    "unknown estimator {other:?} (expected wls or ml)"
                )))
            }
        };
        if *slot {
            return Err(CliError::Config(format!("estimator {item:?} listed twice")));
        }
        *slot = true;
    }
    if !wls {
        return Err(CliError::Config("the estimator list must include wls".into()));
    }
    Ok(EstimatorSet { ml })
}

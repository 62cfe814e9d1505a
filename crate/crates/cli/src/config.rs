//! Scenario files.
//!
//! A scenario is a JSON object:
//!
//! ```json
//! {
//!   "schema": 1,
//!   "sensors": { "s1": [0, 0, 0], "s2": [500, 100, 2000] },
//!   "target": [1000, 200, 100],
//!   "noise": { "sigma_r_m": 10, "sigma_az_deg": 1, "sigma_el_deg": 1 },
//!   "estimator": { "iterations": 2 },
//!   "ml": { "max_iterations": 50, "step_tolerance_m": 1e-8 },
//!   "runs": 10000,
//!   "seed": 2025
//! }
//! ```
//!
//! `estimator` and `ml` are optional. Distances are meters and angles are
//! degrees; the file values are kept verbatim so that writing a parsed
//! config reproduces the same numbers.

use hybridloc::{EstimatorOptions, MlOptions, NoiseModel, Position, Scenario, SensorPair};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub sensors: SensorsConfig,
    pub target: [f64; 3],
    pub noise: NoiseConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ml: Option<MlConfig>,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorsConfig {
    pub s1: [f64; 3],
    pub s2: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_r_m: f64,
    pub sigma_az_deg: f64,
    pub sigma_el_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub iterations: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            iterations: EstimatorOptions::default().iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlConfig {
    #[serde(default = "default_ml_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_ml_step")]
    pub step_tolerance_m: f64,
}

fn default_ml_iterations() -> usize {
    50
}

fn default_ml_step() -> f64 {
    1e-8
}

impl Default for MlConfig {
    fn default() -> Self {
        Self {
            max_iterations: default_ml_iterations(),
            step_tolerance_m: default_ml_step(),
        }
    }
}

/// How the angle standard deviations in `noise` are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleUnit {
    #[default]
    Degrees,
    /// `sigma_az_deg` / `sigma_el_deg` hold radians (`--radians`).
    Radians,
}

impl AngleUnit {
    pub fn to_radians(self, v: f64) -> f64 {
        match self {
            AngleUnit::Degrees => v.to_radians(),
            AngleUnit::Radians => v,
        }
    }
}

fn vec3(a: [f64; 3]) -> Position {
    Vector3::from(a)
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let finite = |name: &str, vals: &[f64]| {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be finite")))
            }
        };
        finite("sensors.s1", &self.sensors.s1)?;
        finite("sensors.s2", &self.sensors.s2)?;
        finite("target", &self.target)?;
        let n = &self.noise;
        for (name, v) in [
            ("noise.sigma_r_m", n.sigma_r_m),
            ("noise.sigma_az_deg", n.sigma_az_deg),
            ("noise.sigma_el_deg", n.sigma_el_deg),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(CliError::Config(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.estimator.iterations < 1 {
            return Err(CliError::Config("estimator.iterations must be at least 1".into()));
        }
        if let Some(ml) = &self.ml {
            if ml.max_iterations < 1 {
                return Err(CliError::Config("ml.max_iterations must be at least 1".into()));
            }
            if !(ml.step_tolerance_m > 0.0) || !ml.step_tolerance_m.is_finite() {
                return Err(CliError::Config("ml.step_tolerance_m must be positive".into()));
            }
        }
        if self.runs < 1 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sensor_pair(&self) -> Result<SensorPair, CliError> {
        Ok(SensorPair::new(vec3(self.sensors.s1), vec3(self.sensors.s2))?)
    }

    pub fn target(&self) -> Position {
        vec3(self.target)
    }

    pub fn noise_model(&self, unit: AngleUnit) -> Result<NoiseModel, CliError> {
        Ok(NoiseModel::new(
            self.noise.sigma_r_m,
            unit.to_radians(self.noise.sigma_az_deg),
            unit.to_radians(self.noise.sigma_el_deg),
        )?)
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions::with_iterations(self.estimator.iterations)
    }

    /// ML settings from the file, or the defaults when the section is absent.
    /// The initial guess is the configured target.
    pub fn ml_options(&self) -> MlOptions {
        let ml = self.ml.clone().unwrap_or_default();
        MlOptions {
            max_iterations: ml.max_iterations,
            step_tolerance: ml.step_tolerance_m,
            initial_guess: self.target(),
        }
    }

    pub fn scenario(&self, unit: AngleUnit, with_ml: bool) -> Result<Scenario, CliError> {
        Ok(Scenario {
            sensors: self.sensor_pair()?,
            target: self.target(),
            noise: self.noise_model(unit)?,
            estimator_opts: self.estimator_options(),
            ml_opts: with_ml.then(|| self.ml_options()),
            runs: self.runs,
            master_seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = r#"{
        "schema": 1,
        "sensors": { "s1": [0, 0, 0], "s2": [500, 100, 2000] },
        "target": [1000, 200, 100],
        "noise": { "sigma_r_m": 10, "sigma_az_deg": 1, "sigma_el_deg": 1 },
        "ml": { "max_iterations": 20 },
        "runs": 100,
        "seed": 7
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ScenarioConfig::from_json(SCENARIO).unwrap();
        assert_eq!(cfg.estimator.iterations, 2);
        let ml = cfg.ml.as_ref().unwrap();
        assert_eq!(ml.max_iterations, 20);
        assert_eq!(ml.step_tolerance_m, 1e-8);
        let noise = cfg.noise_model(AngleUnit::Degrees).unwrap();
        assert_eq!(noise.sigma_azimuth(), 1f64.to_radians());
        let rad = cfg.noise_model(AngleUnit::Radians).unwrap();
        assert_eq!(rad.sigma_azimuth(), 1.0);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let cfg = ScenarioConfig::from_json(SCENARIO).unwrap();
        let mut odd = cfg.clone();
        odd.noise.sigma_az_deg = 0.1 + 0.2;
        odd.target = [1e-300, -0.0, 123456.789012345678];
        assert_eq!(ScenarioConfig::from_json(&odd.to_json()).unwrap(), odd);
    }

    #[test]
    fn missing_field_is_named() {
        let text = SCENARIO.replace(r#""target": [1000, 200, 100],"#, "");
        let err = ScenarioConfig::from_json(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("target"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let text = SCENARIO.replace(r#""runs": 100"#, r#""runs": 100, "extra": 1"#);
        assert!(ScenarioConfig::from_json(&text).is_err());
    }

    #[test]
    fn wrong_schema_rejected() {
        let text = SCENARIO.replace(r#""schema": 1"#, r#""schema": 2"#);
        assert!(ScenarioConfig::from_json(&text).unwrap_err().to_string().contains("schema"));
    }

    #[test]
    fn negative_sigma_rejected() {
        let text = SCENARIO.replace(r#""sigma_r_m": 10"#, r#""sigma_r_m": -1"#);
        assert!(ScenarioConfig::from_json(&text).is_err());
    }

    #[test]
    fn coincident_sensors_are_a_geometry_error() {
        let text = SCENARIO.replace("[500, 100, 2000]", "[0, 0, 0]");
        let cfg = ScenarioConfig::from_json(&text).unwrap();
        assert_eq!(cfg.sensor_pair().unwrap_err().exit_code(), 3);
    }
}

//! Closed-form 3-D source localization from a single range difference (TDOA)
//! and a single azimuth/elevation pair (AOA).
//!
//! The ground sensor `s1` measures the angle of arrival; a UAV at `s2` relays
//! the signal so that the range difference `||u - s2|| - ||u - s1||` can be
//! formed. The crate provides:
//!
//! * [`geometry`]: the forward measurement model and noise sampling,
//! * [`estimator`]: the pseudo-linear weighted-least-squares solver,
//! * [`reference`]: the Cramér-Rao lower bound and a Gauss-Newton ML estimator,
//! * [`montecarlo`]: seeded ensemble simulation, sweeps and error CDFs.
//!
//! ```
//! use hybridloc::{estimator, geometry, EstimatorOptions, NoiseModel, SensorPair};
//! use nalgebra::Vector3;
//!
//! let sensors = SensorPair::new(Vector3::zeros(), Vector3::new(500.0, 100.0, 2000.0)).unwrap();
//! let target = Vector3::new(1000.0, 200.0, 100.0);
//! let m = geometry::true_measurement(&target, &sensors).unwrap();
//! let noise = NoiseModel::from_degrees(10.0, 1.0, 1.0).unwrap();
//! let est = estimator::locate(&m, &sensors, &noise, &EstimatorOptions::default()).unwrap();
//! assert!((est.position - target).norm() < 1e-6);
//! ```

pub mod error;
pub mod estimator;
pub mod geometry;
pub mod linalg;
pub mod montecarlo;
pub mod reference;
pub mod rng;

pub use error::{LocError, Result};
pub use estimator::{EstimatorOptions, PositionEstimate};
pub use geometry::{Measurement, NoiseModel, SensorPair};
pub use montecarlo::{EnsembleReport, EnsembleStats, Scenario, SweepResult};
pub use reference::{CrlbResult, MlOptions};

/// Position in a local Cartesian frame, meters.
pub type Position = nalgebra::Vector3<f64>;

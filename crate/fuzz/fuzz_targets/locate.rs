//! Decodes three little-endian f64 values as (range difference, azimuth,
//! elevation) and runs both estimators on the reference sensor layout.

#![no_main]

use hybridloc::estimator::locate;
use hybridloc::reference::ml_locate;
use hybridloc::{EstimatorOptions, Measurement, MlOptions, NoiseModel, SensorPair};
use libfuzzer_sys::fuzz_target;
use nalgebra::Vector3;

fuzz_target!(|data: &[u8]| {
    if data.len() < 24 {
        return;
    }
    let f = |i: usize| f64::from_le_bytes(data[8 * i..8 * i + 8].try_into().unwrap());
    let m = Measurement::new(f(0), f(1), f(2));
    let sensors = SensorPair::new(Vector3::zeros(), Vector3::new(500.0, 100.0, 2000.0)).unwrap();
    let noise = NoiseModel::from_degrees(10.0, 1.0, 1.0).unwrap();
    if let Ok(est) = locate(&m, &sensors, &noise, &EstimatorOptions::default()) {
        assert!(est.position.iter().all(|v| v.is_finite()));
    }
    let _ = ml_locate(&m, &sensors, &noise, &MlOptions::starting_at(Vector3::new(1000.0, 200.0, 100.0)));
});

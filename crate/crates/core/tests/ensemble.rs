//! Statistical behavior of the estimators on seeded ensembles.

mod common;

use common::reference_sensors;
use hybridloc::estimator::locate;
use hybridloc::geometry::sample_measurement;
use hybridloc::montecarlo::{error_cdf, noise_sweep, run_ensemble, target_sweep, unit_sweep_noise};
use hybridloc::reference::{crlb, ml_locate};
use hybridloc::{rng, EstimatorOptions, MlOptions, NoiseModel, Scenario};
use nalgebra::Vector3;

fn scenario(runs: usize, seed: u64) -> Scenario {
    Scenario {
        sensors: reference_sensors(),
        target: Vector3::new(1000.0, 200.0, 100.0),
        noise: NoiseModel::from_degrees(10.0, 1.0, 1.0).unwrap(),
        estimator_opts: EstimatorOptions::default(),
        ml_opts: None,
        runs,
        master_seed: seed,
    }
}

#[test]
fn estimate_mean_within_three_standard_errors() {
    let sc = scenario(10_000, 77);
    let n = sc.runs as f64;
    let mut sum = Vector3::zeros();
    let mut sum_sq = Vector3::zeros();
    for l in 0..sc.runs {
        let m = sample_measurement(&sc.target, &sc.sensors, &sc.noise, &mut rng::substream(sc.master_seed, l as u64)).unwrap();
        let e = locate(&m, &sc.sensors, &sc.noise, &sc.estimator_opts).unwrap().position - sc.target;
        sum += e;
        sum_sq += e.component_mul(&e);
    }
    let mean = sum / n;
    let var = sum_sq / n - mean.component_mul(&mean);
    for axis in 0..3 {
        let se = (var[axis] / n).sqrt();
        assert!(mean[axis].abs() < 3.0 * se, "axis {axis}: mean {} se {se}", mean[axis]);
    }
}

#[test]
fn ensemble_uses_the_documented_substreams() {
    let sc = scenario(25, 5);
    let report = run_ensemble(&sc).unwrap();
    for l in 0..sc.runs {
        let m = sample_measurement(&sc.target, &sc.sensors, &sc.noise, &mut rng::substream(5, l as u64)).unwrap();
        let e = (locate(&m, &sc.sensors, &sc.noise, &sc.estimator_opts).unwrap().position - sc.target).norm();
        assert_eq!(report.wls.errors[l], Some(e));
    }
}

#[test]
fn wls_and_ml_agree_on_a_noisy_draw() {
    let sc = scenario(1, 3);
    let m = sample_measurement(&sc.target, &sc.sensors, &sc.noise, &mut rng::substream(3, 0)).unwrap();
    let wls = locate(&m, &sc.sensors, &sc.noise, &sc.estimator_opts).unwrap();
    let ml = ml_locate(&m, &sc.sensors, &sc.noise, &MlOptions::starting_at(sc.target)).unwrap();
    let scale = crlb(&sc.target, &sc.sensors, &sc.noise).unwrap().rmse_bound;
    assert!((wls.position - ml.position).norm() < scale);
}

#[test]
fn ensemble_rmse_tracks_crlb() {
    let sc = scenario(4000, 21);
    let report = run_ensemble(&sc).unwrap();
    let bound = crlb(&sc.target, &sc.sensors, &sc.noise).unwrap().rmse_bound;
    let ratio = report.wls.rmse / bound;
    assert!((0.9..1.1).contains(&ratio), "ratio {ratio}");
    assert_eq!(report.wls.failure_count, 0);
    assert!(report.wls.bias.norm() < 0.05 * report.wls.rmse);
}

#[test]
fn noise_sweep_is_monotone_with_shared_seed() {
    let sw = noise_sweep(&scenario(1000, 8), &[0.05, 0.1, 0.2, 0.4, 0.8, 1.0], &unit_sweep_noise()).unwrap();
    let rmse: Vec<f64> = sw.rmse_wls.iter().map(|v| v.unwrap()).collect();
    let bound: Vec<f64> = sw.crlb_bound.iter().map(|v| v.unwrap()).collect();
    assert!(rmse.windows(2).all(|w| w[0] <= w[1]), "{rmse:?}");
    assert!(bound.windows(2).all(|w| w[0] <= w[1]));
    for (rho, b) in sw.axis_values.iter().zip(&bound) {
        assert!((b / rho - bound[0] / 0.05).abs() <= 1e-9 * bound[0] / 0.05);
    }
}

#[test]
fn target_sweep_with_ml_column() {
    let mut base = scenario(300, 4);
    base.ml_opts = Some(MlOptions::starting_at(Vector3::zeros()));
    let sw = target_sweep(&base, &[400.0, 1200.0]).unwrap();
    let ml = sw.rmse_ml.unwrap();
    assert_eq!(ml.len(), 2);
    assert!(ml.iter().all(Option::is_some));
    assert_eq!(sw.failures, vec![0, 0]);
}

#[test]
fn zero_noise_cdf_is_degenerate() {
    let mut sc = scenario(20, 1);
    sc.noise = NoiseModel::noiseless();
    sc.ml_opts = Some(MlOptions::starting_at(Vector3::zeros()));
    let cdfs = error_cdf(&sc).unwrap();
    assert!(cdfs.wls.errors().chain(cdfs.ml.errors()).all(|e| e < 1e-6));
    assert_eq!(cdfs.wls.points.last().unwrap().1, 1.0);
}

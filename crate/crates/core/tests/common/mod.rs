#![allow(dead_code)]

use hybridloc::geometry::{direction_vector, true_measurement};
use hybridloc::{Position, SensorPair};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum clearance from either sensor and from the ground sensor's
/// vertical axis, meters.
pub const GUARD_DISTANCE: f64 = 50.0;
/// Minimum `1 - cos` between the bearing and the UAV-to-target direction;
/// below it the UAV sits on the bearing ray and the system loses rank.
pub const GUARD_COLLINEAR: f64 = 1e-3;

pub fn reference_sensors() -> SensorPair {
    SensorPair::new(Vector3::zeros(), Vector3::new(500.0, 100.0, 2000.0)).unwrap()
}

pub fn outside_guards(u: &Position, s: &SensorPair) -> bool {
    let to1 = u - s.ground();
    let to2 = u - s.uav();
    if to1.norm() < GUARD_DISTANCE || to2.norm() < GUARD_DISTANCE {
        return false;
    }
    if to1.x.hypot(to1.y) < GUARD_DISTANCE {
        return false;
    }
    let m = true_measurement(u, s).unwrap();
    let d = direction_vector(m.azimuth, m.elevation);
    1.0 - d.dot(&to2.normalize()) > GUARD_COLLINEAR
}

/// `n` targets uniform in `[-half, half]³`, rejecting guard regions.
pub fn random_targets(n: usize, half: f64, seed: u64, s: &SensorPair) -> Vec<Position> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = Vector3::new(
            rng.random_range(-half..half),
            rng.random_range(-half..half),
            rng.random_range(-half..half),
        );
        if outside_guards(&u, s) {
            out.push(u);
        }
    }
    out
}

/// Random UAV positions paired with random targets.
pub fn random_geometries(n: usize, seed: u64) -> Vec<(SensorPair, Position)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s2 = Vector3::new(
            rng.random_range(-2000.0..2000.0),
            rng.random_range(-2000.0..2000.0),
            rng.random_range(100.0..3000.0),
        );
        let Ok(s) = SensorPair::new(Vector3::zeros(), s2) else { continue };
        let u = Vector3::new(
            rng.random_range(-2000.0..2000.0),
            rng.random_range(-2000.0..2000.0),
            rng.random_range(-2000.0..2000.0),
        );
        if outside_guards(&u, &s) {
            out.push((s, u));
        }
    }
    out
}

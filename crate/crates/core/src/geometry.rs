//! Forward measurement model.
//!
//! Maps a source position and the sensor pair to the noise-free range
//! difference, azimuth and elevation, and draws noisy measurements from it.
//! Angles are radians; azimuth is measured in the x-y plane from +x toward
//! +y, elevation from the horizontal plane toward +z.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LocError, Result};
use crate::Position;

/// Two positions closer than this are treated as coincident, meters.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-9;

/// Horizontal distance from the ground sensor below which azimuth is
/// undefined, meters.
pub const HORIZONTAL_GUARD: f64 = 1e-6;

/// Smallest admissible `cos(elevation)`.
pub const COS_ELEVATION_GUARD: f64 = 1e-9;

/// Ground sensor `s1` (measures AOA) and UAV relay `s2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorPair {
    ground: Position,
    uav: Position,
}

impl SensorPair {
    pub fn new(ground: Position, uav: Position) -> Result<Self> {
        if !ground.iter().chain(uav.iter()).all(|v| v.is_finite()) {
            return Err(LocError::Config("sensor coordinates must be finite".into()));
        }
        if (ground - uav).norm() <= COINCIDENCE_TOLERANCE {
            return Err(LocError::DegenerateGeometry(
                "ground sensor and UAV coincide".into(),
            ));
        }
        Ok(Self { ground, uav })
    }

    #[inline]
    pub fn ground(&self) -> &Position {
        &self.ground
    }

    #[inline]
    pub fn uav(&self) -> &Position {
        &self.uav
    }

    /// Baseline length `||s1 - s2||`.
    pub fn baseline(&self) -> f64 {
        (self.ground - self.uav).norm()
    }

    /// The same pair shifted by `offset`.
    pub fn translated(&self, offset: &Vector3<f64>) -> Self {
        Self {
            ground: self.ground + offset,
            uav: self.uav + offset,
        }
    }
}

/// `(r, φ, θ)`: range difference in meters, azimuth and elevation in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub range_diff: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl Measurement {
    pub fn new(range_diff: f64, azimuth: f64, elevation: f64) -> Self {
        Self {
            range_diff,
            azimuth,
            elevation,
        }
    }

    pub fn from_degrees(range_diff: f64, azimuth_deg: f64, elevation_deg: f64) -> Self {
        Self::new(range_diff, azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.range_diff, self.azimuth, self.elevation)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// Checks finiteness and the elevation domain `(-π/2, π/2)`.
    pub fn validate(&self) -> Result<()> {
        if !self.as_vector().iter().all(|v| v.is_finite()) {
            return Err(LocError::Config("measurement components must be finite".into()));
        }
        if self.elevation.abs() >= FRAC_PI_2 || self.elevation.cos() < COS_ELEVATION_GUARD {
            return Err(LocError::NearSingularElevation(format!(
                "elevation {} rad is at or beyond ±π/2",
                self.elevation
            )));
        }
        Ok(())
    }
}

/// Independent zero-mean Gaussian noise on `(r, φ, θ)`.
///
/// Zero standard deviations are accepted so that noiseless ensembles can be
/// simulated; estimators then fall back to unit weights on those components
/// (the pseudo-linear system is square, so the solution does not depend on
/// the weights).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma_range: f64,
    sigma_azimuth: f64,
    sigma_elevation: f64,
}

impl NoiseModel {
    pub fn new(sigma_range: f64, sigma_azimuth: f64, sigma_elevation: f64) -> Result<Self> {
        for (name, s) in [
            ("sigma_r", sigma_range),
            ("sigma_phi", sigma_azimuth),
            ("sigma_theta", sigma_elevation),
        ] {
            if !s.is_finite() || s < 0.0 {
                return Err(LocError::Config(format!(
                    "{name} must be finite and non-negative, got {s}"
                )));
            }
        }
        Ok(Self {
            sigma_range,
            sigma_azimuth,
            sigma_elevation,
        })
    }

    /// Angle standard deviations given in degrees.
    pub fn from_degrees(sigma_range: f64, sigma_az_deg: f64, sigma_el_deg: f64) -> Result<Self> {
        Self::new(sigma_range, sigma_az_deg.to_radians(), sigma_el_deg.to_radians())
    }

    pub fn noiseless() -> Self {
        Self {
            sigma_range: 0.0,
            sigma_azimuth: 0.0,
            sigma_elevation: 0.0,
        }
    }

    pub fn sigma_range(&self) -> f64 {
        self.sigma_range
    }

    pub fn sigma_azimuth(&self) -> f64 {
        self.sigma_azimuth
    }

    pub fn sigma_elevation(&self) -> f64 {
        self.sigma_elevation
    }

    pub fn sigmas(&self) -> Vector3<f64> {
        Vector3::new(self.sigma_range, self.sigma_azimuth, self.sigma_elevation)
    }

    /// Diagonal of `Q_m`.
    pub fn variances(&self) -> Vector3<f64> {
        self.sigmas().map(|s| s * s)
    }

    /// `Q_m = diag(σ_r², σ_φ², σ_θ²)`.
    pub fn covariance(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.variances())
    }

    /// True when every standard deviation is strictly positive, i.e. `Q_m`
    /// is positive definite.
    pub fn is_positive_definite(&self) -> bool {
        self.sigmas().iter().all(|&s| s > 0.0)
    }

    /// Variances used to build weight matrices: zero entries become 1.
    pub fn weighting_variances(&self) -> Vector3<f64> {
        self.variances().map(|v| if v > 0.0 { v } else { 1.0 })
    }

    /// All three standard deviations multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.sigma_range * factor,
            self.sigma_azimuth * factor,
            self.sigma_elevation * factor,
        )
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Unit vector `[cos θ cos φ, cos θ sin φ, sin θ]`.
pub fn direction_vector(azimuth: f64, elevation: f64) -> Vector3<f64> {
    let (sp, cp) = azimuth.sin_cos();
    let (st, ct) = elevation.sin_cos();
    Vector3::new(ct * cp, ct * sp, st)
}

/// The two unit normals of the bearing line:
/// `alpha = [sin φ, -cos φ, 0]`, `beta = [sin θ cos φ, sin θ sin φ, -cos θ]`.
///
/// Both are orthogonal to [`direction_vector`] at the same angles, so
/// `alphaᵀ(u - s1) = 0` and `betaᵀ(u - s1) = 0` hold for the true source.
pub fn aoa_basis(azimuth: f64, elevation: f64) -> (Vector3<f64>, Vector3<f64>) {
    let (sp, cp) = azimuth.sin_cos();
    let (st, ct) = elevation.sin_cos();
    (Vector3::new(sp, -cp, 0.0), Vector3::new(st * cp, st * sp, -ct))
}

/// Noise-free `(r, φ, θ)` of a source at `u`.
pub fn true_measurement(u: &Position, sensors: &SensorPair) -> Result<Measurement> {
    if !u.iter().all(|v| v.is_finite()) {
        return Err(LocError::Config("source coordinates must be finite".into()));
    }
    let to_ground = u - sensors.ground();
    let to_uav = u - sensors.uav();
    let d1 = to_ground.norm();
    let d2 = to_uav.norm();
    if d1 <= COINCIDENCE_TOLERANCE {
        return Err(LocError::DegenerateGeometry(
            "source coincides with the ground sensor".into(),
        ));
    }
    if d2 <= COINCIDENCE_TOLERANCE {
        return Err(LocError::DegenerateGeometry(
            "source coincides with the UAV".into(),
        ));
    }
    let horizontal = to_ground.x.hypot(to_ground.y);
    if horizontal < HORIZONTAL_GUARD {
        return Err(LocError::NearSingularElevation(format!(
            "source is {horizontal:e} m from the ground sensor's vertical axis"
        )));
    }
    let azimuth = to_ground.y.atan2(to_ground.x);
    let projection = to_ground.x * azimuth.cos() + to_ground.y * azimuth.sin();
    let elevation = to_ground.z.atan2(projection);
    Ok(Measurement {
        range_diff: d2 - d1,
        azimuth,
        elevation,
    })
}

/// Noise-free measurement plus one independent Gaussian draw per component.
///
/// Draw order is range, azimuth, elevation. The azimuth is wrapped to
/// `(-π, π]`; an elevation pushed past ±π/2 is folded back over the zenith
/// (or nadir) with the azimuth flipped by π, which describes the same ray.
pub fn sample_measurement<R: Rng + ?Sized>(
    u: &Position,
    sensors: &SensorPair,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Measurement> {
    let truth = true_measurement(u, sensors)?;
    let n_r: f64 = rng.sample(StandardNormal);
    let n_phi: f64 = rng.sample(StandardNormal);
    let n_theta: f64 = rng.sample(StandardNormal);

    let range_diff = truth.range_diff + noise.sigma_range * n_r;
    let mut azimuth = truth.azimuth + noise.sigma_azimuth * n_phi;
    let mut elevation = wrap_angle(truth.elevation + noise.sigma_elevation * n_theta);
    if elevation > FRAC_PI_2 {
        elevation = PI - elevation;
        azimuth += PI;
    } else if elevation < -FRAC_PI_2 {
        elevation = -PI - elevation;
        azimuth += PI;
    }
    Ok(Measurement {
        range_diff,
        azimuth: wrap_angle(azimuth),
        elevation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Reference values evaluated independently at 40 significant digits.
    const S1_R: f64 = 942.536_480_694_640_357_381_129;
    const S1_PHI: f64 = 0.197_395_559_849_880_758_370_049_765;
    const S1_THETA: f64 = 0.097_745_579_733_981_575_663_242_119;

    fn reference_sensors() -> SensorPair {
        SensorPair::new(Vector3::zeros(), Vector3::new(500.0, 100.0, 2000.0)).unwrap()
    }

    #[test]
    fn scenario_one_measurement() {
        let m = true_measurement(&Vector3::new(1000.0, 200.0, 100.0), &reference_sensors()).unwrap();
        assert_relative_eq!(m.range_diff, S1_R, max_relative = 1e-14);
        assert_relative_eq!(m.azimuth, S1_PHI, max_relative = 1e-14);
        assert_relative_eq!(m.elevation, S1_THETA, max_relative = 1e-14);
    }

    #[test]
    fn target_on_x_axis() {
        let sensors = SensorPair::new(Vector3::zeros(), Vector3::new(0.0, 0.0, 100.0)).unwrap();
        let m = true_measurement(&Vector3::new(100.0, 0.0, 0.0), &sensors).unwrap();
        assert_eq!(m.azimuth, 0.0);
        assert_eq!(m.elevation, 0.0);
        assert_relative_eq!(m.range_diff, 100.0 * (2f64.sqrt() - 1.0), max_relative = 1e-14);
    }

    #[test]
    fn target_above_sensor_is_flagged() {
        let err = true_measurement(&Vector3::new(0.0, 0.0, 50.0), &reference_sensors()).unwrap_err();
        assert!(matches!(err, LocError::NearSingularElevation(_)));
    }

    #[test]
    fn coincident_target_is_degenerate() {
        let s = reference_sensors();
        assert!(matches!(
            true_measurement(s.uav(), &s),
            Err(LocError::DegenerateGeometry(_))
        ));
        assert!(matches!(
            true_measurement(s.ground(), &s),
            Err(LocError::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn coincident_sensors_rejected() {
        assert!(SensorPair::new(Vector3::zeros(), Vector3::new(1e-12, 0.0, 0.0)).is_err());
    }

    #[test]
    fn direction_vector_axes() {
        assert_eq!(direction_vector(0.0, 0.0), Vector3::new(1.0, 0.0, 0.0));
        let y = direction_vector(FRAC_PI_2, 0.0);
        assert!((y - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn direction_vector_points_at_scenario_target() {
        let u = Vector3::new(1000.0, 200.0, 100.0);
        let d = direction_vector(S1_PHI, S1_THETA);
        assert!((d - u.normalize()).norm() < 1e-12);
    }

    #[test]
    fn aoa_basis_at_zero() {
        let (a, b) = aoa_basis(0.0, 0.0);
        assert_eq!(a, Vector3::new(0.0, -1.0, 0.0));
        assert_eq!(b, Vector3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn aoa_basis_annihilates_true_offset() {
        let u = Vector3::new(1000.0, 200.0, 100.0);
        let (a, b) = aoa_basis(S1_PHI, S1_THETA);
        assert!(a.dot(&u).abs() < 1e-9);
        assert!(b.dot(&u).abs() < 1e-9);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(wrap_angle(-3.0 * PI / 2.0), PI / 2.0, epsilon = 1e-15);
        assert_eq!(wrap_angle(0.3), 0.3);
    }

    #[test]
    fn zero_noise_sample_is_truth() {
        let s = reference_sensors();
        let u = Vector3::new(1000.0, 200.0, 100.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = sample_measurement(&u, &s, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert_eq!(m, true_measurement(&u, &s).unwrap());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let s = reference_sensors();
        let u = Vector3::new(1000.0, 200.0, 100.0);
        let noise = NoiseModel::from_degrees(10.0, 1.0, 1.0).unwrap();
        let a = sample_measurement(&u, &s, &noise, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_measurement(&u, &s, &noise, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_standard_deviations_match_configuration() {
        let s = reference_sensors();
        let u = Vector3::new(1000.0, 200.0, 100.0);
        let noise = NoiseModel::from_degrees(10.0, 1.0, 1.0).unwrap();
        let truth = true_measurement(&u, &s).unwrap().as_vector();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let mut sum = Vector3::zeros();
        let mut sum_sq = Vector3::zeros();
        for _ in 0..n {
            let e = sample_measurement(&u, &s, &noise, &mut rng).unwrap().as_vector() - truth;
            sum += e;
            sum_sq += e.component_mul(&e);
        }
        let mean = sum / n as f64;
        let std = (sum_sq / n as f64 - mean.component_mul(&mean)).map(f64::sqrt);
        for i in 0..3 {
            let rel = (std[i] - noise.sigmas()[i]).abs() / noise.sigmas()[i];
            assert!(rel < 0.02, "component {i}: std {} vs {}", std[i], noise.sigmas()[i]);
        }
    }

    #[test]
    fn elevation_folds_over_zenith() {
        let s = SensorPair::new(Vector3::zeros(), Vector3::new(0.0, 100.0, 0.0)).unwrap();
        // 89.9° elevation with a huge elevation sigma: every sample must stay in domain.
        let u = Vector3::new(1.0, 0.0, 573.0);
        let noise = NoiseModel::new(1.0, 0.01, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let m = sample_measurement(&u, &s, &noise, &mut rng).unwrap();
            assert!(m.elevation.abs() <= FRAC_PI_2);
            assert!(m.azimuth > -PI && m.azimuth <= PI);
        }
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(NoiseModel::new(-1.0, 0.1, 0.1).is_err());
        assert!(NoiseModel::new(1.0, f64::NAN, 0.1).is_err());
    }

    fn coord() -> impl Strategy<Value = f64> {
        -2000.0..2000.0f64
    }

    proptest! {
        #[test]
        fn range_difference_bounded_by_baseline(
            x in coord(), y in coord(), z in coord(),
            sx in coord(), sy in coord(), sz in coord(),
        ) {
            let s = SensorPair::new(Vector3::zeros(), Vector3::new(sx, sy, sz));
            prop_assume!(s.is_ok());
            let s = s.unwrap();
            if let Ok(m) = true_measurement(&Vector3::new(x, y, z), &s) {
                prop_assert!(m.range_diff.abs() <= s.baseline() * (1.0 + 1e-12));
            }
        }

        #[test]
        fn direction_round_trip(x in coord(), y in coord(), z in coord()) {
            let s = reference_sensors();
            let u = Vector3::new(x, y, z);
            if let Ok(m) = true_measurement(&u, &s) {
                let d = direction_vector(m.azimuth, m.elevation);
                prop_assert!((d - (u - s.ground()).normalize()).norm() < 1e-9);
                prop_assert!(m.azimuth > -PI && m.azimuth <= PI);
                prop_assert!(m.elevation.abs() < FRAC_PI_2);
            }
        }

        #[test]
        fn basis_is_orthonormal(phi in -PI..PI, theta in -1.5..1.5f64) {
            let d = direction_vector(phi, theta);
            let (a, b) = aoa_basis(phi, theta);
            prop_assert!(a.dot(&d).abs() < 1e-12);
            prop_assert!(b.dot(&d).abs() < 1e-12);
            prop_assert!(a.dot(&b).abs() < 1e-12);
            for v in [d, a, b] {
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

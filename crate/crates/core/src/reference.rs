//! Cramér-Rao lower bound and a Gauss-Newton maximum-likelihood estimator.
//!
//! Both are built on the analytic Jacobian of `(r, φ, θ)` with respect to the
//! source position. The Jacobian rows are the true gradients; the azimuth row
//! is `-alpha / (||u - s1|| cos θ)`. Flipping the sign of any row leaves the
//! Fisher information unchanged.

use nalgebra::{Matrix3, Vector3};

use crate::error::{LocError, Result};
use crate::estimator::PositionEstimate;
use crate::geometry::{aoa_basis, true_measurement, wrap_angle, Measurement, NoiseModel, SensorPair};
use crate::linalg::{self, DEFAULT_SINGULAR_TOLERANCE};
use crate::Position;

/// Rows are `∇r`, `∇φ`, `∇θ` with respect to `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementJacobian(pub Matrix3<f64>);

impl MeasurementJacobian {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `JᵀQ_m⁻¹J`
    pub fn fisher_information(&self, noise: &NoiseModel) -> Matrix3<f64> {
        let w = Matrix3::from_diagonal(&noise.weighting_variances().map(|v| 1.0 / v));
        linalg::symmetrize(&(self.0.transpose() * w * self.0))
    }
}

pub fn measurement_jacobian(u: &Position, sensors: &SensorPair) -> Result<MeasurementJacobian> {
    let m = true_measurement(u, sensors)?;
    let to_ground = u - sensors.ground();
    let to_uav = u - sensors.uav();
    let range = to_ground.norm();
    let cos_el = m.elevation.cos();
    let (alpha, beta) = aoa_basis(m.azimuth, m.elevation);

    let grad_r = to_uav / to_uav.norm() - to_ground / range;
    let grad_phi = -alpha / (range * cos_el);
    let grad_theta = -beta / range;
    Ok(MeasurementJacobian(Matrix3::from_rows(&[
        grad_r.transpose(),
        grad_phi.transpose(),
        grad_theta.transpose(),
    ])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrlbResult {
    pub fim: Matrix3<f64>,
    /// Position covariance bound, m².
    pub crlb: Matrix3<f64>,
    /// `sqrt(trace(crlb))`, meters.
    pub rmse_bound: f64,
}

/// `CRLB(u) = (JᵀQ_m⁻¹J)⁻¹`. Requires strictly positive noise.
pub fn crlb(u: &Position, sensors: &SensorPair, noise: &NoiseModel) -> Result<CrlbResult> {
    if !noise.is_positive_definite() {
        return Err(LocError::Config(
            "the CRLB needs strictly positive noise standard deviations".into(),
        ));
    }
    let jac = measurement_jacobian(u, sensors)?;
    let fim = jac.fisher_information(noise);
    let inv = linalg::invert(&fim, DEFAULT_SINGULAR_TOLERANCE)?;
    let crlb = linalg::symmetrize(&inv.inverse);
    Ok(CrlbResult {
        fim,
        crlb,
        rmse_bound: crlb.trace().sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlOptions {
    pub max_iterations: usize,
    /// Stop once the Gauss-Newton step is shorter than this, meters.
    pub step_tolerance: f64,
    pub initial_guess: Position,
}

impl MlOptions {
    pub fn starting_at(initial_guess: Position) -> Self {
        Self {
            max_iterations: 50,
            step_tolerance: 1e-8,
            initial_guess,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(LocError::Config("ML max_iterations must be at least 1".into()));
        }
        if !(self.step_tolerance > 0.0) || !self.step_tolerance.is_finite() {
            return Err(LocError::Config(format!(
                "ML step tolerance must be positive, got {}",
                self.step_tolerance
            )));
        }
        if !self.initial_guess.iter().all(|v| v.is_finite()) {
            return Err(LocError::Config("ML initial guess must be finite".into()));
        }
        Ok(())
    }
}

/// `m - h(u)` with the azimuth component wrapped to `(-π, π]`.
pub fn measurement_residual(m: &Measurement, u: &Position, sensors: &SensorPair) -> Result<Vector3<f64>> {
    let predicted = true_measurement(u, sensors)?;
    Ok(Vector3::new(
        m.range_diff - predicted.range_diff,
        wrap_angle(m.azimuth - predicted.azimuth),
        m.elevation - predicted.elevation,
    ))
}

/// Negative log-likelihood up to a constant: `ρᵀ Q_m⁻¹ ρ`.
pub fn weighted_cost(m: &Measurement, u: &Position, sensors: &SensorPair, noise: &NoiseModel) -> Result<f64> {
    let res = measurement_residual(m, u, sensors)?;
    Ok(res.component_div(&noise.weighting_variances()).dot(&res))
}

/// Undamped Gauss-Newton on the Gaussian log-likelihood.
///
/// Stops when the step norm drops below `opts.step_tolerance`; hitting
/// `max_iterations` first returns the last iterate with `converged = false`.
pub fn ml_locate(
    m: &Measurement,
    sensors: &SensorPair,
    noise: &NoiseModel,
    opts: &MlOptions,
) -> Result<PositionEstimate> {
    opts.validate()?;
    let inv_var = noise.weighting_variances().map(|v| 1.0 / v);
    let weight = Matrix3::from_diagonal(&inv_var);
    let mut u = opts.initial_guess;
    let mut worst_rcond = f64::INFINITY;
    let mut converged = false;
    let mut iterations_used = 0;

    for iteration in 1..=opts.max_iterations {
        iterations_used = iteration;
        let step = (|| {
            let jac = measurement_jacobian(&u, sensors)?.0;
            let res = measurement_residual(m, &u, sensors)?;
            let jtw = jac.transpose() * weight;
            let normal = linalg::symmetrize(&(jtw * jac));
            let inv = linalg::invert(&normal, DEFAULT_SINGULAR_TOLERANCE)?;
            let step = normal
                .full_piv_lu()
                .solve(&(jtw * res))
                .unwrap_or_else(|| inv.inverse * (jtw * res));
            Ok::<_, LocError>((step, inv.rcond))
        })()
        .map_err(|e| e.at_iteration(iteration))?;
        worst_rcond = worst_rcond.min(step.1);
        u += step.0;
        if !u.iter().all(|v| v.is_finite()) {
            return Err(LocError::SingularSystem {
                rcond: step.1,
                tolerance: DEFAULT_SINGULAR_TOLERANCE,
            }
            .at_iteration(iteration));
        }
        if step.0.norm() < opts.step_tolerance {
            converged = true;
            break;
        }
    }

    let final_iteration = iterations_used;
    let jac = measurement_jacobian(&u, sensors).map_err(|e| e.at_iteration(final_iteration))?;
    let covariance = if noise.is_positive_definite() {
        let fim = jac.fisher_information(noise);
        linalg::symmetrize(
            &linalg::invert(&fim, DEFAULT_SINGULAR_TOLERANCE)
                .map_err(|e| e.at_iteration(final_iteration))?
                .inverse,
        )
    } else {
        let j_inv = linalg::invert(&jac.0, DEFAULT_SINGULAR_TOLERANCE)
            .map_err(|e| e.at_iteration(final_iteration))?
            .inverse;
        linalg::symmetrize(&(j_inv * noise.covariance() * j_inv.transpose()))
    };

    Ok(PositionEstimate {
        position: u,
        covariance,
        iterations_used,
        condition_number: 1.0 / worst_rcond,
        converged,
    })
}

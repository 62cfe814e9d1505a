//! Closed-form weighted-least-squares localization.
//!
//! Squaring the range-difference equation and replacing the unknown range
//! `||u - s1||` through the bearing direction `d` gives one equation that is
//! linear in `u`; the two bearing planes (normals `alpha`, `beta`) give two
//! more. Stacked, they form the square system `h = G u`:
//!
//! ```text
//! h = [ r² + ||s1||² - ||s2||² - 2 r dᵀs1,  alphaᵀs1,  betaᵀs1 ]
//! G = [ 2 (s1 - s2 - r d)ᵀ ;  alphaᵀ ;  betaᵀ ]
//! ```
//!
//! The first solve weights with `Q_m⁻¹`; every further solve uses
//! `W = (B Q_m Bᵀ)⁻¹` with the first-order noise map `B` evaluated at the
//! previous estimate.

use nalgebra::{Matrix3, Vector3};

use crate::error::{LocError, Result};
use crate::geometry::{aoa_basis, direction_vector, Measurement, NoiseModel, SensorPair, COS_ELEVATION_GUARD};
use crate::linalg::{self, DEFAULT_SINGULAR_TOLERANCE};
use crate::Position;

/// The stacked pseudo-linear system `h = G u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoLinearSystem {
    pub h: Vector3<f64>,
    pub g: Matrix3<f64>,
}

impl PseudoLinearSystem {
    /// `ε = h - G u`.
    pub fn residual(&self, u: &Position) -> Vector3<f64> {
        self.h - self.g * u
    }
}

/// Diagonal first-order map from measurement noise to equation error,
/// `ε ≈ B Δm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedNoiseMap {
    /// `(B_r, B_φ, B_θ)`
    pub diagonal: Vector3<f64>,
}

impl LinearizedNoiseMap {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.diagonal)
    }

    /// `W = (B Q_m Bᵀ)⁻¹`, built from the weighting variances of `noise`.
    pub fn weight(&self, noise: &NoiseModel) -> Result<Matrix3<f64>> {
        let var = self
            .diagonal
            .component_mul(&self.diagonal)
            .component_mul(&noise.weighting_variances());
        if var.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(LocError::SingularSystem {
                rcond: 0.0,
                tolerance: DEFAULT_SINGULAR_TOLERANCE,
            });
        }
        Ok(Matrix3::from_diagonal(&var.map(|v| 1.0 / v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    /// Total number of weighted solves. `1` is the `Q_m⁻¹`-weighted solve
    /// only; each extra solve re-derives the weight from the latest estimate.
    pub iterations: usize,
    /// Lower bound on reciprocal condition numbers.
    pub singular_tolerance: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            iterations: 2,
            singular_tolerance: DEFAULT_SINGULAR_TOLERANCE,
        }
    }
}

impl EstimatorOptions {
    pub fn with_iterations(iterations: usize) -> Self {
        Self {
            iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(LocError::Config("estimator iterations must be at least 1".into()));
        }
        if !(self.singular_tolerance >= 0.0 && self.singular_tolerance < 1.0) {
            return Err(LocError::Config(format!(
                "singular tolerance must lie in [0, 1), got {}",
                self.singular_tolerance
            )));
        }
        Ok(())
    }
}

/// A position estimate with its covariance and solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub position: Position,
    /// Estimated covariance, m².
    pub covariance: Matrix3<f64>,
    pub iterations_used: usize,
    /// Largest 1-norm condition number of the normal matrix seen while solving.
    pub condition_number: f64,
    /// Always true for the closed-form estimator; iterative solvers clear it
    /// when they stop on the iteration cap.
    pub converged: bool,
}

/// Builds `h` and `G` from a (possibly noisy) measurement.
pub fn build_system(
    m: &Measurement,
    sensors: &SensorPair,
    singular_tolerance: f64,
) -> Result<PseudoLinearSystem> {
    m.validate()?;
    let s1 = sensors.ground();
    let s2 = sensors.uav();
    let r = m.range_diff;
    let d = direction_vector(m.azimuth, m.elevation);
    let (alpha, beta) = aoa_basis(m.azimuth, m.elevation);

    let h = Vector3::new(
        r * r + s1.norm_squared() - s2.norm_squared() - 2.0 * r * d.dot(s1),
        alpha.dot(s1),
        beta.dot(s1),
    );
    let g_r = 2.0 * (s1 - s2 - r * d);
    let g = Matrix3::from_rows(&[g_r.transpose(), alpha.transpose(), beta.transpose()]);

    let rcond = linalg::reciprocal_condition(&g);
    if !(rcond >= singular_tolerance) {
        return Err(LocError::DegenerateGeometry(format!(
            "pseudo-linear matrix is rank deficient (reciprocal condition {rcond:e})"
        )));
    }
    Ok(PseudoLinearSystem { h, g })
}

/// First-order noise map at the current estimate:
/// `B_r = 2 (r - s1ᵀd + dᵀu)`, `B_φ = ||u - s1|| cos θ`, `B_θ = ||u - s1||`.
///
/// At noise-free values `B_r = 2 ||u - s2||`.
pub fn b_matrix(m: &Measurement, sensors: &SensorPair, current: &Position) -> Result<LinearizedNoiseMap> {
    if !current.iter().all(|v| v.is_finite()) {
        return Err(LocError::Config("current estimate must be finite".into()));
    }
    let cos_el = m.elevation.cos();
    if cos_el < COS_ELEVATION_GUARD {
        return Err(LocError::NearSingularElevation(format!(
            "cos(elevation) = {cos_el:e} leaves B_phi degenerate"
        )));
    }
    let s1 = sensors.ground();
    let d = direction_vector(m.azimuth, m.elevation);
    let range = (current - s1).norm();
    Ok(LinearizedNoiseMap {
        diagonal: Vector3::new(
            2.0 * (m.range_diff - s1.dot(&d) + d.dot(current)),
            range * cos_el,
            range,
        ),
    })
}

/// Result of a single weighted solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlsSolution {
    pub position: Position,
    /// Reciprocal condition number of `GᵀWG`.
    pub rcond: f64,
}

/// Minimizes `(h - G u)ᵀ W (h - G u)` through the normal equations
/// `GᵀWG u = GᵀWh`, followed by one step of iterative refinement on the
/// unsquared residual.
pub fn wls_solve(
    sys: &PseudoLinearSystem,
    weight: &Matrix3<f64>,
    singular_tolerance: f64,
) -> Result<WlsSolution> {
    let gtw = sys.g.transpose() * weight;
    let normal = linalg::symmetrize(&(gtw * sys.g));
    let inv = linalg::invert(&normal, singular_tolerance)?;
    let lu = normal.full_piv_lu();
    let solve = |rhs: &Vector3<f64>| lu.solve(rhs).unwrap_or_else(|| inv.inverse * rhs);

    let first = solve(&(gtw * sys.h));
    let correction = solve(&(gtw * sys.residual(&first)));
    let position = first + correction;
    if !position.iter().all(|v| v.is_finite()) {
        return Err(LocError::SingularSystem {
            rcond: inv.rcond,
            tolerance: singular_tolerance,
        });
    }
    Ok(WlsSolution {
        position,
        rcond: inv.rcond,
    })
}

/// `(GᵀWG)⁻¹`, symmetrized.
pub fn estimate_covariance(
    sys: &PseudoLinearSystem,
    weight: &Matrix3<f64>,
    singular_tolerance: f64,
) -> Result<Matrix3<f64>> {
    let normal = sys.g.transpose() * weight * sys.g;
    let inv = linalg::invert(&normal, singular_tolerance)?;
    Ok(linalg::symmetrize(&inv.inverse))
}

/// `G⁻¹ C G⁻ᵀ` for an equation-error covariance `C`. Equals
/// `(GᵀC⁻¹G)⁻¹` when `C` is invertible and stays defined when it is not.
fn propagated_covariance(
    sys: &PseudoLinearSystem,
    error_cov: &Matrix3<f64>,
    singular_tolerance: f64,
) -> Result<Matrix3<f64>> {
    let g_inv = linalg::invert(&sys.g, singular_tolerance)?.inverse;
    Ok(linalg::symmetrize(&(g_inv * error_cov * g_inv.transpose())))
}

/// Full closed-form pipeline: `Q_m⁻¹`-weighted solve, then
/// `opts.iterations - 1` re-weighted solves.
pub fn locate(
    m: &Measurement,
    sensors: &SensorPair,
    noise: &NoiseModel,
    opts: &EstimatorOptions,
) -> Result<PositionEstimate> {
    opts.validate()?;
    let tol = opts.singular_tolerance;
    let sys = build_system(m, sensors, tol).map_err(|e| e.at_iteration(1))?;

    let mut weight = Matrix3::from_diagonal(&noise.weighting_variances().map(|v| 1.0 / v));
    let mut error_cov = noise.covariance();
    let first = wls_solve(&sys, &weight, tol).map_err(|e| e.at_iteration(1))?;
    let mut position = first.position;
    let mut worst_rcond = first.rcond;

    for iteration in 2..=opts.iterations {
        let step = (|| {
            let b = b_matrix(m, sensors, &position)?;
            let w = b.weight(noise)?;
            let sol = wls_solve(&sys, &w, tol)?;
            let bm = b.matrix();
            Ok::<_, LocError>((sol, w, bm * noise.covariance() * bm.transpose()))
        })()
        .map_err(|e| e.at_iteration(iteration))?;
        position = step.0.position;
        worst_rcond = worst_rcond.min(step.0.rcond);
        weight = step.1;
        error_cov = step.2;
    }

    let covariance = if noise.is_positive_definite() {
        estimate_covariance(&sys, &weight, tol)
    } else {
        propagated_covariance(&sys, &error_cov, tol)
    }
    .map_err(|e| e.at_iteration(opts.iterations))?;

    Ok(PositionEstimate {
        position,
        covariance,
        iterations_used: opts.iterations,
        condition_number: 1.0 / worst_rcond,
        converged: true,
    })
}

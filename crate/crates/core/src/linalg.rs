//! 3×3 dense helpers: full-pivot solves with a reciprocal-condition guard.

use nalgebra::{Matrix3, Vector3};

use crate::error::{LocError, Result};

/// Default lower bound on the reciprocal condition number before a system
/// is declared singular.
pub const DEFAULT_SINGULAR_TOLERANCE: f64 = 1e-12;

/// Maximum absolute column sum.
pub fn norm_one(a: &Matrix3<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// An inverted 3×3 matrix together with its 1-norm reciprocal condition
/// number `1 / (||A||_1 ||A^-1||_1)`.
#[derive(Debug, Clone, Copy)]
pub struct Inverted {
    pub inverse: Matrix3<f64>,
    pub rcond: f64,
}

impl Inverted {
    pub fn condition_number(&self) -> f64 {
        1.0 / self.rcond
    }
}

/// Inverts `a` with full-pivot LU and rejects it when the reciprocal
/// condition number falls below `tolerance`.
pub fn invert(a: &Matrix3<f64>, tolerance: f64) -> Result<Inverted> {
    if !a.iter().all(|v| v.is_finite()) {
        return Err(LocError::SingularSystem {
            rcond: 0.0,
            tolerance,
        });
    }
    let anorm = norm_one(a);
    let inverse = a.full_piv_lu().try_inverse().ok_or(LocError::SingularSystem {
        rcond: 0.0,
        tolerance,
    })?;
    let inv_norm = norm_one(&inverse);
    let rcond = if anorm == 0.0 || !inv_norm.is_finite() {
        0.0
    } else {
        1.0 / (anorm * inv_norm)
    };
    if !(rcond >= tolerance) {
        return Err(LocError::SingularSystem { rcond, tolerance });
    }
    Ok(Inverted { inverse, rcond })
}

/// Reciprocal condition number of `a`, zero when `a` is exactly singular.
pub fn reciprocal_condition(a: &Matrix3<f64>) -> f64 {
    match invert(a, 0.0) {
        Ok(inv) => inv.rcond,
        Err(_) => 0.0,
    }
}

/// `(A + Aᵀ) / 2`
pub fn symmetrize(a: &Matrix3<f64>) -> Matrix3<f64> {
    (a + a.transpose()) * 0.5
}

pub fn diag(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::from_diagonal(v)
}

//! Small dense symmetric positive-definite helpers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Squared ratio of the smallest to largest Cholesky pivot below which a
/// matrix is treated as numerically singular.
const MIN_PIVOT_RATIO: f64 = 1e-14;

/// Cholesky factor of a symmetric positive-definite matrix, rejecting
/// matrices that are singular to working precision.
pub fn spd_cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let chol = m.clone().cholesky()?;
    let diag = chol.l_dirty().diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    if max == 0.0 || (min / max).powi(2) < MIN_PIVOT_RATIO {
        return None;
    }
    Some(chol)
}

pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = spd_cholesky(m).ok_or(Error::SingularInformation)?.inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

pub fn spd_solve(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(spd_cholesky(m).ok_or(Error::SingularInformation)?.solve(b))
}

/// Ordinary least squares through the normal equations.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    spd_solve(&x.tr_mul(x), &x.tr_mul(y))
}

use nalgebra::{DMatrix, DVector};

use super::density::PosteriorSpec;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::linalg::spd_inverse;

/// Normal approximation `N(β̂, I(β̂)^{-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceApprox {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl LaplaceApprox {
    pub fn sd(&self) -> DVector<f64> {
        self.covariance.diagonal().map(f64::sqrt)
    }
}

/// Plug-in normal approximation to the quasi-posterior of `β`, with the
/// expected information evaluated at `β̂` and dispersion `spec.psi`.
pub fn laplace_approx(spec: &PosteriorSpec, data: &Dataset, fit: &FitResult) -> Result<LaplaceApprox> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    if spec.hierarchical.is_some() {
        return Err(Error::InvalidArgument(
            "normal approximation covers fixed-effect models only".into(),
        ));
    }
    let info = spec.model.expected_information(data, &fit.beta_hat, spec.psi)?;
    Ok(LaplaceApprox {
        mean: fit.beta_hat.clone(),
        covariance: spd_inverse(&info)?,
    })
}

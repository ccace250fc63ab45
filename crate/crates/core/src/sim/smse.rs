use nalgebra::DVector;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{check_psi, QuasiModel};

/// In-sample standardised mean squared error of Pearson residuals,
/// `n^{-1} Σ (y_i - μ̂_i)^2 / (ψ̂ V(μ̂_i))`.
pub fn smse_pearson(model: &QuasiModel, data: &Dataset, mu_hat: &DVector<f64>, psi_hat: f64) -> Result<f64> {
    check_psi(psi_hat)?;
    if mu_hat.len() != data.n() {
        return Err(Error::InvalidArgument("mu_hat length differs from n".into()));
    }
    let v = model.variance();
    let mut total = 0.0;
    for (i, (&y, &m)) in data.y().iter().zip(mu_hat.iter()).enumerate() {
        if !v.in_domain(m) {
            return Err(Error::Domain { index: i, mu: m });
        }
        total += (y - m).powi(2) / v.eval(m);
    }
    Ok(total / (psi_hat * data.n() as f64))
}

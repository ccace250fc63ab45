use nalgebra::{DMatrix, DVector};

use super::fit::{fit_mql, ScoringConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::spd_inverse;
use crate::model::QuasiModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionEstimate {
    pub psi: f64,
    /// All residuals are exactly zero; `psi` is 0.
    pub perfect_fit: bool,
}

/// Method of moments: `(n - p)^{-1} Σ (y_i - μ̂_i)^2 / V(μ̂_i)`.
pub fn estimate_dispersion_mom(
    model: &QuasiModel,
    data: &Dataset,
    beta_hat: &DVector<f64>,
) -> Result<DispersionEstimate> {
    let (n, p) = (data.n(), data.p());
    if n <= p {
        return Err(Error::DegreesOfFreedom { n, p });
    }
    let mu = model.mean_vector(data.x(), beta_hat)?;
    let pearson = pearson_sum(model, data.y(), &mu);
    Ok(DispersionEstimate {
        psi: pearson / (n - p) as f64,
        perfect_fit: pearson == 0.0,
    })
}

pub(crate) fn pearson_sum(model: &QuasiModel, y: &DVector<f64>, mu: &DVector<f64>) -> f64 {
    let v = model.variance();
    y.iter()
        .zip(mu.iter())
        .map(|(&yi, &mi)| (yi - mi).powi(2) / v.eval(mi))
        .sum()
}

/// Information-matching loss-scale estimator
/// `tr{j_n} / tr{j_n h_n^{-1} j_n}` built from per-observation gradients and
/// Hessians of the unit-dispersion loss `-∫_a^{μ_i} (y_i - t)/V(t) dt`.
///
/// `h_n` is the uncentred outer product of the loss gradients at `beta_hat`.
pub fn estimate_dispersion_llb(
    model: &QuasiModel,
    data: &Dataset,
    beta_hat: &DVector<f64>,
) -> Result<f64> {
    let p = data.p();
    let n = data.n() as f64;
    let eta = data.x() * beta_hat;
    let mut j = DMatrix::<f64>::zeros(p, p);
    let mut h = DMatrix::<f64>::zeros(p, p);
    for (i, row) in data.x().row_iter().enumerate() {
        let d = model.eta_derivs(data.y()[i], eta[i])?;
        let xi = row.transpose();
        let outer = &xi * xi.transpose();
        // loss = -contribution
        j += &outer * (-d.hess);
        h += &outer * (d.grad * d.grad);
    }
    j /= n;
    h /= n;
    let h_inv = spd_inverse(&h).map_err(|_| Error::SingularMoments)?;
    let denom = (&j * h_inv * &j).trace();
    let value = j.trace() / denom;
    if !value.is_finite() {
        return Err(Error::SingularMoments);
    }
    Ok(value)
}

/// Method-of-moments dispersion for a random-intercept model, computed from
/// a fit that treats each group intercept as a fixed effect.
pub fn estimate_dispersion_grouped(model: &QuasiModel, data: &Dataset) -> Result<DispersionEstimate> {
    let g = fit_group_effects(model, data)?;
    Ok(DispersionEstimate {
        psi: g.fit.psi_hat,
        perfect_fit: g.fit.perfect_fit,
    })
}

/// Fixed-effects fit with one indicator per group.
pub(crate) struct GroupFit {
    pub fit: super::FitResult,
    /// Coefficients on the original covariates.
    pub beta: DVector<f64>,
    /// Group effects centred to mean zero; the mean is folded into the
    /// constant column when there is one.
    pub effects: Vec<f64>,
}

/// If `X` already has a constant column the first group indicator is dropped.
pub(crate) fn fit_group_effects(model: &QuasiModel, data: &Dataset) -> Result<GroupFit> {
    let groups = data
        .groups()
        .ok_or_else(|| Error::InvalidArgument("dataset has no groups".into()))?;
    let x = data.x();
    let p = data.p();
    let constant = x
        .column_iter()
        .position(|c| c.iter().all(|&v| v == c[0]) && c[0] != 0.0);
    let skip = usize::from(constant.is_some());
    let extra = groups.count() - skip;
    let mut aug = DMatrix::zeros(data.n(), p + extra);
    aug.columns_mut(0, p).copy_from(x);
    for (i, &g) in groups.index().iter().enumerate() {
        if g >= skip {
            aug[(i, p + g - skip)] = 1.0;
        }
    }
    let augmented = Dataset::new(data.y().clone(), aug)?;
    let fit = fit_mql(model, &augmented, &ScoringConfig::default())?;
    let mut beta = fit.beta_hat.rows(0, p).into_owned();
    let mut effects: Vec<f64> = (0..groups.count())
        .map(|g| if g < skip { 0.0 } else { fit.beta_hat[p + g - skip] })
        .collect();
    if let Some(c) = constant {
        let mean = effects.iter().sum::<f64>() / effects.len() as f64;
        effects.iter_mut().for_each(|e| *e -= mean);
        beta[c] += mean / x[(0, c)];
    }
    Ok(GroupFit { fit, beta, effects })
}

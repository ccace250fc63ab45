use nalgebra::{DMatrix, DVector};

use super::dispersion::estimate_dispersion_mom;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::link::LinkFunction;
use crate::linalg::{least_squares, spd_solve};
use crate::model::QuasiModel;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Zeros,
    /// Least squares of `g(y)` on `X`, with `y` pulled into the interior of
    /// the mean domain first.
    LinkOfMean,
    User(DVector<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringConfig {
    pub max_iter: usize,
    /// Threshold on the sup-norm of the unit-dispersion quasi-score.
    pub score_tol: f64,
    pub step_halvings: usize,
    pub init: Init,
    /// Working dispersion. The root of the score does not depend on it.
    pub psi: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            score_tol: 1e-8,
            step_halvings: 30,
            init: Init::LinkOfMean,
            psi: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta_hat: DVector<f64>,
    pub mu_hat: DVector<f64>,
    /// Method-of-moments dispersion.
    pub psi_hat: f64,
    /// Set when every residual is exactly zero and `psi_hat` is 0.
    pub perfect_fit: bool,
    /// Expected information at `beta_hat` with unit dispersion; divide by a
    /// dispersion value to get `I(β̂)` on that scale.
    pub unit_information: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub score_norm: f64,
    pub clamp_events: usize,
    /// Unit-dispersion quasi-log-likelihood at `beta_hat`.
    pub loglik: f64,
}

impl FitResult {
    /// `I(β̂)` at dispersion `psi`.
    pub fn information(&self, psi: f64) -> DMatrix<f64> {
        &self.unit_information / psi
    }
}

/// Maximum quasi-likelihood by Fisher scoring with step halving.
///
/// Each iteration solves `I(β) δ = U(β)` and accepts `β + t δ` for the
/// largest `t = 2^{-k}`, `k ≤ step_halvings`, that does not decrease the
/// quasi-log-likelihood.
pub fn fit_mql(model: &QuasiModel, data: &Dataset, config: &ScoringConfig) -> Result<FitResult> {
    if config.max_iter == 0 || !(config.score_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "scoring needs max_iter ≥ 1 and score_tol > 0".into(),
        ));
    }
    if !(config.psi > 0.0 && config.psi.is_finite()) {
        return Err(Error::InvalidArgument("working dispersion must be positive".into()));
    }
    model.validate(data)?;
    let psi = config.psi;

    let mut beta = initial_beta(model, data, &config.init)?;
    let mut ll = match model.quasi_loglik(data, &beta, psi) {
        Ok(v) => v,
        Err(_) if config.init != Init::Zeros => {
            beta = DVector::zeros(data.p());
            model.quasi_loglik(data, &beta, psi)?
        }
        Err(e) => return Err(e),
    };

    let mut score_norm = f64::INFINITY;
    for iteration in 0..=config.max_iter {
        let score = model.quasi_score(data, &beta, psi)?;
        score_norm = score.amax() * psi;
        if score_norm < config.score_tol {
            return finish(model, data, beta, iteration, score_norm);
        }
        if iteration == config.max_iter {
            break;
        }
        let info = model.expected_information(data, &beta, psi)?;
        let step = spd_solve(&info, &score)?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=config.step_halvings {
            let candidate = &beta + &step * t;
            if let Ok(v) = model.quasi_loglik(data, &candidate, psi) {
                // rounding allowance near the optimum
                if v >= ll - 1e-13 * (1.0 + ll.abs()) {
                    accepted = Some((candidate, v));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((b, v)) => {
                beta = b;
                ll = v;
            }
            None => {
                return Err(Error::Diverged {
                    iterations: iteration + 1,
                    score_norm,
                    last_iterate: beta.iter().copied().collect(),
                })
            }
        }
    }
    Err(Error::Diverged {
        iterations: config.max_iter,
        score_norm,
        last_iterate: beta.iter().copied().collect(),
    })
}

fn finish(
    model: &QuasiModel,
    data: &Dataset,
    beta: DVector<f64>,
    iterations: usize,
    score_norm: f64,
) -> Result<FitResult> {
    let means = model.means(data.x(), &beta)?;
    let unit_information = model.expected_information(data, &beta, 1.0)?;
    let dispersion = estimate_dispersion_mom(model, data, &beta)?;
    let loglik = model.quasi_loglik(data, &beta, 1.0)?;
    Ok(FitResult {
        beta_hat: beta,
        mu_hat: means.mu,
        psi_hat: dispersion.psi,
        perfect_fit: dispersion.perfect_fit,
        unit_information,
        iterations,
        converged: true,
        score_norm,
        clamp_events: means.clamp_events,
        loglik,
    })
}

fn initial_beta(model: &QuasiModel, data: &Dataset, init: &Init) -> Result<DVector<f64>> {
    match init {
        Init::Zeros => Ok(DVector::zeros(data.p())),
        Init::User(b) => {
            if b.len() != data.p() {
                return Err(Error::InvalidArgument("initial beta has wrong length".into()));
            }
            Ok(b.clone())
        }
        Init::LinkOfMean => {
            let y = data.y();
            let link = model.link();
            let z = match link {
                LinkFunction::Identity => y.clone(),
                LinkFunction::Log => {
                    let mean = y.mean();
                    let floor = if mean > 0.0 { 0.1 * mean } else { 0.1 };
                    y.map(|v| v.max(floor).ln())
                }
                LinkFunction::Logit => y.map(|v| link.link((v + 0.5) / 2.0)),
            };
            least_squares(data.x(), &z)
        }
    }
}

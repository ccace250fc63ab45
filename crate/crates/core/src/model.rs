//! Second-order model: a link paired with a variance function.
//!
//! Everything here is a pure function of the model, the data and the
//! coefficient vector. Evaluation goes through the linear predictor so the
//! same routines serve models with per-observation offsets (random
//! intercepts).

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::link::LinkFunction;
use crate::linalg::spd_cholesky;
use crate::variance::VarianceFunction;

#[derive(Debug, Clone)]
pub struct QuasiModel {
    link: LinkFunction,
    variance: VarianceFunction,
}

/// Means together with the number of clamped linear predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct Means {
    pub mu: DVector<f64>,
    pub clamp_events: usize,
}

/// Unit-dispersion contribution of one observation and its first two
/// derivatives with respect to the linear predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaDerivs {
    pub value: f64,
    pub grad: f64,
    pub hess: f64,
}

impl QuasiModel {
    /// The range of the inverse link must coincide with the variance domain.
    pub fn new(link: LinkFunction, variance: VarianceFunction) -> Result<Self> {
        if link.range() != variance.domain() {
            return Err(Error::InvalidArgument(format!(
                "link '{link}' maps onto {:?} but variance '{variance}' is defined on {:?}",
                link.range(),
                variance.domain()
            )));
        }
        Ok(Self { link, variance })
    }

    pub fn link(&self) -> LinkFunction {
        self.link
    }

    pub fn variance(&self) -> &VarianceFunction {
        &self.variance
    }

    /// Checks every response against the family restrictions.
    pub fn validate(&self, data: &Dataset) -> Result<()> {
        for (i, &y) in data.y().iter().enumerate() {
            self.variance
                .check_response(y)
                .map_err(|message| Error::Restriction { index: i, message })?;
        }
        Ok(())
    }

    fn check_beta(&self, data: &Dataset, beta: &DVector<f64>) -> Result<()> {
        if beta.len() != data.p() {
            return Err(Error::InvalidArgument(format!(
                "beta has {} entries but the design has {} columns",
                beta.len(),
                data.p()
            )));
        }
        Ok(())
    }

    pub fn mean_vector(&self, x: &DMatrix<f64>, beta: &DVector<f64>) -> Result<DVector<f64>> {
        self.means(x, beta).map(|m| m.mu)
    }

    pub fn means(&self, x: &DMatrix<f64>, beta: &DVector<f64>) -> Result<Means> {
        if beta.len() != x.ncols() {
            return Err(Error::InvalidArgument("beta length differs from p".into()));
        }
        self.means_from_eta(&(x * beta))
    }

    pub fn means_from_eta(&self, eta: &DVector<f64>) -> Result<Means> {
        let mut clamp_events = 0;
        let mut mu = DVector::zeros(eta.len());
        for (i, &e) in eta.iter().enumerate() {
            let (m, clamped) = self.link.inverse_clamped(e);
            if !self.variance.in_domain(m) {
                return Err(Error::Domain { index: i, mu: m });
            }
            clamp_events += clamped as usize;
            mu[i] = m;
        }
        Ok(Means { mu, clamp_events })
    }

    /// Unit-dispersion contribution at a linear predictor value.
    pub fn unit_contribution(&self, y: f64, eta: f64) -> Result<f64> {
        let mu = self.link.inverse(eta);
        if !self.variance.in_domain(mu) {
            return Err(Error::Domain { index: 0, mu });
        }
        self.variance.unit_quasi_loglik(y, mu)
    }

    /// Contribution with first and second derivatives in `eta`.
    pub fn eta_derivs(&self, y: f64, eta: f64) -> Result<EtaDerivs> {
        let d = self.link.mean_derivs(eta);
        if !self.variance.in_domain(d.mu) {
            return Err(Error::Domain { index: 0, mu: d.mu });
        }
        let v = self.variance.eval(d.mu);
        let vp = self.variance.derivative(d.mu);
        let r = y - d.mu;
        let value = self.variance.unit_quasi_loglik(y, d.mu)?;
        let grad = r * d.dmu / v;
        // d/deta [ (y - mu) mu' / V(mu) ]
        let hess = -d.dmu * d.dmu / v + r * (d.d2mu / v - d.dmu * d.dmu * vp / (v * v));
        Ok(EtaDerivs { value, grad, hess })
    }

    /// `ψ^{-1} Σ ∫_a^{μ_i} (y_i - t) / V(t) dt` at an arbitrary linear predictor.
    pub fn quasi_loglik_eta(&self, y: &DVector<f64>, eta: &DVector<f64>, psi: f64) -> Result<f64> {
        check_psi(psi)?;
        let mut total = 0.0;
        for (i, (&yi, &e)) in y.iter().zip(eta.iter()).enumerate() {
            let c = self
                .unit_contribution(yi, e)
                .map_err(|err| with_index(err, i))?;
            if !c.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            total += c;
        }
        Ok(total / psi)
    }

    pub fn quasi_loglik(&self, data: &Dataset, beta: &DVector<f64>, psi: f64) -> Result<f64> {
        self.check_beta(data, beta)?;
        self.quasi_loglik_eta(data.y(), &(data.x() * beta), psi)
    }

    /// Per-observation `(y_i - μ_i) / V(μ_i) · dμ_i/dη_i`, unit dispersion.
    pub fn working_residuals(&self, y: &DVector<f64>, eta: &DVector<f64>) -> Result<DVector<f64>> {
        let mut w = DVector::zeros(y.len());
        for (i, (&yi, &e)) in y.iter().zip(eta.iter()).enumerate() {
            let d = self.link.mean_derivs(e);
            if !self.variance.in_domain(d.mu) {
                return Err(Error::Domain { index: i, mu: d.mu });
            }
            let g = (yi - d.mu) * d.dmu / self.variance.eval(d.mu);
            if !g.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            w[i] = g;
        }
        Ok(w)
    }

    pub fn quasi_score(&self, data: &Dataset, beta: &DVector<f64>, psi: f64) -> Result<DVector<f64>> {
        check_psi(psi)?;
        self.check_beta(data, beta)?;
        let w = self.working_residuals(data.y(), &(data.x() * beta))?;
        Ok(data.x().tr_mul(&w) / psi)
    }

    /// Diagonal weights `d_i = [V(μ_i) g'(μ_i)^2]^{-1} = (dμ/dη)^2 / V(μ)`.
    pub fn information_weights(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        let mut d = DVector::zeros(eta.len());
        for (i, &e) in eta.iter().enumerate() {
            let m = self.link.mean_derivs(e);
            if !self.variance.in_domain(m.mu) {
                return Err(Error::Domain { index: i, mu: m.mu });
            }
            d[i] = m.dmu * m.dmu / self.variance.eval(m.mu);
        }
        Ok(d)
    }

    /// `I(β) = ψ^{-1} Xᵀ D X`; fails unless the result is positive definite.
    pub fn expected_information(
        &self,
        data: &Dataset,
        beta: &DVector<f64>,
        psi: f64,
    ) -> Result<DMatrix<f64>> {
        check_psi(psi)?;
        self.check_beta(data, beta)?;
        let d = self.information_weights(&(data.x() * beta))?;
        let info = weighted_gram(data.x(), &d) / psi;
        if spd_cholesky(&info).is_none() {
            return Err(Error::SingularInformation);
        }
        Ok(info)
    }
}

/// Quadrature route for a single observation, independent of any closed form.
pub fn quasi_loglik_quadrature(variance: &VarianceFunction, y: f64, mu: f64, psi: f64) -> Result<f64> {
    check_psi(psi)?;
    Ok(variance.quadrature(y, mu)? / psi)
}

/// `Xᵀ diag(w) X`.
pub fn weighted_gram(x: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut xw = x.clone();
    for (mut row, &wi) in xw.row_iter_mut().zip(w.iter()) {
        row *= wi;
    }
    let g = x.tr_mul(&xw);
    // symmetrise against rounding
    (&g + g.transpose()) * 0.5
}

pub(crate) fn check_psi(psi: f64) -> Result<()> {
    if psi > 0.0 && psi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("dispersion must be positive, got {psi}")))
    }
}

fn with_index(err: Error, index: usize) -> Error {
    match err {
        Error::Domain { mu, .. } => Error::Domain { index, mu },
        Error::NonFinite { .. } => Error::NonFinite { index },
        other => other,
    }
}

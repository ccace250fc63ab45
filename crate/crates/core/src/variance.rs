//! Variance functions and their quasi-log-likelihood contributions.
//!
//! For the eight families with an antiderivative of `(y - t) / V(t)` in
//! closed form the contribution is evaluated directly. Other families go
//! through adaptive quadrature from the baseline `a` to `mu`. Closed forms
//! drop every term that does not depend on `mu`, so values are comparable
//! only within one family.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_ABS_TOL, DEFAULT_MAX_DEPTH};

/// Black-box positive variance function on an open interval.
#[derive(Clone)]
pub struct CustomVariance {
    pub name: String,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub domain: (f64, f64),
    pub baseline: f64,
}

impl CustomVariance {
    pub fn new<F>(name: impl Into<String>, domain: (f64, f64), baseline: f64, func: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = domain;
        if !(lo < hi) || !(baseline > lo && baseline < hi) {
            return Err(Error::InvalidArgument(
                "custom variance needs lo < baseline < hi".into(),
            ));
        }
        let v = func(baseline);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(
                "custom variance must be positive at the baseline".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            func: Arc::new(func),
            domain,
            baseline,
        })
    }

    #[inline]
    pub fn eval(&self, mu: f64) -> f64 {
        (self.func)(mu)
    }
}

impl fmt::Debug for CustomVariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomVariance")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("baseline", &self.baseline)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum VarianceFunction {
    /// `V(mu) = 1`
    Constant,
    /// `V(mu) = mu`
    Mu,
    /// `V(mu) = mu^2`
    MuSq,
    /// `V(mu) = mu^p`, `p > 2`
    MuPow(f64),
    /// `V(mu) = e^mu`
    ExpMu,
    /// `V(mu) = mu (1 - mu)`
    Binom,
    /// `V(mu) = mu^2 (1 - mu)^2`
    BinomSq,
    /// `V(mu) = mu^q (1 - mu)^q`, `q > 0`
    BinomPow(f64),
    /// `V(mu) = mu + mu^2 / k`, `k > 0`
    NegBin(f64),
    Custom(CustomVariance),
}

impl VarianceFunction {
    pub fn mu_pow(p: f64) -> Result<Self> {
        if !(p > 2.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu_pow needs p > 2, got {p}")));
        }
        Ok(VarianceFunction::MuPow(p))
    }

    pub fn binom_pow(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!("binom_pow needs q > 0, got {q}")));
        }
        Ok(VarianceFunction::BinomPow(q))
    }

    pub fn neg_bin(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("nb needs k > 0, got {k}")));
        }
        Ok(VarianceFunction::NegBin(k))
    }

    /// Builds a family from its name and optional parameter.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |what: &str| {
            param.ok_or_else(|| {
                Error::InvalidArgument(format!("variance '{name}' needs parameter {what}"))
            })
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "constant" | "1" => Ok(VarianceFunction::Constant),
            "mu" => Ok(VarianceFunction::Mu),
            "mu_sq" | "mu2" => Ok(VarianceFunction::MuSq),
            "mu_pow" => Self::mu_pow(need("p")?),
            "exp_mu" => Ok(VarianceFunction::ExpMu),
            "binom" => Ok(VarianceFunction::Binom),
            "binom_sq" => Ok(VarianceFunction::BinomSq),
            "binom_pow" => Self::binom_pow(need("q")?),
            "nb" => Self::neg_bin(need("k")?),
            other => Err(Error::InvalidArgument(format!("unknown variance '{other}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            VarianceFunction::Constant => "constant".into(),
            VarianceFunction::Mu => "mu".into(),
            VarianceFunction::MuSq => "mu_sq".into(),
            VarianceFunction::MuPow(p) => format!("mu_pow({p})"),
            VarianceFunction::ExpMu => "exp_mu".into(),
            VarianceFunction::Binom => "binom".into(),
            VarianceFunction::BinomSq => "binom_sq".into(),
            VarianceFunction::BinomPow(q) => format!("binom_pow({q})"),
            VarianceFunction::NegBin(k) => format!("nb({k})"),
            VarianceFunction::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Open interval `M` of admissible means.
    pub fn domain(&self) -> (f64, f64) {
        use VarianceFunction::*;
        match self {
            Constant | ExpMu => (f64::NEG_INFINITY, f64::INFINITY),
            Mu | MuSq | MuPow(_) | NegBin(_) => (0.0, f64::INFINITY),
            Binom | BinomSq | BinomPow(_) => (0.0, 1.0),
            Custom(c) => c.domain,
        }
    }

    /// Baseline `a` used by the quadrature path.
    pub fn baseline(&self) -> f64 {
        use VarianceFunction::*;
        match self {
            Constant | ExpMu => 0.0,
            Mu | MuSq | MuPow(_) | NegBin(_) => 1.0,
            Binom | BinomSq | BinomPow(_) => 0.5,
            Custom(c) => c.baseline,
        }
    }

    pub fn in_domain(&self, mu: f64) -> bool {
        let (lo, hi) = self.domain();
        mu > lo && mu < hi
    }

    #[inline]
    pub fn eval(&self, mu: f64) -> f64 {
        use VarianceFunction::*;
        match self {
            Constant => 1.0,
            Mu => mu,
            MuSq => mu * mu,
            MuPow(p) => mu.powf(*p),
            ExpMu => mu.exp(),
            Binom => mu * (1.0 - mu),
            BinomSq => {
                let v = mu * (1.0 - mu);
                v * v
            }
            BinomPow(q) => (mu * (1.0 - mu)).powf(*q),
            NegBin(k) => mu + mu * mu / k,
            Custom(c) => c.eval(mu),
        }
    }

    /// `V'(mu)`; custom families use a central difference.
    pub fn derivative(&self, mu: f64) -> f64 {
        use VarianceFunction::*;
        match self {
            Constant => 0.0,
            Mu => 1.0,
            MuSq => 2.0 * mu,
            MuPow(p) => p * mu.powf(p - 1.0),
            ExpMu => mu.exp(),
            Binom => 1.0 - 2.0 * mu,
            BinomSq => 2.0 * mu * (1.0 - mu) * (1.0 - 2.0 * mu),
            BinomPow(q) => q * (mu * (1.0 - mu)).powf(q - 1.0) * (1.0 - 2.0 * mu),
            NegBin(k) => 1.0 + 2.0 * mu / k,
            Custom(c) => {
                let (lo, hi) = c.domain;
                let mut h = 1e-6 * mu.abs().max(1e-3);
                while mu - h <= lo || mu + h >= hi {
                    h *= 0.5;
                }
                (c.eval(mu + h) - c.eval(mu - h)) / (2.0 * h)
            }
        }
    }

    /// Checks the response restriction of the family for a single `y`.
    pub fn check_response(&self, y: f64) -> std::result::Result<(), String> {
        use VarianceFunction::*;
        if !y.is_finite() {
            return Err("y must be finite".into());
        }
        match self {
            Mu | MuSq | MuPow(_) | NegBin(_) if y < 0.0 => Err("y ≥ 0 required".into()),
            Binom | BinomSq | BinomPow(_) if !(0.0..=1.0).contains(&y) => {
                Err("y ∈ [0, 1] required".into())
            }
            Custom(c) if y < c.domain.0 || y > c.domain.1 => {
                Err(format!("y ∈ [{}, {}] required", c.domain.0, c.domain.1))
            }
            _ => Ok(()),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, VarianceFunction::BinomPow(_) | VarianceFunction::Custom(_))
    }

    /// Unit-dispersion contribution `∫_a^mu (y - t) / V(t) dt`, closed form
    /// where available and quadrature otherwise.
    pub fn unit_quasi_loglik(&self, y: f64, mu: f64) -> Result<f64> {
        match self.closed_form(y, mu) {
            Some(v) => Ok(v),
            None => self.quadrature(y, mu),
        }
    }

    /// Closed-form antiderivative, or `None` for quadrature-only families.
    pub fn closed_form(&self, y: f64, mu: f64) -> Option<f64> {
        use VarianceFunction::*;
        let v = match self {
            Constant => y * mu - 0.5 * mu * mu,
            Mu => xlogy(y, mu) - mu,
            MuSq => -y / mu - mu.ln(),
            MuPow(p) => y * mu.powf(1.0 - p) / (1.0 - p) - mu.powf(2.0 - p) / (2.0 - p),
            ExpMu => (mu - y + 1.0) * (-mu).exp(),
            Binom => xlogy(y, mu) + xlogy(1.0 - y, 1.0 - mu),
            BinomSq => {
                let s = 2.0 * y - 1.0;
                s * (mu / (1.0 - mu)).ln() + s / (1.0 - mu) - y / (mu * (1.0 - mu))
            }
            NegBin(k) => xlogy(y, mu / (k + mu)) - k * (k + mu).ln(),
            BinomPow(_) | Custom(_) => return None,
        };
        Some(v)
    }

    /// Quadrature of `(y - t) / V(t)` from the family baseline to `mu`.
    pub fn quadrature(&self, y: f64, mu: f64) -> Result<f64> {
        let a = self.baseline();
        if !self.in_domain(mu) {
            return Err(Error::Domain { index: 0, mu });
        }
        adaptive_simpson(
            |t| (y - t) / self.eval(t),
            a,
            mu,
            DEFAULT_ABS_TOL,
            DEFAULT_MAX_DEPTH,
        )
    }
}

/// `x * ln(y)` with the convention `0 * ln(y) = 0`.
#[inline]
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

impl fmt::Display for VarianceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

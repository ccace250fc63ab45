//! Link functions mapping the mean to the linear predictor.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Means under the logit link are kept inside `[LOGIT_EPS, 1 - LOGIT_EPS]`.
pub const LOGIT_EPS: f64 = 1e-12;
/// Linear predictors are clamped to `[-LOG_ETA_MAX, LOG_ETA_MAX]` before exponentiation.
pub const LOG_ETA_MAX: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkFunction {
    Identity,
    Log,
    Logit,
}

/// Mean and its first two derivatives with respect to the linear predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanDerivs {
    pub mu: f64,
    pub dmu: f64,
    pub d2mu: f64,
    pub clamped: bool,
}

impl LinkFunction {
    /// `g(mu)`.
    pub fn link(self, mu: f64) -> f64 {
        match self {
            LinkFunction::Identity => mu,
            LinkFunction::Log => mu.ln(),
            LinkFunction::Logit => (mu / (1.0 - mu)).ln(),
        }
    }

    /// `g'(mu)`.
    pub fn derivative(self, mu: f64) -> f64 {
        match self {
            LinkFunction::Identity => 1.0,
            LinkFunction::Log => 1.0 / mu,
            LinkFunction::Logit => 1.0 / (mu * (1.0 - mu)),
        }
    }

    /// `g^{-1}(eta)` after the clamping policy, together with a flag telling
    /// whether clamping was applied.
    pub fn inverse_clamped(self, eta: f64) -> (f64, bool) {
        match self {
            LinkFunction::Identity => (eta, false),
            LinkFunction::Log => {
                let e = eta.clamp(-LOG_ETA_MAX, LOG_ETA_MAX);
                (e.exp(), e != eta)
            }
            LinkFunction::Logit => {
                let mu = logistic(eta);
                let c = mu.clamp(LOGIT_EPS, 1.0 - LOGIT_EPS);
                (c, c != mu)
            }
        }
    }

    pub fn inverse(self, eta: f64) -> f64 {
        self.inverse_clamped(eta).0
    }

    /// Mean with `dmu/deta` and `d2mu/deta2`. On a clamped boundary the
    /// derivatives are those of the clamped mean, so they stay positive.
    pub fn mean_derivs(self, eta: f64) -> MeanDerivs {
        let (mu, clamped) = self.inverse_clamped(eta);
        let (dmu, d2mu) = match self {
            LinkFunction::Identity => (1.0, 0.0),
            LinkFunction::Log => (mu, mu),
            LinkFunction::Logit => {
                let v = mu * (1.0 - mu);
                (v, v * (1.0 - 2.0 * mu))
            }
        };
        MeanDerivs {
            mu,
            dmu,
            d2mu,
            clamped,
        }
    }

    /// Open interval of attainable means.
    pub fn range(self) -> (f64, f64) {
        match self {
            LinkFunction::Identity => (f64::NEG_INFINITY, f64::INFINITY),
            LinkFunction::Log => (0.0, f64::INFINITY),
            LinkFunction::Logit => (0.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LinkFunction::Identity => "identity",
            LinkFunction::Log => "log",
            LinkFunction::Logit => "logit",
        }
    }
}

fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

impl fmt::Display for LinkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" => Ok(LinkFunction::Identity),
            "log" => Ok(LinkFunction::Log),
            "logit" => Ok(LinkFunction::Logit),
            other => Err(Error::InvalidArgument(format!("unknown link '{other}'"))),
        }
    }
}

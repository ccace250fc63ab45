use std::f64::consts::PI;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Improper uniform prior; contributes nothing to the log density.
    Flat,
    /// Independent normals per coordinate.
    Gaussian { mean: Vec<f64>, sd: Vec<f64> },
    /// Half-normal on a positive scale parameter.
    HalfNormal { scale: f64 },
}

impl Prior {
    pub fn gaussian(mean: Vec<f64>, sd: Vec<f64>) -> Result<Self> {
        if mean.len() != sd.len() {
            return Err(Error::InvalidArgument("prior mean and sd lengths differ".into()));
        }
        if sd.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument("prior sd must be positive".into()));
        }
        Ok(Prior::Gaussian { mean, sd })
    }

    /// The same normal prior on each of `p` coordinates.
    pub fn gaussian_iid(mean: f64, sd: f64, p: usize) -> Result<Self> {
        Self::gaussian(vec![mean; p], vec![sd; p])
    }

    pub fn half_normal(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument("half-normal scale must be positive".into()));
        }
        Ok(Prior::HalfNormal { scale })
    }

    /// Checks the prior against the dimension it will be evaluated on.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Prior::Gaussian { mean, .. } if mean.len() != dim => Err(Error::InvalidArgument(
                format!("prior has {} coordinates, expected {dim}", mean.len()),
            )),
            Prior::HalfNormal { .. } if dim != 1 => Err(Error::InvalidArgument(
                "half-normal prior applies to a scalar".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Normalised log density (flat: 0).
    pub fn log_density(&self, x: &[f64]) -> f64 {
        match self {
            Prior::Flat => 0.0,
            Prior::Gaussian { mean, sd } => x
                .iter()
                .zip(mean.iter().zip(sd))
                .map(|(&v, (&m, &s))| {
                    let z = (v - m) / s;
                    -HALF_LN_2PI - s.ln() - 0.5 * z * z
                })
                .sum(),
            Prior::HalfNormal { scale } => {
                let v = x[0];
                if v < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (2.0 / PI).sqrt().ln() - scale.ln() - 0.5 * (v / scale).powi(2)
                }
            }
        }
    }

    /// Diagonal precision contributed to a Gaussian approximation.
    pub fn precision_diag(&self, dim: usize) -> Vec<f64> {
        match self {
            Prior::Gaussian { sd, .. } => sd.iter().map(|s| 1.0 / (s * s)).collect(),
            _ => vec![0.0; dim],
        }
    }
}

pub(crate) fn normal_log_density(x: f64, sd: f64) -> f64 {
    let z = x / sd;
    -HALF_LN_2PI - sd.ln() - 0.5 * z * z
}

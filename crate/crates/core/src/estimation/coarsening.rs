use crate::error::{Error, Result};

/// Coarsening parameter matched to a dispersion value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coarsening {
    /// `α = n / (ψ - 1)`. Negative values arise for `ψ < 1`, where the
    /// power-posterior reading breaks down.
    Finite { alpha: f64, underdispersed: bool },
    /// `ψ = 1`: the standard posterior.
    Infinite,
}

impl Coarsening {
    pub fn alpha(&self) -> f64 {
        match *self {
            Coarsening::Finite { alpha, .. } => alpha,
            Coarsening::Infinite => f64::INFINITY,
        }
    }

    /// Likelihood power `α / (α + n)`.
    pub fn power(&self, n: usize) -> f64 {
        match *self {
            Coarsening::Finite { alpha, .. } => alpha / (alpha + n as f64),
            Coarsening::Infinite => 1.0,
        }
    }
}

pub fn coarsening_alpha(psi: f64, n: usize) -> Result<Coarsening> {
    if !(psi > 0.0 && psi.is_finite()) {
        return Err(Error::InvalidArgument(format!("dispersion must be positive, got {psi}")));
    }
    if psi == 1.0 {
        return Ok(Coarsening::Infinite);
    }
    Ok(Coarsening::Finite {
        alpha: n as f64 / (psi - 1.0),
        underdispersed: psi < 1.0,
    })
}

/// Inverse map `ψ = (α + n) / α`.
pub fn psi_from_alpha(alpha: f64, n: usize) -> Result<f64> {
    if alpha.is_infinite() && alpha > 0.0 {
        return Ok(1.0);
    }
    if alpha == 0.0 || alpha.is_nan() {
        return Err(Error::InvalidArgument(format!("invalid coarsening parameter {alpha}")));
    }
    Ok((alpha + n as f64) / alpha)
}

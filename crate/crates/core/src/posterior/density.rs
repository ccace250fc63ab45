use nalgebra::DVector;

use super::prior::{normal_log_density, Prior};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{check_psi, QuasiModel};

/// Random-intercept extension: `η_ij = x_ijᵀβ + δ_j`, `δ_j ~ N(0, σ²)`,
/// with `σ` a standard deviation sampled on the log scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    pub prior_sigma: Prior,
    pub groups: usize,
}

#[derive(Debug, Clone)]
pub struct PosteriorSpec {
    pub model: QuasiModel,
    pub prior_beta: Prior,
    /// Loss scale, fixed before sampling.
    pub psi: f64,
    pub hierarchical: Option<Hierarchy>,
}

impl PosteriorSpec {
    pub fn new(model: QuasiModel, prior_beta: Prior, psi: f64) -> Result<Self> {
        check_psi(psi)?;
        Ok(Self {
            model,
            prior_beta,
            psi,
            hierarchical: None,
        })
    }

    pub fn with_hierarchy(mut self, hierarchy: Hierarchy) -> Result<Self> {
        hierarchy.prior_sigma.check_dim(1)?;
        if hierarchy.groups == 0 {
            return Err(Error::InvalidArgument("hierarchy needs at least one group".into()));
        }
        self.hierarchical = Some(hierarchy);
        Ok(self)
    }

    pub fn layout(&self, p: usize) -> ParamLayout {
        ParamLayout {
            p,
            groups: self.hierarchical.as_ref().map_or(0, |h| h.groups),
            hierarchical: self.hierarchical.is_some(),
        }
    }

    /// Consistency between this specification and a dataset.
    pub fn check(&self, data: &Dataset) -> Result<()> {
        check_psi(self.psi)?;
        self.prior_beta.check_dim(data.p())?;
        match (&self.hierarchical, data.groups()) {
            (None, _) => Ok(()),
            (Some(h), Some(g)) if g.count() == h.groups => Ok(()),
            (Some(h), Some(g)) => Err(Error::InvalidArgument(format!(
                "spec has {} groups, data has {}",
                h.groups,
                g.count()
            ))),
            (Some(_), None) => Err(Error::InvalidArgument(
                "hierarchical spec needs grouped data".into(),
            )),
        }
    }
}

/// Packing of `(β, δ_1..δ_J, log σ)` into one parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamLayout {
    pub p: usize,
    pub groups: usize,
    pub hierarchical: bool,
}

impl ParamLayout {
    pub fn dim(&self) -> usize {
        if self.hierarchical {
            self.p + self.groups + 1
        } else {
            self.p
        }
    }

    pub fn pack(&self, beta: &[f64], delta: &[f64], log_sigma: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.extend_from_slice(beta);
        if self.hierarchical {
            v.extend_from_slice(delta);
            v.push(log_sigma);
        }
        v
    }

    /// Returns `(β, δ, log σ)`; `δ` is empty and `log σ` is NaN for
    /// non-hierarchical layouts.
    pub fn unpack<'a>(&self, params: &'a [f64]) -> (&'a [f64], &'a [f64], f64) {
        let beta = &params[..self.p];
        if self.hierarchical {
            let delta = &params[self.p..self.p + self.groups];
            (beta, delta, params[self.p + self.groups])
        } else {
            (beta, &params[self.p..self.p], f64::NAN)
        }
    }

    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.p).map(|j| format!("beta_{j}")).collect();
        if self.hierarchical {
            names.extend((1..=self.groups).map(|j| format!("delta_{j}")));
            names.push("log_sigma".into());
        }
        names
    }
}

/// `log p(β) + ℓ_Q(β; y, X, ψ)` up to a constant; the hierarchical case adds
/// the random-intercept density, the prior on `σ`, and the log-Jacobian of
/// sampling `log σ`.
pub fn log_quasi_posterior(spec: &PosteriorSpec, data: &Dataset, params: &[f64]) -> Result<f64> {
    let layout = spec.layout(data.p());
    if params.len() != layout.dim() {
        return Err(Error::InvalidArgument(format!(
            "expected {} parameters, got {}",
            layout.dim(),
            params.len()
        )));
    }
    let (beta, delta, log_sigma) = layout.unpack(params);
    let beta_v = DVector::from_column_slice(beta);
    let mut eta = data.x() * &beta_v;
    let mut extra = 0.0;
    if let Some(h) = &spec.hierarchical {
        let groups = data
            .groups()
            .ok_or_else(|| Error::InvalidArgument("hierarchical spec needs grouped data".into()))?;
        for (e, &g) in eta.iter_mut().zip(groups.index()) {
            *e += delta[g];
        }
        let sigma = log_sigma.exp();
        extra += delta.iter().map(|&d| normal_log_density(d, sigma)).sum::<f64>();
        extra += h.prior_sigma.log_density(&[sigma]) + log_sigma;
    }
    let ll = spec.model.quasi_loglik_eta(data.y(), &eta, spec.psi)?;
    Ok(spec.prior_beta.log_density(beta) + ll + extra)
}

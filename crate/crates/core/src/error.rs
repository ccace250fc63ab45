use thiserror::Error;

/// Errors produced by model evaluation, estimation and sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("restriction violated at observation {index}: {message}")]
    Restriction { index: usize, message: String },

    #[error("mean {mu} of observation {index} lies outside the variance domain")]
    Domain { index: usize, mu: f64 },

    #[error("non-finite quasi-likelihood contribution at observation {index}")]
    NonFinite { index: usize },

    #[error("quadrature failed to reach tolerance on [{lower}, {upper}]")]
    Quadrature { lower: f64, upper: f64 },

    #[error("information matrix is singular or not positive definite")]
    SingularInformation,

    #[error("moment matrix of the loss gradients is singular")]
    SingularMoments,

    #[error("Fisher scoring did not converge after {iterations} iterations (score norm {score_norm:e})")]
    Diverged {
        iterations: usize,
        score_norm: f64,
        last_iterate: Vec<f64>,
    },

    #[error("fit has not converged")]
    NotConverged,

    #[error("need n > p for dispersion estimation (n = {n}, p = {p})")]
    DegreesOfFreedom { n: usize, p: usize },

    #[error("could not initialise chain {chain} inside the support after {attempts} attempts")]
    Initialization { chain: usize, attempts: usize },

    #[error("{failures} of {replicates} replicates failed, above the 5% abort threshold")]
    TooManyFailures { failures: usize, replicates: usize },
}

impl Error {
    /// True for numerical failures as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Restriction { .. }
                | Error::DegreesOfFreedom { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

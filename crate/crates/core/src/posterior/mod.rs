//! Quasi-posterior assembly, sampling, normal approximation and summaries.

mod credible;
mod density;
mod diagnostics;
mod laplace;
mod prior;
mod sampler;

pub use credible::{credible_sets, interval_from_draws, CredibleSet, Interval, IntervalKind};
pub use density::{log_quasi_posterior, Hierarchy, ParamLayout, PosteriorSpec};
pub use diagnostics::{diagnostics, effective_sample_size, split_rhat, Diagnostics};
pub use laplace::{laplace_approx, LaplaceApprox};
pub use prior::Prior;
pub use sampler::{sample_rwmh, ChainSet, SamplerConfig};

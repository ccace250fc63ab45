//! Quasi-posterior inference for generalized linear models.
//!
//! A model is specified only through its first two moments,
//! `E(Y) = g^{-1}(xᵀβ)` and `var(Y) = ψ V(μ)`. The quasi-likelihood built from
//! these moments acts as a loss; combined with a prior it gives a generalized
//! posterior whose spread is governed by the dispersion `ψ`.
//!
//! ```
//! use quasipost::{fit_mql, Dataset, LinkFunction, QuasiModel, ScoringConfig, VarianceFunction};
//!
//! let data = Dataset::from_rows(
//!     vec![2.0, 0.0, 5.0, 3.0, 9.0],
//!     &[vec![1.0, -1.0], vec![1.0, -0.5], vec![1.0, 0.0], vec![1.0, 0.5], vec![1.0, 1.0]],
//! )
//! .unwrap();
//! let model = QuasiModel::new(LinkFunction::Log, VarianceFunction::Mu).unwrap();
//! let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
//! assert!(fit.converged && fit.psi_hat > 0.0);
//! ```

pub mod data;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod link;
pub mod model;
pub mod posterior;
pub mod quadrature;
pub mod sim;
pub mod variance;

pub use data::{Dataset, Groups};
pub use error::{Error, Result};
pub use estimation::{
    coarsening_alpha, estimate_dispersion_grouped, estimate_dispersion_llb, estimate_dispersion_mom,
    fit_mql, psi_from_alpha, Coarsening, DispersionEstimate, FitResult, Init, ScoringConfig,
};
pub use link::LinkFunction;
pub use model::QuasiModel;
pub use posterior::{
    credible_sets, diagnostics, laplace_approx, log_quasi_posterior, sample_rwmh, ChainSet,
    CredibleSet, Diagnostics, Hierarchy, Interval, IntervalKind, LaplaceApprox, ParamLayout,
    PosteriorSpec, Prior, SamplerConfig,
};
pub use sim::{
    generate, run_coverage_study, smse_pearson, CoverageReport, GeneratorKind, GeneratorSpec, Method,
};
pub use variance::{CustomVariance, VarianceFunction};

//! Point estimation: maximum quasi-likelihood, dispersion, and the mapping
//! between dispersion and the coarsening parameter of power posteriors.

mod coarsening;
mod dispersion;
mod fit;

pub use coarsening::{coarsening_alpha, psi_from_alpha, Coarsening};
pub use dispersion::{
    estimate_dispersion_grouped, estimate_dispersion_llb, estimate_dispersion_mom,
    DispersionEstimate,
};
pub use fit::{fit_mql, FitResult, Init, ScoringConfig};
pub(crate) use dispersion::fit_group_effects;

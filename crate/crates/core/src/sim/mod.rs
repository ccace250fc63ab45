//! Synthetic designs, replicated coverage studies and fit metrics.

mod coverage;
mod generators;
mod smse;

pub use coverage::{run_coverage_study, CoverageReport, Method, COVERAGE_LEVELS};
pub use generators::{
    generate, generate_het_gaussian, generate_rounded_gamma_counts, CovariateLaw, CustomGenerator,
    GeneratorKind, GeneratorSpec,
};
pub use smse::smse_pearson;

/// SplitMix64 finaliser, used to derive independent seeds from a master seed
/// and a counter.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    let mut z = master.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

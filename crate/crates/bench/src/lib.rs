//! Fixed inputs shared by the benchmarks.

use quasipost::{generate, Dataset, GeneratorSpec, QuasiModel};

/// A simulated dataset from a preset design, with its working model.
pub fn fixture(spec: &GeneratorSpec, seed: u64) -> (QuasiModel, Dataset) {
    let data = generate(spec, seed).expect("preset designs generate");
    (spec.working_model(), data)
}

pub fn counts(n: usize) -> (QuasiModel, Dataset) {
    let mut spec = GeneratorSpec::rounded_gamma_counts();
    spec.n = n;
    fixture(&spec, 17)
}

pub fn het_gaussian() -> (QuasiModel, Dataset) {
    fixture(&GeneratorSpec::het_gaussian(), 17)
}

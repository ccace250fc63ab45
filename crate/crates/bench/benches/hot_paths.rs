use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quasipost::{fit_mql, log_quasi_posterior, sample_rwmh, PosteriorSpec, Prior, SamplerConfig, ScoringConfig};
use quasipost_bench::{counts, het_gaussian};

fn loglik(c: &mut Criterion) {
    let mut group = c.benchmark_group("quasi_loglik");
    for n in [100, 1000, 10_000] {
        let (model, data) = counts(n);
        let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| model.quasi_loglik(&data, black_box(&fit.beta_hat), 1.0).unwrap())
        });
    }
    group.finish();
}

fn scoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_mql");
    let (model, data) = counts(1000);
    group.bench_function("counts_n1000", |b| {
        b.iter(|| fit_mql(&model, black_box(&data), &ScoringConfig::default()).unwrap())
    });
    let (model, data) = het_gaussian();
    group.bench_function("het_gaussian_n300", |b| {
        b.iter(|| fit_mql(&model, black_box(&data), &ScoringConfig::default()).unwrap())
    });
    group.finish();
}

fn posterior(c: &mut Criterion) {
    let (model, data) = counts(1000);
    let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
    let spec = PosteriorSpec::new(model, Prior::Flat, fit.psi_hat).unwrap();
    let beta: Vec<f64> = fit.beta_hat.iter().copied().collect();
    c.bench_function("log_quasi_posterior/counts_n1000", |b| {
        b.iter(|| log_quasi_posterior(&spec, &data, black_box(&beta)).unwrap())
    });

    let mut group = c.benchmark_group("sample_rwmh");
    group.sample_size(10);
    let config = SamplerConfig { chains: 1, draws: 1500, warmup: 500, seed: 3 };
    group.bench_function("counts_n1000_1x1500", |b| b.iter(|| sample_rwmh(&spec, &data, &config).unwrap()));
    group.finish();
}

criterion_group!(benches, loglik, scoring, posterior);
criterion_main!(benches);

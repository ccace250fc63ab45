//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with `n - 1` denominator.
pub fn var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Standard error of the mean.
pub fn se(x: &[f64]) -> f64 {
    (var(x) / x.len() as f64).sqrt()
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Kolmogorov–Smirnov distance between a sample and `N(mu, sd²)`.
pub fn ks_normal(sample: &[f64], mu: f64, sd: f64) -> f64 {
    let law = Normal::new(mu, sd).unwrap();
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = law.cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Full Poisson log-likelihood with the `log y!` term.
pub fn poisson_loglik(y: &[f64], eta: &[f64]) -> f64 {
    y.iter()
        .zip(eta)
        .map(|(&yi, &e)| yi * e - e.exp() - ln_gamma(yi + 1.0))
        .sum()
}

/// Central difference of a scalar function along coordinate `j`.
pub fn central_diff<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], j: usize, h: f64) -> f64 {
    let mut up = x.to_vec();
    let mut dn = x.to_vec();
    up[j] += h;
    dn[j] -= h;
    (f(&up) - f(&dn)) / (2.0 * h)
}

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, StandardNormal};
use rayon::prelude::*;

use super::derive_seed;
use super::generators::{generate, GeneratorKind, GeneratorSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimation::{fit_mql, ScoringConfig};
use crate::linalg::{least_squares, spd_cholesky, spd_inverse};
use crate::posterior::{interval_from_draws, sample_rwmh, IntervalKind, PosteriorSpec, Prior, SamplerConfig};

pub const COVERAGE_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Correctly specified second-order model with moment-estimated ψ.
    QuasiPosterior,
    /// Homoscedastic Gaussian linear model for continuous designs; the ψ = 1
    /// quasi-posterior otherwise.
    MisspecifiedReference,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::QuasiPosterior => "quasi_posterior",
            Method::MisspecifiedReference => "misspecified_reference",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quasi_posterior" | "quasi" => Ok(Method::QuasiPosterior),
            "misspecified_reference" | "reference" => Ok(Method::MisspecifiedReference),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

/// Aggregated outcome of one method over the successful replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub method: Method,
    pub levels: Vec<f64>,
    /// `coverage[level][coefficient]`.
    pub coverage: Vec<Vec<f64>>,
    /// Successful replicates; the denominator of every coverage value.
    pub replicates: usize,
    pub failures: usize,
    /// Posterior mean per successful replicate, in replicate order.
    pub posterior_means: Vec<Vec<f64>>,
    /// `mean_widths[level][coefficient]` of equal-tailed intervals.
    pub mean_widths: Vec<Vec<f64>>,
    /// Dispersion used per successful replicate.
    pub psi_hats: Vec<f64>,
}

impl CoverageReport {
    /// Standard deviation of the posterior means across replicates.
    pub fn posterior_mean_spread(&self) -> Vec<f64> {
        let r = self.posterior_means.len();
        let p = self.posterior_means.first().map_or(0, Vec::len);
        (0..p)
            .map(|j| {
                let m = self.posterior_means.iter().map(|v| v[j]).sum::<f64>() / r as f64;
                let ss = self.posterior_means.iter().map(|v| (v[j] - m).powi(2)).sum::<f64>();
                (ss / (r.max(2) - 1) as f64).sqrt()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Outcome {
    covered: Vec<Vec<bool>>,
    widths: Vec<Vec<f64>>,
    mean: Vec<f64>,
    psi: f64,
}

fn outcome_from_draws(draws: &[Vec<f64>], beta0: &[f64], psi: f64) -> Result<Outcome> {
    let mut covered = vec![Vec::new(); COVERAGE_LEVELS.len()];
    let mut widths = vec![Vec::new(); COVERAGE_LEVELS.len()];
    for (j, d) in draws.iter().enumerate() {
        for (l, &level) in COVERAGE_LEVELS.iter().enumerate() {
            let iv = interval_from_draws(d, level, IntervalKind::EqualTailed)?;
            covered[l].push(iv.contains(beta0[j]));
            widths[l].push(iv.width());
        }
    }
    let mean = draws.iter().map(|d| d.iter().sum::<f64>() / d.len() as f64).collect();
    Ok(Outcome { covered, widths, mean, psi })
}

fn quasi_outcome(
    gen: &GeneratorSpec,
    data: &Dataset,
    psi: Option<f64>,
    sampler: &SamplerConfig,
) -> Result<Outcome> {
    let model = gen.working_model();
    let psi = match psi {
        Some(v) => v,
        None => {
            let fit = fit_mql(&model, data, &ScoringConfig::default())?;
            if fit.perfect_fit {
                return Err(Error::SingularMoments);
            }
            fit.psi_hat
        }
    };
    let spec = PosteriorSpec::new(model, Prior::Flat, psi)?;
    let chains = sample_rwmh(&spec, data, sampler)?;
    let draws: Vec<Vec<f64>> = (0..chains.dim()).map(|j| chains.pooled(j)).collect();
    outcome_from_draws(&draws, &gen.beta0, psi)
}

/// Exact draws from the flat-prior homoscedastic Gaussian posterior:
/// `σ² | y ~ RSS / χ²_{n-p}`, `β | σ², y ~ N(β̂, σ² (XᵀX)^{-1})`.
fn homoscedastic_outcome(gen: &GeneratorSpec, data: &Dataset, total: usize, seed: u64) -> Result<Outcome> {
    let (n, p) = (data.n(), data.p());
    if n <= p {
        return Err(Error::DegreesOfFreedom { n, p });
    }
    let x = data.x();
    let beta_hat = least_squares(x, data.y())?;
    let resid = data.y() - x * &beta_hat;
    let rss = resid.norm_squared();
    let gram_inv = spd_inverse(&x.tr_mul(x))?;
    let l = spd_cholesky(&gram_inv).ok_or(Error::SingularInformation)?.l();
    let chi = ChiSquared::new((n - p) as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = DMatrix::zeros(p, total);
    for s in 0..total {
        let sigma2 = rss / rng.sample(chi);
        let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        draws.set_column(s, &(&beta_hat + &l * z * sigma2.sqrt()));
    }
    let per_coef: Vec<Vec<f64>> = draws.row_iter().map(|r| r.iter().copied().collect()).collect();
    outcome_from_draws(&per_coef, &gen.beta0, rss / (n - p) as f64)
}

fn run_method(
    gen: &GeneratorSpec,
    data: &Dataset,
    method: Method,
    sampler: &SamplerConfig,
) -> Result<Outcome> {
    match (method, &gen.kind) {
        (Method::QuasiPosterior, _) => quasi_outcome(gen, data, None, sampler),
        (Method::MisspecifiedReference, GeneratorKind::HetGaussian) => {
            homoscedastic_outcome(gen, data, sampler.chains * sampler.retained(), sampler.seed)
        }
        (Method::MisspecifiedReference, _) => quasi_outcome(gen, data, Some(1.0), sampler),
    }
}

fn aggregate(method: Method, p: usize, outcomes: Vec<Result<Outcome>>) -> Result<CoverageReport> {
    let attempted = outcomes.len();
    let ok: Vec<Outcome> = outcomes.into_iter().filter_map(|o| o.ok()).collect();
    let failures = attempted - ok.len();
    if failures * 20 > attempted || ok.is_empty() {
        return Err(Error::TooManyFailures {
            failures,
            replicates: attempted,
        });
    }
    let r = ok.len() as f64;
    let levels = COVERAGE_LEVELS.len();
    let coverage = (0..levels)
        .map(|l| {
            (0..p)
                .map(|j| ok.iter().filter(|o| o.covered[l][j]).count() as f64 / r)
                .collect()
        })
        .collect();
    let mean_widths = (0..levels)
        .map(|l| (0..p).map(|j| ok.iter().map(|o| o.widths[l][j]).sum::<f64>() / r).collect())
        .collect();
    Ok(CoverageReport {
        method,
        levels: COVERAGE_LEVELS.to_vec(),
        coverage,
        replicates: ok.len(),
        failures,
        posterior_means: ok.iter().map(|o| o.mean.clone()).collect(),
        mean_widths,
        psi_hats: ok.iter().map(|o| o.psi).collect(),
    })
}

/// Replicated frequentist coverage of equal-tailed credible intervals at
/// levels 0.90, 0.95 and 0.99, using a flat prior on `β`.
///
/// Replicate `r` draws its data from seed `derive_seed(seed, r)` and runs
/// each method's sampler with a further derived seed, so the result is
/// identical whatever the thread count. Failed replicates are excluded and
/// counted; more than 5% failures for a method aborts the study.
pub fn run_coverage_study(
    gen: &GeneratorSpec,
    methods: &[Method],
    replicates: usize,
    sampler: &SamplerConfig,
    seed: u64,
) -> Result<Vec<CoverageReport>> {
    if replicates == 0 || methods.is_empty() {
        return Err(Error::InvalidArgument("need at least one replicate and one method".into()));
    }
    let per_replicate: Vec<Vec<Result<Outcome>>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let data_seed = derive_seed(seed, r);
            let data = generate(gen, data_seed);
            methods
                .iter()
                .enumerate()
                .map(|(k, &m)| {
                    let data = data.as_ref().map_err(Clone::clone)?;
                    let cfg = SamplerConfig {
                        seed: derive_seed(data_seed, k as u64 + 1),
                        ..*sampler
                    };
                    run_method(gen, data, m, &cfg)
                })
                .collect()
        })
        .collect();

    let mut by_method: Vec<Vec<Result<Outcome>>> = vec![Vec::with_capacity(replicates); methods.len()];
    for row in per_replicate {
        for (k, o) in row.into_iter().enumerate() {
            by_method[k].push(o);
        }
    }
    methods
        .iter()
        .zip(by_method)
        .map(|(&m, outcomes)| aggregate(m, gen.p(), outcomes))
        .collect()
}

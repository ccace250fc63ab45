use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::density::{log_quasi_posterior, PosteriorSpec};
use super::diagnostics::diagnostics;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimation::{fit_group_effects, fit_mql, ScoringConfig};
use crate::linalg::{spd_cholesky, spd_inverse};
use crate::model::weighted_gram;

const TARGET_ACCEPT: f64 = 0.234;
const INIT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub chains: usize,
    /// Iterations per chain, warmup included; `draws - warmup` are kept.
    pub draws: usize,
    pub warmup: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            chains: 3,
            draws: 1500,
            warmup: 500,
            seed: 1,
        }
    }
}

impl SamplerConfig {
    pub fn retained(&self) -> usize {
        self.draws.saturating_sub(self.warmup)
    }

    fn check(&self) -> Result<()> {
        if self.chains == 0 || self.draws == 0 || self.draws <= self.warmup {
            return Err(Error::InvalidArgument(format!(
                "need chains ≥ 1 and draws > warmup (chains {}, draws {}, warmup {})",
                self.chains, self.draws, self.warmup
            )));
        }
        Ok(())
    }
}

/// Retained draws of several chains (each `draws × d`) with convergence
/// summaries computed on those draws only.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSet {
    pub draws: Vec<DMatrix<f64>>,
    pub warmup: usize,
    pub acceptance_rate: Vec<f64>,
    pub seed: u64,
    pub names: Vec<String>,
    pub rhat: Vec<f64>,
    pub ess: Vec<f64>,
}

impl ChainSet {
    pub fn new(
        draws: Vec<DMatrix<f64>>,
        warmup: usize,
        acceptance_rate: Vec<f64>,
        seed: u64,
        names: Vec<String>,
    ) -> Result<Self> {
        let first = draws
            .first()
            .ok_or_else(|| Error::InvalidArgument("chain set needs at least one chain".into()))?;
        let shape = first.shape();
        if shape.0 == 0 || draws.iter().any(|c| c.shape() != shape) {
            return Err(Error::InvalidArgument("chains must be non-empty with equal shapes".into()));
        }
        if names.len() != shape.1 || acceptance_rate.len() != draws.len() {
            return Err(Error::InvalidArgument("chain metadata does not match the draws".into()));
        }
        let mut set = Self {
            draws,
            warmup,
            acceptance_rate,
            seed,
            names,
            rhat: Vec::new(),
            ess: Vec::new(),
        };
        let diag = diagnostics(&set);
        set.rhat = diag.rhat;
        set.ess = diag.ess;
        Ok(set)
    }

    pub fn n_chains(&self) -> usize {
        self.draws.len()
    }

    pub fn n_draws(&self) -> usize {
        self.draws[0].nrows()
    }

    pub fn dim(&self) -> usize {
        self.draws[0].ncols()
    }

    pub fn param_by_chain(&self, j: usize) -> Vec<Vec<f64>> {
        self.draws.iter().map(|c| c.column(j).iter().copied().collect()).collect()
    }

    pub fn pooled(&self, j: usize) -> Vec<f64> {
        self.draws.iter().flat_map(|c| c.column(j).iter().copied().collect::<Vec<_>>()).collect()
    }

    pub fn mean(&self) -> DVector<f64> {
        let total = (self.n_chains() * self.n_draws()) as f64;
        DVector::from_fn(self.dim(), |j, _| {
            self.draws.iter().map(|c| c.column(j).sum()).sum::<f64>() / total
        })
    }

    /// Pooled sample covariance.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let d = self.dim();
        let mut cov = DMatrix::zeros(d, d);
        for c in &self.draws {
            for row in c.row_iter() {
                let r = row.transpose() - &mean;
                cov += &r * r.transpose();
            }
        }
        let total = self.n_chains() * self.n_draws();
        cov / (total.max(2) - 1) as f64
    }

    pub fn sd(&self) -> DVector<f64> {
        self.covariance().diagonal().map(f64::sqrt)
    }
}

/// Starting point and approximate posterior covariance.
struct Start {
    center: Vec<f64>,
    cov: DMatrix<f64>,
}

fn starting_point(spec: &PosteriorSpec, data: &Dataset) -> Result<Start> {
    let p = data.p();
    let prior_prec = spec.prior_beta.precision_diag(p);
    match &spec.hierarchical {
        None => {
            let fit = fit_mql(&spec.model, data, &ScoringConfig::default())?;
            if !fit.converged {
                return Err(Error::NotConverged);
            }
            let mut info = fit.information(spec.psi);
            for (j, &v) in prior_prec.iter().enumerate() {
                info[(j, j)] += v;
            }
            Ok(Start {
                center: fit.beta_hat.iter().copied().collect(),
                cov: spd_inverse(&info)?,
            })
        }
        Some(h) => {
            let groups = data
                .groups()
                .ok_or_else(|| Error::InvalidArgument("hierarchical spec needs grouped data".into()))?;
            let g = fit_group_effects(&spec.model, data)?;
            let j_count = h.groups as f64;
            let spread = (g.effects.iter().map(|e| e * e).sum::<f64>() / j_count).sqrt();
            let sigma0 = spread.max(0.05);
            let layout = spec.layout(p);
            let center = layout.pack(
                g.beta.as_slice(),
                &g.effects,
                sigma0.ln(),
            );

            // Fisher information of (β, δ) plus the random-effect precision;
            // log σ is treated as uncorrelated with curvature ≈ 2J.
            let q = p + h.groups;
            let mut design = DMatrix::zeros(data.n(), q);
            design.columns_mut(0, p).copy_from(data.x());
            for (i, &gi) in groups.index().iter().enumerate() {
                design[(i, p + gi)] = 1.0;
            }
            let eta = &design * DVector::from_column_slice(&center[..q]);
            let w = spec.model.information_weights(&eta)? / spec.psi;
            let block = weighted_gram(&design, &w);
            let mut prec = DMatrix::zeros(q + 1, q + 1);
            prec.view_mut((0, 0), (q, q)).copy_from(&block);
            for (j, &v) in prior_prec.iter().enumerate() {
                prec[(j, j)] += v;
            }
            for j in p..q {
                prec[(j, j)] += 1.0 / (sigma0 * sigma0);
            }
            prec[(q, q)] = 2.0 * j_count + 1.0;
            Ok(Start {
                center,
                cov: spd_inverse(&prec)?,
            })
        }
    }
}

fn standard_normal_vec(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

fn empirical_cov(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut mean = DVector::zeros(d);
    for r in rows {
        mean += DVector::from_column_slice(r);
    }
    mean /= n;
    let mut cov = DMatrix::zeros(d, d);
    for r in rows {
        let c = DVector::from_column_slice(r) - &mean;
        cov += &c * c.transpose();
    }
    cov / (n - 1.0)
}

struct ChainOutput {
    draws: DMatrix<f64>,
    acceptance: f64,
}

fn run_chain(
    spec: &PosteriorSpec,
    data: &Dataset,
    start: &Start,
    config: &SamplerConfig,
    chain: usize,
) -> Result<ChainOutput> {
    let d = start.center.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(chain as u64);
    let log_density = |x: &[f64]| match log_quasi_posterior(spec, data, x) {
        Ok(v) if !v.is_nan() => v,
        _ => f64::NEG_INFINITY,
    };

    let jitter = spd_cholesky(&start.cov).ok_or(Error::SingularInformation)?.l();
    let center = DVector::from_column_slice(&start.center);
    let mut init = None;
    for _ in 0..INIT_ATTEMPTS {
        let x = &center + &jitter * standard_normal_vec(&mut rng, d);
        let lp = log_density(x.as_slice());
        if lp.is_finite() {
            init = Some((x, lp));
            break;
        }
    }
    let (mut x, mut lp) = init.ok_or(Error::Initialization {
        chain,
        attempts: INIT_ATTEMPTS,
    })?;

    let scale0 = 2.38 * 2.38 / d as f64;
    let mut base = start.cov.clone();
    let mut chol = jitter * scale0.sqrt();
    let mut log_scale = 0.0f64;
    let mut adapt_step = 0usize;

    let warmup = config.warmup;
    let window_start = warmup / 5;
    let checkpoints = if warmup >= 50 { [warmup * 2 / 5, warmup * 7 / 10] } else { [0, 0] };
    let mut warm_rows: Vec<Vec<f64>> = Vec::new();

    let retained = config.retained();
    let mut out = Vec::with_capacity(retained * d);
    let mut accepted = 0usize;

    for t in 0..config.draws {
        let step = &chol * standard_normal_vec(&mut rng, d) * log_scale.exp();
        let proposal = &x + step;
        let lp_new = log_density(proposal.as_slice());
        let log_ratio = lp_new - lp;
        let u: f64 = rng.random();
        let accept = lp_new.is_finite() && u.ln() < log_ratio;
        if accept {
            x = proposal;
            lp = lp_new;
        }

        if t < warmup {
            let prob = if lp_new.is_finite() { log_ratio.min(0.0).exp() } else { 0.0 };
            adapt_step += 1;
            log_scale += (prob - TARGET_ACCEPT) / (adapt_step as f64).powf(0.6);
            if t >= window_start {
                warm_rows.push(x.iter().copied().collect());
            }
            if checkpoints.contains(&(t + 1)) && warm_rows.len() > 2 * d {
                let m = warm_rows.len() as f64;
                let shrink = 20.0;
                let candidate = (empirical_cov(&warm_rows) * m + &base * shrink) / (m + shrink);
                if let Some(c) = spd_cholesky(&candidate) {
                    base = candidate;
                    chol = c.l() * scale0.sqrt();
                    log_scale = 0.0;
                    adapt_step = 0;
                }
            }
        } else {
            if accept {
                accepted += 1;
            }
            out.extend(x.iter().copied());
        }
    }

    Ok(ChainOutput {
        draws: DMatrix::from_row_slice(retained, d, &out),
        acceptance: accepted as f64 / retained as f64,
    })
}

/// Adaptive random-walk Metropolis on the quasi-posterior.
///
/// The Gaussian proposal starts from the inverse information at `β̂` scaled
/// by `2.38²/d`; during warmup its scale follows a Robbins–Monro recursion
/// towards acceptance 0.234 and its shape is refreshed twice from the warmup
/// draws. Everything is frozen after warmup. Chain `c` uses stream `c` of a
/// ChaCha8 generator seeded with `config.seed`, so results do not depend on
/// thread scheduling.
pub fn sample_rwmh(spec: &PosteriorSpec, data: &Dataset, config: &SamplerConfig) -> Result<ChainSet> {
    config.check()?;
    spec.check(data)?;
    spec.model.validate(data)?;
    let start = starting_point(spec, data)?;
    let outputs = (0..config.chains)
        .into_par_iter()
        .map(|c| run_chain(spec, data, &start, config, c))
        .collect::<Result<Vec<_>>>()?;
    let (draws, acceptance): (Vec<_>, Vec<_>) =
        outputs.into_iter().map(|o| (o.draws, o.acceptance)).unzip();
    ChainSet::new(
        draws,
        config.warmup,
        acceptance,
        config.seed,
        spec.layout(data.p()).names(),
    )
}

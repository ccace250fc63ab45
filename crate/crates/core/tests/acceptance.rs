//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//! With `ACCEPTANCE_STRICT` set the process exits non-zero if any fails;
//! `ACCEPTANCE_ONLY=1,5` restricts the run to the listed criteria.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use quasipost::estimation::{coarsening_alpha, psi_from_alpha};
use quasipost::model::quasi_loglik_quadrature;
use quasipost::sim::{CustomGenerator, GeneratorKind};
use quasipost::{
    estimate_dispersion_grouped, estimate_dispersion_llb, estimate_dispersion_mom, fit_mql,
    generate, laplace_approx, log_quasi_posterior, run_coverage_study, sample_rwmh, smse_pearson,
    CoverageReport, Dataset, GeneratorSpec, Groups, Hierarchy, LinkFunction, Method, PosteriorSpec,
    Prior, QuasiModel, SamplerConfig, ScoringConfig, VarianceFunction,
};

struct Gate {
    failed: Vec<String>,
}

impl Gate {
    fn report(&mut self, id: &str, name: &str, checks: Vec<(String, bool)>, started: Instant) {
        let pass = checks.iter().all(|c| c.1);
        let detail: Vec<String> = checks
            .iter()
            .map(|(d, ok)| if *ok { d.clone() } else { format!("{d} [FAILED]") })
            .collect();
        println!(
            "{} criterion {id} ({name}, {:.1}s): {}",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64(),
            detail.join("; ")
        );
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn within(label: &str, value: f64, lo: f64, hi: f64) -> (String, bool) {
    // bounds such as 0.90 - 0.06 are not exact in binary
    let slack = 1e-12;
    (format!("{label} = {value:.4} in [{lo:.4}, {hi:.4}]"), value >= lo - slack && value <= hi + slack)
}

fn level_index(report: &CoverageReport, level: f64) -> usize {
    report.levels.iter().position(|&l| (l - level).abs() < 1e-12).unwrap()
}

// 1 ---------------------------------------------------------------------------

fn heteroscedastic_coverage(gate: &mut Gate) {
    let t = Instant::now();
    let gen = GeneratorSpec::het_gaussian();
    // 3 × 3000 with 1000 warmup keeps MC error far below the replicate noise
    let sampler = SamplerConfig { chains: 3, draws: 3000, warmup: 1000, seed: 0 };
    let reports = run_coverage_study(
        &gen,
        &[Method::QuasiPosterior, Method::MisspecifiedReference],
        100,
        &sampler,
        20_240_501,
    );
    let mut checks = Vec::new();
    match reports {
        Ok(r) => {
            let (qp, lm) = (&r[0], &r[1]);
            for level in [0.90, 0.95] {
                let l = level_index(qp, level);
                for (j, &c) in qp.coverage[l].iter().enumerate() {
                    checks.push(within(
                        &format!("qp cov β{} @{level}", j + 1),
                        c,
                        level - 0.06,
                        level + 0.06,
                    ));
                }
            }
            let c = lm.coverage[level_index(lm, 0.95)][1];
            checks.push((format!("lm cov β2 @0.95 = {c:.2} ≤ 0.85"), c <= 0.85));
            checks.push((format!("failures qp {} lm {}", qp.failures, lm.failures), true));
        }
        Err(e) => checks.push((format!("study failed: {e}"), false)),
    }
    gate.report("1", "heteroscedastic coverage", checks, t);
    println!("  note: {}", normal_approx_coverage(&gen, 1000, 20_240_501));
}

/// Informational: 0.90 coverage of `β̂ ± z·sd` from the normal approximation
/// over many replicates, separating replicate noise from sampler error.
fn normal_approx_coverage(gen: &GeneratorSpec, reps: u64, seed: u64) -> String {
    let model = gen.working_model();
    let z = 1.644_853_626_951_472_2;
    let mut hits = vec![0usize; gen.p()];
    let mut first = vec![0usize; gen.p()];
    for r in 0..reps {
        let data = generate(gen, quasipost::sim::derive_seed(seed, r)).unwrap();
        let Ok(fit) = fit_mql(&model, &data, &ScoringConfig::default()) else { continue };
        let spec = PosteriorSpec::new(model.clone(), Prior::Flat, fit.psi_hat).unwrap();
        let la = laplace_approx(&spec, &data, &fit).unwrap();
        for j in 0..gen.p() {
            if (la.mean[j] - gen.beta0[j]).abs() <= z * la.covariance[(j, j)].sqrt() {
                hits[j] += 1;
                if r < 100 {
                    first[j] += 1;
                }
            }
        }
    }
    let fmt = |v: &[usize], d: f64| v.iter().map(|&h| format!("{:.3}", h as f64 / d)).collect::<Vec<_>>().join(" ");
    format!(
        "normal-approximation 0.90 coverage, first 100 replicates: {}; all {reps}: {}",
        fmt(&first, 100.0),
        fmt(&hits, reps as f64)
    )
}

// 2, 3 ------------------------------------------------------------------------

fn count_coverage_and_dispersion(gate: &mut Gate) -> Option<Vec<f64>> {
    let t = Instant::now();
    let gen = GeneratorSpec::rounded_gamma_counts();
    let reports = run_coverage_study(
        &gen,
        &[Method::QuasiPosterior, Method::MisspecifiedReference],
        100,
        &SamplerConfig::default(),
        20_240_502,
    );
    let mut checks = Vec::new();
    let mut psi_hats = None;
    match reports {
        Ok(r) => {
            let (qp, poi) = (&r[0], &r[1]);
            let l = level_index(qp, 0.95);
            for (j, &c) in qp.coverage[l].iter().enumerate() {
                checks.push(within(&format!("qp cov β{} @0.95", j + 1), c, 0.90, 1.00));
            }
            for (j, &c) in poi.coverage[l].iter().enumerate().skip(1) {
                checks.push((format!("poi cov β{} @0.95 = {c:.2} ≤ 0.85", j + 1), c <= 0.85));
            }
            psi_hats = Some(qp.psi_hats.clone());
        }
        Err(e) => checks.push((format!("study failed: {e}"), false)),
    }
    gate.report("2", "overdispersed count coverage", checks, t);
    psi_hats
}

fn dispersion_recovery(gate: &mut Gate, psi_hats: Option<Vec<f64>>) {
    let t = Instant::now();
    let mut checks = Vec::new();
    match psi_hats {
        Some(p) => checks.push(within(
            &format!("mean moment ψ̂ over {} count replicates", p.len()),
            common::mean(&p),
            3.2,
            3.8,
        )),
        None => checks.push(("count study unavailable".into(), false)),
    }

    // Fixed one-dimensional design, Gaussian errors, 10⁴ replicates.
    let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
    let (beta, psi): (f64, f64) = (0.7, 2.0);
    let s2: f64 = xs.iter().map(|x| x * x).sum();
    let s4: f64 = xs.iter().map(|x| x.powi(4)).sum();
    let model = QuasiModel::new(LinkFunction::Identity, VarianceFunction::Constant).unwrap();
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (mut mom, mut llb) = (Vec::new(), Vec::new());
    for _ in 0..10_000 {
        let y: Vec<f64> = xs
            .iter()
            .map(|&x| x * beta + psi.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = Dataset::from_rows(y, &rows).unwrap();
        let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
        mom.push(estimate_dispersion_mom(&model, &data, &fit.beta_hat).unwrap().psi);
        llb.push(estimate_dispersion_llb(&model, &data, &fit.beta_hat).unwrap());
    }
    let biased = psi * (1.0 - s4 / (s2 * s2));
    let (m1, e1) = (common::mean(&mom), common::se(&mom));
    let (m2, e2) = (common::mean(&llb), common::se(&llb));
    checks.push(within("mean moment ψ̂ (target 2)", m1, psi - 2.0 * e1, psi + 2.0 * e1));
    checks.push(within(
        &format!("mean LLB ψ̂ (target {biased:.4})"),
        m2,
        biased - 2.0 * e2,
        biased + 2.0 * e2,
    ));
    gate.report("3", "dispersion recovery", checks, t);
}

// 4 ---------------------------------------------------------------------------

fn power_posterior_equivalence(gate: &mut Gate) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 60;
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![1.0, rng.sample(StandardNormal)]).collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| {
            let mu = (1.0 + 0.5 * r[1]).exp();
            Gamma::new(mu / 2.5, 2.5).unwrap().sample(&mut rng).round()
        })
        .collect();
    let data = Dataset::from_rows(y.clone(), &rows).unwrap();
    let model = QuasiModel::new(LinkFunction::Log, VarianceFunction::Mu).unwrap();
    let prior = Prior::gaussian(vec![0.0, 0.0], vec![3.0, 2.0]).unwrap();
    let mut checks = Vec::new();
    for psi in [2.5, 1.3, 7.0] {
        let power = coarsening_alpha(psi, n).unwrap().power(n);
        let spec = PosteriorSpec::new(model.clone(), prior.clone(), psi).unwrap();
        let diffs: Vec<f64> = (0..20)
            .map(|_| {
                let b = [rng.random_range(-1.0..2.0), rng.random_range(-1.0..1.0)];
                let eta: Vec<f64> = rows.iter().map(|r| b[0] + b[1] * r[1]).collect();
                log_quasi_posterior(&spec, &data, &b).unwrap()
                    - power * common::poisson_loglik(&y, &eta)
                    - prior.log_density(&b)
            })
            .collect();
        let spread = diffs.iter().fold(f64::MIN, |a, &v| a.max(v))
            - diffs.iter().fold(f64::MAX, |a, &v| a.min(v));
        checks.push((format!("ψ={psi}: spread of difference {spread:.2e} < 1e-10"), spread < 1e-10));
    }
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let psi = 0.05 + 0.1 * k as f64;
        if psi == 1.0 {
            continue;
        }
        let alpha = coarsening_alpha(psi, 1000).unwrap().alpha();
        worst = worst.max((psi_from_alpha(alpha, 1000).unwrap() - psi).abs() / psi);
    }
    checks.push((format!("ψ↔α round trip rel. error {worst:.1e} ≤ 1e-12"), worst <= 1e-12));
    gate.report("4", "power-posterior equivalence", checks, t);
}

// 5 ---------------------------------------------------------------------------

fn asymptotic_normality(gate: &mut Gate) {
    let t = Instant::now();
    let mut checks = Vec::new();

    // 1-D conjugate target: intercept-only Gaussian, flat prior.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 50;
    let y: Vec<f64> = (0..n).map(|_| 1.0 + rng.sample::<f64, _>(StandardNormal)).collect();
    let data = Dataset::from_rows(y.clone(), &vec![vec![1.0]; n]).unwrap();
    let psi = 1.3;
    let model = QuasiModel::new(LinkFunction::Identity, VarianceFunction::Constant).unwrap();
    let spec = PosteriorSpec::new(model, Prior::Flat, psi).unwrap();
    let cfg = SamplerConfig { chains: 4, draws: 26_000, warmup: 1_000, seed: 55 };
    let chains = sample_rwmh(&spec, &data, &cfg).unwrap();
    let thinned: Vec<f64> = chains
        .param_by_chain(0)
        .iter()
        .flat_map(|c| c.iter().step_by(10).copied().collect::<Vec<_>>())
        .collect();
    let ks = common::ks_normal(&thinned, common::mean(&y), (psi / n as f64).sqrt());
    checks.push((format!("KS over {} thinned draws = {ks:.4} < 0.03", thinned.len()), ks < 0.03));

    // Heteroscedastic model with exponential variance at n = 2000.
    let mut gen = GeneratorSpec::het_gaussian();
    gen.n = 2000;
    let data = generate(&gen, 2000).unwrap();
    let model = gen.working_model();
    let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
    let spec = PosteriorSpec::new(model, Prior::Flat, fit.psi_hat).unwrap();
    let la = laplace_approx(&spec, &data, &fit).unwrap();
    let cfg = SamplerConfig { chains: 4, draws: 7_000, warmup: 1_000, seed: 56 };
    let chains = sample_rwmh(&spec, &data, &cfg).unwrap();
    let (m, s, lsd) = (chains.mean(), chains.sd(), la.sd());
    for j in 0..m.len() {
        let gap = (m[j] - la.mean[j]).abs() / lsd[j];
        checks.push((format!("β{} mean gap {gap:.3} sd < 0.1", j + 1), gap < 0.1));
        checks.push(within(&format!("β{} sd ratio", j + 1), s[j] / lsd[j], 0.9, 1.1));
    }
    gate.report("5", "asymptotic normality", checks, t);
}

// 6 ---------------------------------------------------------------------------

fn families() -> Vec<(LinkFunction, VarianceFunction)> {
    use LinkFunction::*;
    use VarianceFunction as V;
    vec![
        (Identity, V::Constant),
        (Log, V::Mu),
        (Log, V::MuSq),
        (Log, V::mu_pow(3.0).unwrap()),
        (Identity, V::ExpMu),
        (Logit, V::Binom),
        (Logit, V::BinomSq),
        (Log, V::neg_bin(2.0).unwrap()),
        (Logit, V::binom_pow(2.25).unwrap()),
    ]
}

fn response(variance: &VarianceFunction, rng: &mut ChaCha8Rng) -> f64 {
    match variance.domain() {
        (lo, _) if lo == f64::NEG_INFINITY => rng.sample(StandardNormal),
        (_, hi) if hi == 1.0 => rng.random_range(0.05..0.95),
        _ => rng.random_range(0.2..6.0),
    }
}

fn random_dataset(n: usize, variance: &VarianceFunction, rng: &mut ChaCha8Rng) -> Dataset {
    let rows: Vec<Vec<f64>> =
        (0..n).map(|_| vec![1.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let y = (0..n).map(|_| response(variance, rng)).collect();
    Dataset::from_rows(y, &rows).unwrap()
}

fn numerical_identities(gate: &mut Gate) {
    let t = Instant::now();
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // Quasi-score against central differences of the quasi-log-likelihood.
    let mut worst_grad: f64 = 0.0;
    for (link, variance) in families() {
        let model = QuasiModel::new(link, variance.clone()).unwrap();
        for n in [5, 20] {
            let data = random_dataset(n, &variance, &mut rng);
            let beta = vec![rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)];
            let psi = 1.7;
            let score = model.quasi_score(&data, &DVector::from_vec(beta.clone()), psi).unwrap();
            let h = if variance.has_closed_form() { 1e-6 } else { 1e-4 };
            let f = |b: &[f64]| model.quasi_loglik(&data, &DVector::from_column_slice(b), psi).unwrap();
            for j in 0..3 {
                let fd = common::central_diff(f, &beta, j, h);
                worst_grad = worst_grad.max((fd - score[j]).abs() / score[j].abs().max(1.0));
            }
        }
    }
    checks.push((format!("max rel. gradient error {worst_grad:.1e} < 1e-5"), worst_grad < 1e-5));

    // Closed form against quadrature, up to a β-free constant.
    let mut worst_quad: f64 = 0.0;
    for (link, variance) in families() {
        if !variance.has_closed_form() {
            continue;
        }
        let model = QuasiModel::new(link, variance.clone()).unwrap();
        let data = random_dataset(20, &variance, &mut rng);
        let mut offsets = Vec::new();
        for _ in 0..20 {
            let beta = DVector::from_fn(3, |_, _| rng.random_range(-0.5..0.5));
            let eta = data.x() * &beta;
            let closed = model.quasi_loglik(&data, &beta, 1.0).unwrap();
            let quad: f64 = data
                .y()
                .iter()
                .zip(eta.iter())
                .map(|(&y, &e)| quasi_loglik_quadrature(&variance, y, link.inverse(e), 1.0).unwrap())
                .sum();
            offsets.push(closed - quad);
        }
        let spread = offsets.iter().fold(f64::MIN, |a, &v| a.max(v)) - offsets.iter().fold(f64::MAX, |a, &v| a.min(v));
        worst_quad = worst_quad.max(spread);
    }
    checks.push((format!("closed form vs quadrature spread {worst_quad:.1e} < 1e-8"), worst_quad < 1e-8));

    // Monte Carlo: E U(β₀) = 0, E UUᵀ = ψ₀ J, E(−∇U) = J, for two exact-moment laws.
    let gamma_counts = CustomGenerator::new(
        "gamma",
        QuasiModel::new(LinkFunction::Log, VarianceFunction::Mu).unwrap(),
        |eta, psi0, rng| {
            let mu = eta.exp();
            Gamma::new(mu / psi0, psi0).unwrap().sample(rng)
        },
    );
    let designs = [
        GeneratorSpec::new(GeneratorKind::HetGaussian, vec![-1.0, 0.8, 0.5], 2.5, 30).unwrap(),
        GeneratorSpec::new(GeneratorKind::Custom(gamma_counts), vec![1.0, 0.5, -0.4], 3.5, 30).unwrap(),
    ];
    for gen in &designs {
        let model = gen.working_model();
        let x = generate(gen, 600).unwrap().x().clone();
        let beta0 = DVector::from_column_slice(&gen.beta0);
        let eta = &x * &beta0;
        let p = gen.p();
        let reps = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut scores = DMatrix::zeros(reps, p);
        let mut outer = vec![Vec::with_capacity(reps); p * p];
        let mut neg_hess = vec![Vec::with_capacity(reps); p * p];
        for r in 0..reps {
            let y: Vec<f64> = eta.iter().map(|&e| gen.draw_response(e, &mut rng).unwrap()).collect();
            let mut u = DVector::zeros(p);
            let mut hmat = DMatrix::zeros(p, p);
            for (i, &yi) in y.iter().enumerate() {
                let d = model.eta_derivs(yi, eta[i]).unwrap();
                let xi = x.row(i).transpose();
                u += &xi * d.grad;
                hmat -= &xi * xi.transpose() * d.hess;
            }
            scores.set_row(r, &u.transpose());
            for j in 0..p {
                for k in 0..p {
                    outer[j * p + k].push(u[j] * u[k]);
                    neg_hess[j * p + k].push(hmat[(j, k)]);
                }
            }
        }
        let d = model.information_weights(&eta).unwrap();
        let j_unit = quasipost::model::weighted_gram(&x, &d);
        let mut worst_z: f64 = 0.0;
        for j in 0..p {
            let col: Vec<f64> = scores.column(j).iter().copied().collect();
            worst_z = worst_z.max(common::mean(&col).abs() / common::se(&col));
        }
        checks.push((format!("{}: score mean max |z| {worst_z:.2} < 4", gen.label()), worst_z < 4.0));
        let (mut zh, mut zj): (f64, f64) = (0.0, 0.0);
        for j in 0..p {
            for k in 0..p {
                let o = &outer[j * p + k];
                zh = zh.max((common::mean(o) - gen.psi0 * j_unit[(j, k)]).abs() / common::se(o));
                let h = &neg_hess[j * p + k];
                let se = common::se(h);
                // −∇U is non-random for canonical pairs; compare exactly then
                let dev = (common::mean(h) - j_unit[(j, k)]).abs();
                let scale = j_unit[(j, k)].abs().max(1.0);
                zj = zj.max(if se > 1e-12 * scale {
                    dev / se
                } else if dev < 1e-9 * scale {
                    0.0
                } else {
                    f64::INFINITY
                });
            }
        }
        checks.push((format!("{}: E UUᵀ vs ψ₀J max |z| {zh:.2} < 4", gen.label()), zh < 4.0));
        checks.push((format!("{}: E(−∇U) vs J max |z| {zj:.2} < 4", gen.label()), zj < 4.0));
    }
    gate.report("6", "numerical identities", checks, t);
}

// 7 ---------------------------------------------------------------------------

fn smse_identity(gate: &mut Gate) {
    let t = Instant::now();
    let mut checks = Vec::new();
    for (gen, seed) in [(GeneratorSpec::het_gaussian(), 71), (GeneratorSpec::rounded_gamma_counts(), 72)] {
        let data = generate(&gen, seed).unwrap();
        let model = gen.working_model();
        let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
        let s = smse_pearson(&model, &data, &fit.mu_hat, fit.psi_hat).unwrap();
        let want = (data.n() - data.p()) as f64 / data.n() as f64;
        let rel = (s - want).abs() / want;
        checks.push((format!("{}: sMSE {s:.15} vs (n−p)/n rel. {rel:.1e}", gen.label()), rel < 1e-13));
    }
    // Calibration at the generating dispersion, large n.
    let mut gen = GeneratorSpec::rounded_gamma_counts();
    gen.n = 20_000;
    let data = generate(&gen, 73).unwrap();
    let model = gen.working_model();
    let fit = fit_mql(&model, &data, &ScoringConfig::default()).unwrap();
    let s = smse_pearson(&model, &data, &fit.mu_hat, gen.psi0).unwrap();
    checks.push(within("sMSE at ψ₀, n=20000", s, 0.9, 1.1));
    gate.report("7", "sMSE identity", checks, t);
}

// 8 ---------------------------------------------------------------------------

fn hierarchical_smoke(gate: &mut Gate) {
    let t = Instant::now();
    let mut checks = Vec::new();
    let (j_groups, per_group, sigma) = (30usize, 20usize, 0.5);
    let (beta0, psi0) = ([2.0, 0.3], 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let delta: Vec<f64> = (0..j_groups).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut index = Vec::new();
    for (g, d) in delta.iter().enumerate() {
        for _ in 0..per_group {
            let x1: f64 = rng.sample(StandardNormal);
            let mu = (beta0[0] + beta0[1] * x1 + d).exp();
            y.push(Gamma::new(mu / psi0, psi0).unwrap().sample(&mut rng).round());
            rows.push(vec![1.0, x1]);
            index.push(g);
        }
    }
    let data = Dataset::from_rows(y, &rows)
        .unwrap()
        .with_groups(Groups::new(index, j_groups).unwrap())
        .unwrap();
    let model = QuasiModel::new(LinkFunction::Log, VarianceFunction::Mu).unwrap();
    let psi = estimate_dispersion_grouped(&model, &data).unwrap().psi;
    let spec = PosteriorSpec::new(model, Prior::gaussian_iid(0.0, 10.0, 2).unwrap(), psi)
        .unwrap()
        .with_hierarchy(Hierarchy { prior_sigma: Prior::half_normal(1.0).unwrap(), groups: j_groups })
        .unwrap();
    let cfg = SamplerConfig { chains: 4, draws: 24_000, warmup: 6_000, seed: 88 };
    match sample_rwmh(&spec, &data, &cfg) {
        Ok(chains) => {
            let p = 2;
            let sigma_draws: Vec<f64> = chains.pooled(p + j_groups).iter().map(|v| v.exp()).collect();
            let post_sigma = common::mean(&sigma_draws);
            checks.push((format!("ψ̂ (group-aware) = {psi:.3}"), true));
            checks.push(within("posterior mean σ (true 0.5)", post_sigma, 0.75 * sigma, 1.25 * sigma));
            let means = chains.mean();
            let est: Vec<f64> = (0..j_groups).map(|g| means[p + g]).collect();
            let r = common::correlation(&est, &delta);
            checks.push((format!("corr(δ̂, δ) = {r:.3} > 0.8"), r > 0.8));
            let worst_rhat = chains.rhat.iter().fold(0.0f64, |a, &v| a.max(v));
            checks.push((format!("max R̂ {worst_rhat:.3}"), true));
        }
        Err(e) => checks.push((format!("sampling failed: {e}"), false)),
    }
    gate.report("8", "hierarchical random intercepts", checks, t);
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: Vec::new() };
    let only: Option<String> = std::env::var("ACCEPTANCE_ONLY").ok();
    let run = |id: &str| only.as_deref().is_none_or(|o| o.split(',').any(|s| s == id));
    if run("1") {
        heteroscedastic_coverage(&mut gate);
    }
    if run("2") || run("3") {
        let psi_hats = count_coverage_and_dispersion(&mut gate);
        dispersion_recovery(&mut gate, psi_hats);
    }
    if run("4") {
        power_posterior_equivalence(&mut gate);
    }
    if run("5") {
        asymptotic_normality(&mut gate);
    }
    if run("6") {
        numerical_identities(&mut gate);
    }
    if run("7") {
        smse_identity(&mut gate);
    }
    if run("8") {
        hierarchical_smoke(&mut gate);
    }
    if gate.failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {}", gate.failed.join(", "));
        // Failures are reported, not hidden; the exit status only gates when asked to.
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            ExitCode::FAILURE
        } else {
            ExitCode::SUCCESS
        }
    }
}

use std::fs;
use std::path::PathBuf;

use quasipost::{
    coarsening_alpha, estimate_dispersion_grouped, estimate_dispersion_llb, fit_mql, laplace_approx,
    run_coverage_study, sample_rwmh, Coarsening, FitResult, Hierarchy, PosteriorSpec, QuasiModel,
    ScoringConfig,
};
use serde_json::Value;

use crate::config::{CommandKind, PsiChoice, RunConfig};
use crate::error::{CliError, Result};
use crate::input::Input;
use crate::output::{self, matrix, num, nums, object};

/// Loaded data with its validated model and point fit.
struct Fitted {
    input: Input,
    model: QuasiModel,
    fit: FitResult,
    llb: Option<f64>,
    grouped: Option<f64>,
}

impl Fitted {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let input = Input::load(cfg)?;
        let model = QuasiModel::new(cfg.link, cfg.variance.clone())?;
        input.validate(&model)?;
        let fit = fit_mql(&model, &input.data, &ScoringConfig::default()).map_err(|e| input.locate(e))?;
        let llb = estimate_dispersion_llb(&model, &input.data, &fit.beta_hat).ok();
        let grouped = match input.data.groups() {
            Some(_) => Some(estimate_dispersion_grouped(&model, &input.data)?.psi),
            None => None,
        };
        Ok(Self { input, model, fit, llb, grouped })
    }

    /// The dispersion selected by `--psi`; the group-aware moment estimate
    /// when groups are given.
    fn psi(&self, choice: PsiChoice) -> Result<f64> {
        let value = match choice {
            PsiChoice::Fixed(v) => return Ok(v),
            PsiChoice::Mom => self.grouped.unwrap_or(self.fit.psi_hat),
            PsiChoice::Llb if self.grouped.is_some() => {
                return Err(CliError::Usage("--psi llb is not available with --groups".into()))
            }
            PsiChoice::Llb => self
                .llb
                .ok_or_else(|| CliError::Numerical("LLB dispersion undefined: loss-gradient moment matrix is singular".into()))?,
        };
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(CliError::Numerical(format!(
                "estimated dispersion is {value} (every residual is zero); use --psi fixed:<value>"
            )))
        }
    }

    fn labels(&self) -> Vec<String> {
        let mut labels = self.input.covariates.clone();
        if let Some(groups) = &self.input.group_labels {
            labels.extend(groups.iter().map(|g| format!("delta[{g}]")));
            labels.push("log_sigma".into());
        }
        labels
    }

    fn spec(&self, cfg: &RunConfig, psi: f64) -> Result<PosteriorSpec> {
        let spec = PosteriorSpec::new(self.model.clone(), cfg.prior.build(self.input.data.p())?, psi)?;
        Ok(match self.input.data.groups() {
            Some(g) => spec.with_hierarchy(Hierarchy {
                prior_sigma: cfg.prior_sigma.clone(),
                groups: g.count(),
            })?,
            None => spec,
        })
    }
}

fn coarsening(psi: f64, n: usize) -> Value {
    match coarsening_alpha(psi, n) {
        Ok(Coarsening::Infinite) => object([
            ("alpha", Value::from("inf")),
            ("power", num(1.0)),
            ("underdispersed", Value::from(false)),
        ]),
        Ok(c @ Coarsening::Finite { underdispersed, .. }) => object([
            ("alpha", num(c.alpha())),
            ("power", num(c.power(n))),
            ("underdispersed", Value::from(underdispersed)),
        ]),
        Err(_) => Value::Null,
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn model_json(cfg: &RunConfig, fitted: &Fitted) -> Value {
    object([
        ("link", Value::from(cfg.link.name())),
        ("variance", Value::from(cfg.variance.name())),
        ("n", Value::from(fitted.input.data.n())),
        ("p", Value::from(fitted.input.data.p())),
        ("covariates", Value::from(fitted.input.covariates.clone())),
    ])
}

fn cmd_fit(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let f = Fitted::new(cfg)?;
    let n = f.input.data.n();
    // the selected dispersion may be degenerate; record rather than fail
    let psi = f.psi(cfg.psi).ok();
    let fit = &f.fit;
    let value = object([
        ("model", model_json(cfg, &f)),
        ("beta_hat", nums(fit.beta_hat.iter().copied())),
        (
            "psi_hat",
            object([("mom", num(fit.psi_hat)), ("llb", opt(f.llb)), ("grouped", opt(f.grouped))]),
        ),
        ("psi", object([("choice", Value::from(psi_label(cfg.psi))), ("value", opt(psi))])),
        ("information", psi.map_or(Value::Null, |v| matrix(&fit.information(v)))),
        ("unit_information", matrix(&fit.unit_information)),
        ("coarsening", psi.map_or(Value::Null, |v| coarsening(v, n))),
        (
            "convergence",
            object([
                ("converged", Value::from(fit.converged)),
                ("iterations", Value::from(fit.iterations)),
                ("score_norm", num(fit.score_norm)),
                ("clamp_events", Value::from(fit.clamp_events)),
                ("perfect_fit", Value::from(fit.perfect_fit)),
                ("quasi_loglik", num(fit.loglik)),
            ]),
        ),
    ]);
    let path = cfg.out.join("fit.json");
    output::write_json(&path, &value)?;
    Ok(vec![path])
}

fn psi_label(choice: PsiChoice) -> String {
    match choice {
        PsiChoice::Mom => "mom".into(),
        PsiChoice::Llb => "llb".into(),
        PsiChoice::Fixed(v) => format!("fixed:{v}"),
    }
}

fn cmd_sample(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let f = Fitted::new(cfg)?;
    let psi = f.psi(cfg.psi)?;
    let spec = f.spec(cfg, psi)?;
    let chains = sample_rwmh(&spec, &f.input.data, &cfg.sampler)?;
    let chains_path = cfg.out.join("chains.csv");
    output::write_chains_csv(&chains_path, &chains)?;
    let s = &cfg.sampler;
    let summary = object([
        ("model", model_json(cfg, &f)),
        ("psi", object([("choice", Value::from(psi_label(cfg.psi))), ("value", num(psi))])),
        (
            "sampler",
            object([
                ("chains", Value::from(s.chains)),
                ("draws", Value::from(s.draws)),
                ("warmup", Value::from(s.warmup)),
                ("retained", Value::from(s.retained())),
                ("seed", Value::from(s.seed)),
                ("acceptance_rate", nums(chains.acceptance_rate.iter().copied())),
            ]),
        ),
        ("parameters", output::summarize(&chains, &f.labels())?),
    ]);
    let summary_path = cfg.out.join("summary.json");
    output::write_json(&summary_path, &summary)?;
    Ok(vec![chains_path, summary_path])
}

fn cmd_laplace(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let f = Fitted::new(cfg)?;
    let psi = f.psi(cfg.psi)?;
    let spec = f.spec(cfg, psi)?;
    let la = laplace_approx(&spec, &f.input.data, &f.fit)?;
    let value = object([
        ("model", model_json(cfg, &f)),
        ("psi", object([("choice", Value::from(psi_label(cfg.psi))), ("value", num(psi))])),
        ("mean", nums(la.mean.iter().copied())),
        ("sd", nums(la.sd().iter().copied())),
        ("covariance", matrix(&la.covariance)),
    ]);
    let path = cfg.out.join("laplace.json");
    output::write_json(&path, &value)?;
    Ok(vec![path])
}

fn cmd_dispersion(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let f = Fitted::new(cfg)?;
    let n = f.input.data.n();
    let entry = |v: Option<f64>| {
        object([("psi", opt(v)), ("coarsening", v.map_or(Value::Null, |v| coarsening(v, n)))])
    };
    let value = object([
        ("model", model_json(cfg, &f)),
        ("mom", entry(Some(f.fit.psi_hat))),
        ("llb", entry(f.llb)),
        ("grouped", entry(f.grouped)),
        ("perfect_fit", Value::from(f.fit.perfect_fit)),
    ]);
    let path = cfg.out.join("dispersion.json");
    output::write_json(&path, &value)?;
    Ok(vec![path])
}

fn cmd_coverage(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let gen = cfg.generator()?;
    let reports = run_coverage_study(&gen, &cfg.methods, cfg.replicates, &cfg.sampler, cfg.sampler.seed)?;
    let coverage = cfg.out.join("coverage.csv");
    output::write_coverage_csv(&coverage, &reports)?;
    let means = cfg.out.join("posterior_means.csv");
    output::write_posterior_means_csv(&means, &reports)?;
    Ok(vec![coverage, means])
}

/// Runs one command and returns the files it wrote.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    match cfg.command {
        CommandKind::Fit => cmd_fit(cfg),
        CommandKind::Sample => cmd_sample(cfg),
        CommandKind::Laplace => cmd_laplace(cfg),
        CommandKind::Dispersion => cmd_dispersion(cfg),
        CommandKind::Coverage => cmd_coverage(cfg),
    }
}

//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use quasipost::sim::GeneratorSpec;
use quasipost::{LinkFunction, Method, Prior, SamplerConfig, VarianceFunction};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "quasipost", version, about = "Quasi-posterior inference for GLMs specified by mean and variance")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Fit,
    Sample,
    Laplace,
    Dispersion,
    Coverage,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum quasi-likelihood fit; writes fit.json.
    Fit(Options),
    /// Random-walk Metropolis on the quasi-posterior; writes chains.csv and summary.json.
    Sample(Options),
    /// Gaussian approximation at the fit; writes laplace.json.
    Laplace(Options),
    /// Dispersion estimates and the matching coarsening parameter; writes dispersion.json.
    Dispersion(Options),
    /// Replicated coverage study on a synthetic design; writes coverage.csv.
    Coverage(Options),
}

impl Command {
    pub fn split(self) -> (CommandKind, Options) {
        match self {
            Command::Fit(o) => (CommandKind::Fit, o),
            Command::Sample(o) => (CommandKind::Sample, o),
            Command::Laplace(o) => (CommandKind::Laplace, o),
            Command::Dispersion(o) => (CommandKind::Dispersion, o),
            Command::Coverage(o) => (CommandKind::Coverage, o),
        }
    }
}

/// Every flag is also accepted as a key in the `--config` file.
#[derive(Debug, Default, Clone, Args)]
pub struct Options {
    /// Flat `key = value` file; flags given here override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Headered CSV input.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub response: Option<String>,
    /// Comma-separated columns; `1` is the intercept. Default: `1` and every other column.
    #[arg(long)]
    pub covariates: Option<String>,
    /// Column of group labels for the random-intercept model.
    #[arg(long)]
    pub groups: Option<String>,
    /// identity | log | logit (default: canonical for the variance).
    #[arg(long)]
    pub link: Option<String>,
    /// constant | mu | mu_sq | mu_pow | exp_mu | binom | binom_sq | binom_pow | nb
    #[arg(long)]
    pub variance: Option<String>,
    /// Parameter of mu_pow (p), binom_pow (q) or nb (k).
    #[arg(long)]
    pub variance_param: Option<String>,
    /// mom | llb | fixed:<value>
    #[arg(long)]
    pub psi: Option<String>,
    /// flat | normal:<mean>,<sd>
    #[arg(long)]
    pub prior: Option<String>,
    /// half_normal:<scale> prior on the random-intercept sd.
    #[arg(long)]
    pub prior_sigma: Option<String>,
    #[arg(long)]
    pub chains: Option<String>,
    /// Iterations per chain, warmup included.
    #[arg(long)]
    pub draws: Option<String>,
    #[arg(long)]
    pub warmup: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<String>,
    /// het_gaussian | rounded_gamma_counts
    #[arg(long)]
    pub design: Option<String>,
    #[arg(long)]
    pub replicates: Option<String>,
    /// Sample size of the synthetic design.
    #[arg(long)]
    pub n: Option<String>,
    /// True dispersion of the synthetic design.
    #[arg(long)]
    pub psi0: Option<String>,
    /// Comma-separated: quasi_posterior, misspecified_reference.
    #[arg(long)]
    pub methods: Option<String>,
}

const KEYS: [&str; 20] = [
    "data", "response", "covariates", "groups", "link", "variance", "variance-param", "psi", "prior",
    "prior-sigma", "chains", "draws", "warmup", "seed", "out", "design", "replicates", "n", "psi0",
    "methods",
];

impl Options {
    fn entries(&self) -> BTreeMap<&'static str, String> {
        let fields = [
            ("data", &self.data),
            ("response", &self.response),
            ("covariates", &self.covariates),
            ("groups", &self.groups),
            ("link", &self.link),
            ("variance", &self.variance),
            ("variance-param", &self.variance_param),
            ("psi", &self.psi),
            ("prior", &self.prior),
            ("prior-sigma", &self.prior_sigma),
            ("chains", &self.chains),
            ("draws", &self.draws),
            ("warmup", &self.warmup),
            ("seed", &self.seed),
            ("out", &self.out),
            ("design", &self.design),
            ("replicates", &self.replicates),
            ("n", &self.n),
            ("psi0", &self.psi0),
            ("methods", &self.methods),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect()
    }
}

/// Parses `key = value` lines; `#` starts a comment, keys accept `_` or `-`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<&'static str, String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got '{line}'")))?;
        let key = key.trim().replace('_', "-");
        let key = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err(format!("unknown key '{key}'")))?;
        out.insert(*key, value.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiChoice {
    Mom,
    Llb,
    Fixed(f64),
}

impl FromStr for PsiChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mom" => Ok(PsiChoice::Mom),
            "llb" => Ok(PsiChoice::Llb),
            _ => {
                let v = s
                    .strip_prefix("fixed:")
                    .ok_or_else(|| format!("expected mom, llb or fixed:<value>, got '{s}'"))?;
                let v: f64 = v.trim().parse().map_err(|_| format!("bad dispersion '{v}'"))?;
                if v > 0.0 && v.is_finite() {
                    Ok(PsiChoice::Fixed(v))
                } else {
                    Err(format!("fixed dispersion must be positive, got {v}"))
                }
            }
        }
    }
}

/// Prior on β before the dimension is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorChoice {
    Flat,
    Normal { mean: f64, sd: f64 },
}

impl PriorChoice {
    pub fn build(self, p: usize) -> quasipost::Result<Prior> {
        match self {
            PriorChoice::Flat => Ok(Prior::Flat),
            PriorChoice::Normal { mean, sd } => Prior::gaussian_iid(mean, sd, p),
        }
    }
}

impl FromStr for PriorChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "flat" {
            return Ok(PriorChoice::Flat);
        }
        let rest = s
            .strip_prefix("normal:")
            .ok_or_else(|| format!("expected flat or normal:<mean>,<sd>, got '{s}'"))?;
        let (m, sd) = rest.split_once(',').ok_or_else(|| format!("expected normal:<mean>,<sd>, got '{s}'"))?;
        let mean: f64 = m.trim().parse().map_err(|_| format!("bad prior mean '{m}'"))?;
        let sd: f64 = sd.trim().parse().map_err(|_| format!("bad prior sd '{sd}'"))?;
        if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
            return Err(format!("prior needs a finite mean and positive sd, got '{s}'"));
        }
        Ok(PriorChoice::Normal { mean, sd })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    HetGaussian,
    RoundedGammaCounts,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub data: Option<PathBuf>,
    pub response: Option<String>,
    /// `None` means intercept plus every remaining column.
    pub covariates: Option<Vec<String>>,
    pub groups: Option<String>,
    pub link: LinkFunction,
    pub variance: VarianceFunction,
    pub psi: PsiChoice,
    pub prior: PriorChoice,
    pub prior_sigma: Prior,
    pub sampler: SamplerConfig,
    pub out: PathBuf,
    pub design: Option<Design>,
    pub replicates: usize,
    pub n: Option<usize>,
    pub psi0: Option<f64>,
    pub methods: Vec<Method>,
}

fn canonical_link(v: &VarianceFunction) -> LinkFunction {
    match v {
        VarianceFunction::Constant | VarianceFunction::ExpMu => LinkFunction::Identity,
        VarianceFunction::Binom | VarianceFunction::BinomSq | VarianceFunction::BinomPow(_) => {
            LinkFunction::Logit
        }
        _ => LinkFunction::Log,
    }
}

fn parse<T: FromStr>(settings: &BTreeMap<&str, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    settings
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Usage(format!("invalid value '{v}' for --{key}: {e}")))
        })
        .transpose()
}

impl RunConfig {
    pub fn resolve(command: CommandKind, options: &Options) -> Result<Self> {
        let mut settings = match &options.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        settings.extend(options.entries());
        Self::from_settings(command, &settings)
    }

    pub fn from_settings(command: CommandKind, s: &BTreeMap<&str, String>) -> Result<Self> {
        let list = |key: &str| {
            s.get(key).map(|v| {
                v.split(',')
                    .map(|c| c.trim().to_string())
                    .filter(|c| !c.is_empty())
                    .collect::<Vec<_>>()
            })
        };
        let variance_param: Option<f64> = parse(s, "variance-param")?;
        let variance = match s.get("variance") {
            Some(name) => VarianceFunction::from_name(name, variance_param)?,
            None => VarianceFunction::Constant,
        };
        let link = match parse::<LinkFunction>(s, "link")? {
            Some(l) => l,
            None => canonical_link(&variance),
        };
        let defaults = SamplerConfig::default();
        let sampler = SamplerConfig {
            chains: parse(s, "chains")?.unwrap_or(defaults.chains),
            draws: parse(s, "draws")?.unwrap_or(defaults.draws),
            warmup: parse(s, "warmup")?.unwrap_or(defaults.warmup),
            seed: parse(s, "seed")?.unwrap_or(defaults.seed),
        };
        if sampler.chains == 0 || sampler.draws <= sampler.warmup {
            return Err(CliError::Usage(format!(
                "need --chains ≥ 1 and --draws > --warmup (draws count warmup iterations), got chains {} draws {} warmup {}",
                sampler.chains, sampler.draws, sampler.warmup
            )));
        }
        let prior_sigma = match s.get("prior-sigma") {
            None => Prior::half_normal(1.0)?,
            Some(v) => {
                let scale = v
                    .strip_prefix("half_normal:")
                    .and_then(|x| x.trim().parse::<f64>().ok())
                    .ok_or_else(|| CliError::Usage(format!("invalid value '{v}' for --prior-sigma: expected half_normal:<scale>")))?;
                Prior::half_normal(scale)?
            }
        };
        let design = match s.get("design").map(String::as_str) {
            None => None,
            Some("het_gaussian") => Some(Design::HetGaussian),
            Some("rounded_gamma_counts") => Some(Design::RoundedGammaCounts),
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "invalid value '{other}' for --design: expected het_gaussian or rounded_gamma_counts"
                )))
            }
        };
        let methods = match list("methods") {
            None => vec![Method::QuasiPosterior, Method::MisspecifiedReference],
            Some(names) => names
                .iter()
                .map(|m| m.parse::<Method>())
                .collect::<quasipost::Result<Vec<_>>>()?,
        };
        let cfg = RunConfig {
            command,
            data: s.get("data").map(PathBuf::from),
            response: s.get("response").cloned(),
            covariates: list("covariates"),
            groups: s.get("groups").cloned(),
            link,
            variance,
            psi: parse(s, "psi")?.unwrap_or(PsiChoice::Mom),
            prior: parse(s, "prior")?.unwrap_or(PriorChoice::Flat),
            prior_sigma,
            sampler,
            out: s.get("out").map_or_else(|| PathBuf::from("."), PathBuf::from),
            design,
            replicates: parse(s, "replicates")?.unwrap_or(100),
            n: parse(s, "n")?,
            psi0: parse(s, "psi0")?,
            methods,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.command == CommandKind::Coverage {
            if self.design.is_none() {
                return Err(CliError::Usage("coverage needs --design".into()));
            }
            if self.replicates == 0 || self.methods.is_empty() {
                return Err(CliError::Usage("coverage needs --replicates ≥ 1 and at least one method".into()));
            }
        } else {
            if self.data.is_none() {
                return Err(CliError::Usage("missing --data".into()));
            }
            if self.response.is_none() {
                return Err(CliError::Usage("missing --response".into()));
            }
        }
        if matches!(self.covariates.as_deref(), Some([])) {
            return Err(CliError::Usage("--covariates lists no columns".into()));
        }
        Ok(())
    }

    /// Synthetic design for the coverage command, with overrides applied.
    pub fn generator(&self) -> Result<GeneratorSpec> {
        let mut gen = match self.design {
            Some(Design::HetGaussian) => GeneratorSpec::het_gaussian(),
            Some(Design::RoundedGammaCounts) => GeneratorSpec::rounded_gamma_counts(),
            None => return Err(CliError::Usage("coverage needs --design".into())),
        };
        let n = self.n.unwrap_or(gen.n);
        let psi0 = self.psi0.unwrap_or(gen.psi0);
        gen = GeneratorSpec::new(gen.kind, gen.beta0, psi0, n)?;
        Ok(gen)
    }
}

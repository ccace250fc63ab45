use super::sampler::ChainSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub rhat: Vec<f64>,
    pub ess: Vec<f64>,
    /// `sd / √ess`; infinite when `ess` is 0.
    pub mcse: Vec<f64>,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 {
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Gelman–Rubin statistic on chains split in half.
///
/// Returns `+∞` when the within-chain variance vanishes or there are too few
/// draws to split.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let half = chains.iter().map(Vec::len).min().unwrap_or(0) / 2;
    if half < 2 {
        return f64::INFINITY;
    }
    let mut pieces: Vec<&[f64]> = Vec::with_capacity(2 * chains.len());
    for c in chains {
        let n = c.len();
        pieces.push(&c[..half]);
        pieces.push(&c[n - half..]);
    }
    let stats: Vec<(f64, f64)> = pieces.iter().map(|p| mean_var(p)).collect();
    let m = stats.len() as f64;
    let n = half as f64;
    let w = stats.iter().map(|s| s.1).sum::<f64>() / m;
    let grand = stats.iter().map(|s| s.0).sum::<f64>() / m;
    let b = n * stats.iter().map(|s| (s.0 - grand).powi(2)).sum::<f64>() / (m - 1.0);
    if !(w > 0.0) || !w.is_finite() {
        return f64::INFINITY;
    }
    let var_plus = (n - 1.0) / n * w + b / n;
    (var_plus / w).sqrt()
}

/// Multi-chain effective sample size with Geyer's initial monotone sequence
/// truncation; 0 for constant chains, capped at `N log10 N`.
pub fn effective_sample_size(chains: &[Vec<f64>]) -> f64 {
    let n = chains.iter().map(Vec::len).min().unwrap_or(0);
    let m = chains.len();
    if n < 2 || m == 0 {
        return 0.0;
    }
    let chains: Vec<&[f64]> = chains.iter().map(|c| &c[..n]).collect();
    let stats: Vec<(f64, f64)> = chains.iter().map(|c| mean_var(c)).collect();
    let nf = n as f64;
    let w = stats.iter().map(|s| s.1).sum::<f64>() / m as f64;
    if !(w > 0.0) || !w.is_finite() {
        return 0.0;
    }
    let var_plus = if m > 1 {
        let grand = stats.iter().map(|s| s.0).sum::<f64>() / m as f64;
        let b_over_n = stats.iter().map(|s| (s.0 - grand).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        (nf - 1.0) / nf * w + b_over_n
    } else {
        (nf - 1.0) / nf * w
    };

    let rho = |lag: usize| -> f64 {
        let mean_acov = chains
            .iter()
            .zip(&stats)
            .map(|(c, s)| {
                let mu = s.0;
                c[..n - lag]
                    .iter()
                    .zip(&c[lag..])
                    .map(|(a, b)| (a - mu) * (b - mu))
                    .sum::<f64>()
                    / nf
            })
            .sum::<f64>()
            / m as f64;
        1.0 - (w - mean_acov) / var_plus
    };

    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = rho(lag) + rho(lag + 1);
        if !(pair > 0.0) {
            break;
        }
        let pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        lag += 2;
    }
    let total = (m * n) as f64;
    let cap = total * total.log10().max(1.0);
    if !(tau > 0.0) {
        return cap;
    }
    (total / tau).min(cap)
}

/// Split-R̂, effective sample size and Monte Carlo standard error per
/// parameter over the retained draws.
pub fn diagnostics(chains: &ChainSet) -> Diagnostics {
    let d = chains.dim();
    let mut out = Diagnostics {
        rhat: Vec::with_capacity(d),
        ess: Vec::with_capacity(d),
        mcse: Vec::with_capacity(d),
    };
    for j in 0..d {
        let per_chain = chains.param_by_chain(j);
        let pooled: Vec<f64> = per_chain.iter().flatten().copied().collect();
        let sd = mean_var(&pooled).1.sqrt();
        let ess = effective_sample_size(&per_chain);
        out.rhat.push(split_rhat(&per_chain));
        out.ess.push(ess);
        out.mcse.push(if ess > 0.0 { sd / ess.sqrt() } else { f64::INFINITY });
    }
    out
}

//! File formats: JSON with 17 significant digits, chains.csv, coverage.csv.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use quasipost::sim::COVERAGE_LEVELS;
use quasipost::{credible_sets, diagnostics, ChainSet, CoverageReport, IntervalKind};
use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

pub const SUMMARY_LEVELS: [f64; 3] = COVERAGE_LEVELS;

/// Finite values as 17-significant-digit numbers, everything else as null.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&format!("{v:.16e}")).expect("valid JSON number"))
    } else {
        Value::Null
    }
}

pub fn nums(v: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(v.into_iter().map(num).collect())
}

pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(m.row_iter().map(|r| nums(r.iter().copied())).collect())
}

pub fn object<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn param_names(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("param_{j}")).collect()
}

/// `chain,draw,param_1..param_d`, one row per retained draw, chains and
/// draws numbered from 1. Values use the shortest exact representation.
pub fn write_chains_csv(path: &Path, chains: &ChainSet) -> Result<()> {
    let io = |e| CliError::io(path, e);
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
    let mut header = String::from("chain,draw");
    for name in param_names(chains.dim()) {
        header.push(',');
        header.push_str(&name);
    }
    writeln!(out, "{header}").map_err(io)?;
    for (c, m) in chains.draws.iter().enumerate() {
        for (s, row) in m.row_iter().enumerate() {
            write!(out, "{},{}", c + 1, s + 1).map_err(io)?;
            for v in row.iter() {
                write!(out, ",{v}").map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Reads chains.csv back into per-chain draw matrices.
pub fn read_chains_csv(path: &Path) -> Result<Vec<DMatrix<f64>>> {
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| parse_err(0, e.to_string()))?;
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let d = headers.len().saturating_sub(2);
    if d == 0 || &headers[0] != "chain" || &headers[1] != "draw" {
        return Err(parse_err(1, "expected header chain,draw,param_1..param_d".into()));
    }
    let mut per_chain: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let chain: usize = record[0].parse().map_err(|_| parse_err(line, format!("bad chain '{}'", &record[0])))?;
        if chain == 0 || chain > per_chain.len() + 1 {
            return Err(parse_err(line, format!("chain {chain} out of order")));
        }
        if chain > per_chain.len() {
            per_chain.push(Vec::new());
        }
        for v in record.iter().skip(2) {
            let x: f64 = v.parse().map_err(|_| parse_err(line, format!("bad value '{v}'")))?;
            per_chain[chain - 1].push(x);
        }
    }
    Ok(per_chain
        .into_iter()
        .map(|flat| DMatrix::from_row_slice(flat.len() / d, d, &flat))
        .collect())
}

/// `{"0.90": [lower, upper], ...}` for parameter `j`.
fn intervals(j: usize, sets: &[Vec<quasipost::Interval>]) -> Value {
    Value::Object(
        SUMMARY_LEVELS
            .iter()
            .zip(sets)
            .map(|(level, set)| (format!("{level:.2}"), nums([set[j].lower, set[j].upper])))
            .collect(),
    )
}

/// Per-parameter posterior summaries; a pure function of the draws.
pub fn summarize(chains: &ChainSet, labels: &[String]) -> Result<Value> {
    let diag = diagnostics(chains);
    let mean = chains.mean();
    let sd = chains.sd();
    let mut by_kind = Vec::new();
    for kind in [IntervalKind::EqualTailed, IntervalKind::Hpd] {
        let sets = SUMMARY_LEVELS
            .iter()
            .map(|&level| credible_sets(chains, level, kind).map(|s| s.intervals))
            .collect::<quasipost::Result<Vec<_>>>()?;
        by_kind.push(sets);
    }
    let params = param_names(chains.dim())
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            object([
                ("name", Value::from(name)),
                ("label", Value::from(labels.get(j).cloned().unwrap_or_default())),
                ("mean", num(mean[j])),
                ("sd", num(sd[j])),
                ("rhat", num(diag.rhat[j])),
                ("ess", num(diag.ess[j])),
                ("mcse", num(diag.mcse[j])),
                ("equal_tailed", intervals(j, &by_kind[0])),
                ("hpd", intervals(j, &by_kind[1])),
            ])
        })
        .collect();
    Ok(Value::Array(params))
}

/// `method,level,coefficient,coverage,replicates,failures`.
pub fn write_coverage_csv(path: &Path, reports: &[CoverageReport]) -> Result<()> {
    let mut text = String::from("method,level,coefficient,coverage,replicates,failures\n");
    for rep in reports {
        for (l, level) in rep.levels.iter().enumerate() {
            for (j, c) in rep.coverage[l].iter().enumerate() {
                text.push_str(&format!(
                    "{},{level:.2},beta_{},{c},{},{}\n",
                    rep.method,
                    j + 1,
                    rep.replicates,
                    rep.failures
                ));
            }
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Tidy posterior means per replicate, for spread plots.
pub fn write_posterior_means_csv(path: &Path, reports: &[CoverageReport]) -> Result<()> {
    let mut text = String::from("method,replicate,coefficient,posterior_mean\n");
    for rep in reports {
        for (r, means) in rep.posterior_means.iter().enumerate() {
            for (j, m) in means.iter().enumerate() {
                text.push_str(&format!("{},{},beta_{},{m}\n", rep.method, r + 1, j + 1));
            }
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

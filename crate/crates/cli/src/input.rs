//! Headered CSV ingestion into a design matrix.

use std::path::{Path, PathBuf};

use quasipost::{Dataset, Error as ModelError, Groups, QuasiModel};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const INTERCEPT: &str = "1";

/// Raw text table; `lines[i]` is the file line of data row `i`.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub lines: Vec<u64>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let parse_err = |line: u64, message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let csv_err = |e: csv::Error| match e.position() {
            Some(pos) => parse_err(pos.line(), e.to_string()),
            None => match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::io(path, io),
                kind => parse_err(0, format!("{kind:?}")),
            },
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(csv_err)?;
        let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(parse_err(1, "missing header row".into()));
        }
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let line = record.position().map_or(0, |p| p.line());
            if let Some(j) = record.iter().position(str::is_empty) {
                return Err(parse_err(line, format!("blank value in column '{}'", headers[j])));
            }
            rows.push(record.iter().map(str::to_string).collect());
            lines.push(line);
        }
        if rows.is_empty() {
            return Err(parse_err(1, "no data rows".into()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            headers,
            rows,
            lines,
        })
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| CliError::MissingColumn {
            path: self.path.clone(),
            column: name.to_string(),
            available: self.headers.join(", "),
        })
    }

    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        self.rows
            .iter()
            .zip(&self.lines)
            .map(|(row, &line)| {
                let v = &row[j];
                match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(CliError::Parse {
                        path: self.path.clone(),
                        line,
                        message: format!("column '{name}': '{v}' is not a finite number"),
                    }),
                }
            })
            .collect()
    }
}

/// Dataset plus the bookkeeping needed to report back in file terms.
#[derive(Debug, Clone)]
pub struct Input {
    pub data: Dataset,
    pub covariates: Vec<String>,
    pub group_labels: Option<Vec<String>>,
    pub path: PathBuf,
    pub lines: Vec<u64>,
}

impl Input {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let path = cfg.data.as_ref().ok_or_else(|| CliError::Usage("missing --data".into()))?;
        let response = cfg.response.as_ref().ok_or_else(|| CliError::Usage("missing --response".into()))?;
        let table = Table::read(path)?;
        let y = table.numeric_column(response)?;
        let covariates = match &cfg.covariates {
            Some(c) => c.clone(),
            None => std::iter::once(INTERCEPT.to_string())
                .chain(
                    table
                        .headers
                        .iter()
                        .filter(|h| *h != response && Some(*h) != cfg.groups.as_ref())
                        .cloned(),
                )
                .collect(),
        };
        let columns = covariates
            .iter()
            .map(|c| {
                if c == INTERCEPT {
                    Ok(vec![1.0; y.len()])
                } else {
                    table.numeric_column(c)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = (0..y.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let mut data = Dataset::from_rows(y, &rows)?;
        let mut group_labels = None;
        if let Some(g) = &cfg.groups {
            let j = table.column_index(g)?;
            let labels: Vec<&str> = table.rows.iter().map(|r| r[j].as_str()).collect();
            let (groups, names): (Groups, Vec<String>) = Groups::from_labels(&labels);
            data = data.with_groups(groups)?;
            group_labels = Some(names);
        }
        Ok(Self {
            data,
            covariates,
            group_labels,
            path: table.path,
            lines: table.lines,
        })
    }

    /// Checks the response against the family restrictions, reporting the
    /// offending file line.
    pub fn validate(&self, model: &QuasiModel) -> Result<()> {
        model.validate(&self.data).map_err(|e| self.locate(e))
    }

    pub fn locate(&self, e: ModelError) -> CliError {
        match e {
            ModelError::Restriction { index, message } => CliError::Restriction {
                path: self.path.clone(),
                line: self.lines[index],
                message: format!("{message}, got y = {}", self.data.y()[index]),
            },
            e => e.into(),
        }
    }
}

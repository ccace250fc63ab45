use std::path::PathBuf;

use quasipost::Error as ModelError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },

    #[error("schema error in {path}: column '{column}' not found (available: {available})")]
    MissingColumn { path: PathBuf, column: String, available: String },

    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    /// A restriction of the variance family, located in the input file.
    #[error("{path}: line {line}: {message}")]
    Restriction { path: PathBuf, line: u64, message: String },

    /// Numerically degenerate input that the core library does not reject.
    #[error("{0}")]
    Numerical(String),

    #[error("{}", describe(.0))]
    Model(#[from] ModelError),
}

fn describe(e: &ModelError) -> String {
    match e {
        ModelError::Diverged { last_iterate, .. } => format!("{e}; last iterate {last_iterate:?}"),
        _ => e.to_string(),
    }
}

impl CliError {
    /// 2 for anything wrong with the inputs, 3 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(e) => match e {
                ModelError::InvalidArgument(_)
                | ModelError::Restriction { .. }
                | ModelError::DegreesOfFreedom { .. } => 2,
                _ => 3,
            },
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

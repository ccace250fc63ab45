//! Command-line front end: CSV in, JSON and CSV out.
//!
//! Exit codes: 0 on success, 2 for invalid input or configuration, 3 when
//! the numerics fail (divergence, singular information, failed studies).

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod output;

use std::path::PathBuf;

pub use config::{Cli, Command, CommandKind, Options, RunConfig};
pub use error::{CliError, Result};

pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let (kind, options) = cli.command.split();
    let cfg = RunConfig::resolve(kind, &options)?;
    commands::execute(&cfg)
}

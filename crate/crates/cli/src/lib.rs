//! Command-line front end: config files, scenario runs, sweeps, checks and
//! pinned reproductions.

pub mod commands;
pub mod config;
pub mod reproduce;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::{cmd_run, cmd_sweep, cmd_verify, Overrides};
pub use config::{Config, ConfigError};
pub use reproduce::cmd_reproduce;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] maxbid_core::Error),
    #[error("{0}")]
    Usage(String),
    /// A reproduction diverged from its stored expectation.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 1 for a failed expectation, 2 for anything that prevented the check.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            _ => 2,
        }
    }
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut config = Config::parse(&text).map_err(|source| CliError::Config { path: path.to_path_buf(), source })?;
    overrides.apply(&mut config);
    Ok(config)
}

/// Sizes the global worker pool once.
pub fn set_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

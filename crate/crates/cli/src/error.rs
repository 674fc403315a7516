use std::path::PathBuf;

use octavic::cusps::OcttError;
use octavic::exactla::ExactLaError;
use thiserror::Error;

use crate::config::ConfigError;
use crate::parse::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Octt { path: PathBuf, source: OcttError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Rank(#[from] ExactLaError),
    #[error("invalid mathematical input: {0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Io { .. } | CliError::Octt { .. } | CliError::Config(ConfigError::Io { .. }) => 2,
            CliError::Usage(_) | CliError::Parse(_) | CliError::Config(_) => 3,
            CliError::Rank(
                ExactLaError::NotPrime(_) | ExactLaError::NotOneModFour(_) | ExactLaError::PrimeTooLarge(_),
            ) => 3,
            CliError::Rank(_) | CliError::Math(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },

    #[error("malformed config {path}: {source}")]
    ParseConfig { path: PathBuf, source: toml::de::Error },

    #[error("invalid initial data: {0}")]
    InitialData(String),

    #[error(transparent)]
    Core(#[from] frac_pp::Error),

    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Category printed as `error[category]` on stderr.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_)
            | CliError::ReadConfig { .. }
            | CliError::ParseConfig { .. }
            | CliError::InitialData(_) => "config",
            CliError::Core(e) => e.category(),
            CliError::Io(_) | CliError::Csv(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "guard" => 3,
            "solver" => 4,
            _ => 1,
        }
    }
}

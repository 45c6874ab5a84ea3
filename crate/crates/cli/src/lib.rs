//! Command-line front end: configuration, run modes and CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{Mode, Overrides, RunConfig};
pub use error::CliError;
pub use run::run_mode;

#[derive(Debug, Parser)]
#[command(name = "frac-pp", version, about = "Fractional predator-prey reaction-diffusion solver")]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// TOML file with flat keys; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

impl Cli {
    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&self.overrides);
        cfg.mode = self.mode;
        Ok(cfg)
    }
}

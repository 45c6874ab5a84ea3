//! Run configuration: a flat TOML file whose keys can each be overridden by
//! a command-line flag of the same name.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use frac_pp::{BoundsConfig, GridSpec, GuardMode, Guards, ModelParams, Scheme};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Simulate,
    ConvergeTime,
    ConvergeSpace,
    Stability,
    WeightsDump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Centered,
    Wsgd,
}

impl From<SchemeChoice> for Scheme {
    fn from(s: SchemeChoice) -> Self {
        match s {
            SchemeChoice::Centered => Scheme::Centered,
            SchemeChoice::Wsgd => Scheme::Wsgd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GuardSetting {
    Off,
    #[default]
    #[serde(alias = "on")]
    #[value(alias = "on")]
    Monitor,
    Strict,
}

impl From<GuardSetting> for GuardMode {
    fn from(g: GuardSetting) -> Self {
        match g {
            GuardSetting::Off => GuardMode::Off,
            GuardSetting::Monitor => GuardMode::Monitor,
            GuardSetting::Strict => GuardMode::Strict,
        }
    }
}

/// Coefficient table written by `weights-dump`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightFamily {
    Caputo,
    Centered,
    Wsgd,
}

impl WeightFamily {
    pub fn name(self) -> &'static str {
        match self {
            WeightFamily::Caputo => "caputo",
            WeightFamily::Centered => "centered",
            WeightFamily::Wsgd => "wsgd",
        }
    }
}

/// Built-in initial data name.
pub const PAPER_IC: &str = "paper-ic";

/// Default `tau` of spatial studies and its full-resolution counterpart.
pub const DESK_TAU: f64 = 5e-4;
pub const PAPER_EXACT_TAU: f64 = 1e-4;
/// Default `h` of temporal studies.
pub const TIME_STUDY_H: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub scheme: SchemeChoice,

    pub alpha: f64,
    pub beta: f64,
    pub d1: f64,
    pub d2: f64,
    pub rho_q: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub delta: f64,

    pub left: f64,
    pub right: f64,
    pub m_intervals: usize,
    pub n_steps: usize,
    pub t_final: f64,

    pub guards: GuardSetting,
    /// Predator cap; `1/gamma + 1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predator_cap: Option<f64>,

    /// `paper-ic` or a CSV of node values with columns `x, N, P`.
    pub initial: String,
    pub out_dir: PathBuf,
    pub snapshot_stride: usize,
    pub dump_matrix: bool,

    /// Refined step sizes of a convergence study.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    /// Step size held fixed in a convergence study.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_step: Option<f64>,
    pub paper_exact: bool,

    pub epsilons: Vec<f64>,
    pub taus: Vec<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<WeightFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,

    /// Worker threads; all available cores when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ModelParams::reference();
        RunConfig {
            mode: Mode::Simulate,
            scheme: SchemeChoice::Centered,
            alpha: p.alpha,
            beta: p.beta,
            d1: p.d1,
            d2: p.d2,
            rho_q: p.rho_q,
            sigma: p.sigma,
            gamma: p.gamma,
            kappa: p.kappa,
            delta: p.delta,
            left: 0.0,
            right: 1.0,
            m_intervals: 100,
            n_steps: 100,
            t_final: 1.0,
            guards: GuardSetting::Monitor,
            predator_cap: None,
            initial: PAPER_IC.to_string(),
            out_dir: PathBuf::from("out"),
            snapshot_stride: 1,
            dump_matrix: false,
            levels: None,
            fixed_step: None,
            paper_exact: false,
            epsilons: vec![1e-3, 1e-6],
            taus: vec![0.02, 0.01, 0.005],
            family: None,
            count: None,
            threads: None,
            verbose: false,
        }
    }
}

/// Command-line overrides; each flag wins over the config key of the same
/// name.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeChoice>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    #[arg(long)]
    pub rho_q: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub left: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub right: Option<f64>,
    /// Number of spatial subintervals.
    #[arg(long = "M", visible_alias = "m-intervals")]
    pub m_intervals: Option<usize>,
    /// Number of time steps.
    #[arg(long = "steps", visible_alias = "n-steps")]
    pub n_steps: Option<usize>,
    /// Final time.
    #[arg(long = "T", visible_alias = "t-final")]
    pub t_final: Option<f64>,
    #[arg(long, value_enum)]
    pub guards: Option<GuardSetting>,
    /// Abort at the first bound violation (same as `--guards strict`).
    #[arg(long)]
    pub strict_bounds: bool,
    #[arg(long)]
    pub predator_cap: Option<f64>,
    /// `paper-ic` or a CSV file with columns x, N, P.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long = "out", visible_alias = "out-dir")]
    pub out_dir: Option<PathBuf>,
    #[arg(long = "stride", visible_alias = "snapshot-stride")]
    pub snapshot_stride: Option<usize>,
    /// Also write the two operator matrices.
    #[arg(long)]
    pub dump_matrix: bool,
    /// Comma-separated refinement levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long)]
    pub fixed_step: Option<f64>,
    /// Spatial studies at tau = 1e-4 instead of 5e-4.
    #[arg(long)]
    pub paper_exact: bool,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub family: Option<WeightFamily>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short)]
    pub verbose: bool,
}

macro_rules! take {
    ($cfg:ident, $o:ident, $($f:ident),*) => {
        $(if let Some(v) = $o.$f.clone() { $cfg.$f = v; })*
    };
}

impl RunConfig {
    /// Parses a TOML document; missing keys take their defaults.
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config fields are plain data")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::ReadConfig { path: path.to_path_buf(), source })?;
        Self::from_toml(&text).map_err(|source| CliError::ParseConfig { path: path.to_path_buf(), source })
    }

    pub fn apply(&mut self, o: &Overrides) {
        take!(self, o, scheme, alpha, beta, d1, d2, rho_q, sigma, gamma, kappa, delta);
        take!(self, o, left, right, m_intervals, n_steps, t_final, guards, initial, out_dir, snapshot_stride);
        if o.predator_cap.is_some() {
            self.predator_cap = o.predator_cap;
        }
        if o.levels.is_some() {
            self.levels = o.levels.clone();
        }
        if o.fixed_step.is_some() {
            self.fixed_step = o.fixed_step;
        }
        take!(self, o, epsilons, taus);
        if o.family.is_some() {
            self.family = o.family;
        }
        if o.count.is_some() {
            self.count = o.count;
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        self.strict_or(o.strict_bounds);
        self.dump_matrix |= o.dump_matrix;
        self.paper_exact |= o.paper_exact;
        self.verbose |= o.verbose;
    }

    fn strict_or(&mut self, strict: bool) {
        if strict {
            self.guards = GuardSetting::Strict;
        }
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            alpha: self.alpha,
            beta: self.beta,
            d1: self.d1,
            d2: self.d2,
            rho_q: self.rho_q,
            sigma: self.sigma,
            gamma: self.gamma,
            kappa: self.kappa,
            delta: self.delta,
        }
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        Ok(GridSpec::new(self.left, self.right, self.m_intervals, self.n_steps, self.t_final)?)
    }

    pub fn guards(&self) -> Guards {
        let params = self.params();
        let mut bounds = BoundsConfig::for_params(&params);
        if let Some(cap) = self.predator_cap {
            bounds = bounds.with_predator_cap(cap);
        }
        Guards::new(bounds, self.guards.into())
    }

    /// The step size held fixed by a convergence study.
    pub fn study_fixed_step(&self) -> f64 {
        self.fixed_step.unwrap_or(match self.mode {
            Mode::ConvergeTime => TIME_STUDY_H,
            _ if self.paper_exact => PAPER_EXACT_TAU,
            _ => DESK_TAU,
        })
    }

    pub fn weight_family(&self) -> WeightFamily {
        self.family.unwrap_or(match self.scheme {
            SchemeChoice::Centered => WeightFamily::Centered,
            SchemeChoice::Wsgd => WeightFamily::Wsgd,
        })
    }

    /// Checks every field the selected mode reads.
    pub fn validate(&self) -> Result<(), CliError> {
        let params = self.params();
        params.validate()?;
        self.grid()?;
        if self.guards != GuardSetting::Off {
            self.guards().bounds.validate(&params)?;
        }
        if self.snapshot_stride == 0 {
            return Err(CliError::Config("snapshot_stride must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        match self.mode {
            Mode::ConvergeTime | Mode::ConvergeSpace => {
                let levels = self.levels.as_deref().unwrap_or_default();
                if levels.len() < 2 {
                    return Err(CliError::Config(
                        "convergence modes need `levels` with at least two step sizes".into(),
                    ));
                }
                if levels.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(CliError::Config("levels must be positive".into()));
                }
                let fixed = self.study_fixed_step();
                if !(fixed.is_finite() && fixed > 0.0) {
                    return Err(CliError::Config("fixed_step must be positive".into()));
                }
            }
            Mode::Stability => {
                if self.epsilons.is_empty() || self.taus.is_empty() {
                    return Err(CliError::Config("stability needs non-empty `epsilons` and `taus`".into()));
                }
                if self.taus.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(CliError::Config("taus must be positive".into()));
                }
                if self.epsilons.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(CliError::Config("epsilons must be non-negative".into()));
                }
            }
            Mode::WeightsDump => {
                if self.count == Some(0) {
                    return Err(CliError::Config("count must be at least 1".into()));
                }
            }
            Mode::Simulate => {}
        }
        Ok(())
    }
}

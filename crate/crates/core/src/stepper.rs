//! Semi-implicit time stepping of the coupled system.
//!
//! Each step solves, per species,
//!
//! ```text
//! (I + A) u^{k+1} = sum_{n=1}^{k} (b_{k-n} - b_{k-n+1}) u^n + b_k u^0 + mu (f(N^k, P^k) + s(x, t_{k+1}))
//! ```
//!
//! with diffusion implicit at the new level and the reaction explicit at the
//! old one. The L1 memory term needs every past level, so the full history
//! is kept (linear in the number of steps).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{mu_guard_thresholds, reaction_f1, reaction_f2, BoundsConfig, ModelParams};
use crate::riesz::{assemble_matrix, eliminate_ghosts, OperatorMatrix};
use crate::weights::{caputo_coeffs, CaputoCoeffs, RieszWeights, Scheme};

/// One time level of prey `N` and predator `P` on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub n_field: Vec<f64>,
    pub p_field: Vec<f64>,
    pub time_index: usize,
}

impl FieldPair {
    pub fn new(n_field: Vec<f64>, p_field: Vec<f64>, time_index: usize) -> Result<Self> {
        if n_field.len() != p_field.len() {
            return Err(Error::LengthMismatch { expected: n_field.len(), actual: p_field.len() });
        }
        Ok(FieldPair { n_field, p_field, time_index })
    }

    /// Samples `f(x) -> (N, P)` at the interior nodes; time index 0.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64) -> (f64, f64)) -> Self {
        let (n_field, p_field) = grid.interior_nodes().into_iter().map(f).unzip();
        FieldPair { n_field, p_field, time_index: 0 }
    }

    pub fn constant(len: usize, n: f64, p: f64) -> Self {
        FieldPair { n_field: vec![n; len], p_field: vec![p; len], time_index: 0 }
    }

    /// `N = 0.113585 + 0.0214 cos(pi x)`, `P = 0.471397 + 0.0066 cos(pi x)`.
    pub fn reference_initial(grid: &GridSpec) -> Self {
        Self::from_fn(grid, |x| {
            let c = (std::f64::consts::PI * x).cos();
            (0.113585 + 0.0214 * c, 0.471397 + 0.0066 * c)
        })
    }

    pub fn len(&self) -> usize {
        self.n_field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_field.is_empty()
    }

    /// Both fields shifted by `epsilon` at every node.
    pub fn shifted(&self, epsilon: f64) -> Self {
        FieldPair {
            n_field: self.n_field.iter().map(|v| v + epsilon).collect(),
            p_field: self.p_field.iter().map(|v| v + epsilon).collect(),
            time_index: self.time_index,
        }
    }

    /// Full-grid vectors `u_0 .. u_M` with the Neumann ghost values restored.
    pub fn with_ghosts(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((eliminate_ghosts(&self.n_field)?, eliminate_ghosts(&self.p_field)?))
    }

    pub fn extremes(&self) -> (f64, f64, f64, f64) {
        let (min_n, max_n) = min_max(&self.n_field);
        let (min_p, max_p) = min_max(&self.p_field);
        (min_n, max_n, min_p, max_p)
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Every computed level `0..=k`, stored contiguously per species.
#[derive(Debug, Clone)]
pub struct History {
    dim: usize,
    prey: Vec<f64>,
    predator: Vec<f64>,
    levels: usize,
}

impl History {
    pub fn new(initial: &FieldPair) -> Self {
        History {
            dim: initial.len(),
            prey: initial.n_field.clone(),
            predator: initial.p_field.clone(),
            levels: 1,
        }
    }

    pub fn with_capacity(initial: &FieldPair, levels: usize) -> Self {
        let mut h = Self::new(initial);
        h.prey.reserve(levels.saturating_sub(1) * h.dim);
        h.predator.reserve(levels.saturating_sub(1) * h.dim);
        h
    }

    /// Appends the next level; its time index must equal the current length.
    pub fn push(&mut self, level: &FieldPair) -> Result<()> {
        if level.len() != self.dim || level.p_field.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, actual: level.len() });
        }
        if level.time_index != self.levels {
            return Err(Error::InvalidParameter(format!(
                "history expects level {} but got {}",
                self.levels, level.time_index
            )));
        }
        self.prey.extend_from_slice(&level.n_field);
        self.predator.extend_from_slice(&level.p_field);
        self.levels += 1;
        Ok(())
    }

    /// Number of stored levels.
    pub fn len(&self) -> usize {
        self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.levels == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prey(&self, k: usize) -> &[f64] {
        &self.prey[k * self.dim..(k + 1) * self.dim]
    }

    pub fn predator(&self, k: usize) -> &[f64] {
        &self.predator[k * self.dim..(k + 1) * self.dim]
    }

    pub fn level(&self, k: usize) -> FieldPair {
        FieldPair { n_field: self.prey(k).to_vec(), p_field: self.predator(k).to_vec(), time_index: k }
    }

    pub fn last(&self) -> FieldPair {
        self.level(self.levels - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldPair> + '_ {
        (0..self.levels).map(|k| self.level(k))
    }
}

/// Weights of the memory term at level `k`: entry `n` multiplies `u^n`.
///
/// `b_k` for `n = 0` and `b_{k-n} - b_{k-n+1}` for `1 <= n <= k`. They are
/// non-negative and telescope to `b_0 = 1`.
pub fn history_weights(coeffs: &CaputoCoeffs, k: usize) -> Result<Vec<f64>> {
    if coeffs.len() < k + 1 {
        return Err(Error::TableTooShort { required: k + 1, available: coeffs.len() });
    }
    let b = coeffs.as_slice();
    let mut w = Vec::with_capacity(k + 1);
    w.push(b[k]);
    w.extend((1..=k).map(|n| b[k - n] - b[k - n + 1]));
    Ok(w)
}

/// Memory term of both species at level `k`, premultiplied by `mu`.
pub fn history_rhs(history: &History, coeffs: &CaputoCoeffs, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if history.len() < k + 1 {
        return Err(Error::InsufficientHistory { requested: k, available: history.len() });
    }
    let weights = history_weights(coeffs, k)?;
    let dim = history.dim();
    let mut n_acc = vec![0.0; dim];
    let mut p_acc = vec![0.0; dim];
    for (level, &c) in weights.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (acc, u) in n_acc.iter_mut().zip(history.prey(level)) {
            *acc += c * u;
        }
        for (acc, u) in p_acc.iter_mut().zip(history.predator(level)) {
            *acc += c * u;
        }
    }
    Ok((n_acc, p_acc))
}

/// How bound violations are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuardMode {
    Off,
    /// Record violations in the step reports.
    #[default]
    Monitor,
    /// Abort the run at the first violation.
    Strict,
}

impl fmt::Display for GuardMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuardMode::Off => "off",
            GuardMode::Monitor => "monitor",
            GuardMode::Strict => "strict",
        })
    }
}

impl std::str::FromStr for GuardMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(GuardMode::Off),
            "on" | "monitor" => Ok(GuardMode::Monitor),
            "strict" => Ok(GuardMode::Strict),
            other => Err(format!("unknown guard mode '{other}' (expected off, monitor or strict)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    pub bounds: BoundsConfig,
    pub mode: GuardMode,
}

impl Guards {
    pub fn new(bounds: BoundsConfig, mode: GuardMode) -> Self {
        Guards { bounds, mode }
    }

    pub fn off(params: &ModelParams) -> Self {
        Guards { bounds: BoundsConfig::for_params(params), mode: GuardMode::Off }
    }

    pub fn monitor(params: &ModelParams) -> Self {
        Guards { bounds: BoundsConfig::for_params(params), mode: GuardMode::Monitor }
    }

    pub fn strict(params: &ModelParams) -> Self {
        Guards { bounds: BoundsConfig::for_params(params), mode: GuardMode::Strict }
    }

    /// First node outside the box, described for diagnostics.
    pub fn find_violation(&self, level: &FieldPair) -> Option<String> {
        let b = &self.bounds;
        for (i, (&n, &p)) in level.n_field.iter().zip(&level.p_field).enumerate() {
            if !b.prey_ok(n) {
                return Some(format!(
                    "prey N = {n:e} at interior node {} outside ({}, {}]",
                    i + 1,
                    b.positivity_floor,
                    b.n_upper
                ));
            }
            if !b.predator_ok(p) {
                return Some(format!(
                    "predator P = {p:e} at interior node {} outside ({}, {}]",
                    i + 1,
                    b.positivity_floor,
                    b.p_upper
                ));
            }
        }
        None
    }
}

/// Diagnostics of one computed level.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub time_index: usize,
    pub min_n: f64,
    pub max_n: f64,
    pub min_p: f64,
    pub max_p: f64,
    /// Set iff a bound was breached (and guards are not off).
    pub guard_violation: Option<String>,
    pub residual_n: f64,
    pub residual_p: f64,
}

impl StepReport {
    fn for_level(level: &FieldPair, guards: &Guards, residuals: (f64, f64)) -> Self {
        let (min_n, max_n, min_p, max_p) = level.extremes();
        let guard_violation = match guards.mode {
            GuardMode::Off => None,
            _ => guards.find_violation(level),
        };
        StepReport {
            time_index: level.time_index,
            min_n,
            max_n,
            min_p,
            max_p,
            guard_violation,
            residual_n: residuals.0,
            residual_p: residuals.1,
        }
    }
}

/// Source terms appended to the prey and predator equations.
pub trait Forcing: Send + Sync {
    fn source(&self, x: f64, t: f64) -> (f64, f64);
}

impl<F> Forcing for F
where
    F: Fn(f64, f64) -> (f64, f64) + Send + Sync,
{
    fn source(&self, x: f64, t: f64) -> (f64, f64) {
        self(x, t)
    }
}

/// Factored operators and coefficient tables of one configuration.
///
/// Immutable after construction; one instance can drive any number of runs.
#[derive(Clone)]
pub struct Stepper {
    grid: GridSpec,
    params: ModelParams,
    scheme: Scheme,
    guards: Guards,
    coeffs: CaputoCoeffs,
    weights: RieszWeights,
    mu: f64,
    prey_op: OperatorMatrix,
    predator_op: OperatorMatrix,
    nodes: Vec<f64>,
    forcing: Option<Arc<dyn Forcing>>,
}

impl fmt::Debug for Stepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stepper")
            .field("grid", &self.grid)
            .field("params", &self.params)
            .field("scheme", &self.scheme)
            .field("guards", &self.guards)
            .field("mu", &self.mu)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl Stepper {
    pub fn new(grid: GridSpec, params: ModelParams, scheme: Scheme, guards: Guards) -> Result<Self> {
        grid.validate()?;
        params.validate()?;
        if guards.mode != GuardMode::Off {
            guards.bounds.validate(&params)?;
        }
        let coeffs = caputo_coeffs(params.alpha, grid.n_steps + 1)?;
        let weights = RieszWeights::new(scheme, params.beta, grid.m_intervals + 1)?;
        let mu = params.step_factor(grid.tau());
        let prey_op = assemble_matrix(&weights, params.d1, mu, &grid)?;
        let predator_op = assemble_matrix(&weights, params.d2, mu, &grid)?;
        Ok(Stepper {
            grid,
            params,
            scheme,
            guards,
            coeffs,
            weights,
            mu,
            prey_op,
            predator_op,
            nodes: grid.interior_nodes(),
            forcing: None,
        })
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn guards(&self) -> &Guards {
        &self.guards
    }

    pub fn coeffs(&self) -> &CaputoCoeffs {
        &self.coeffs
    }

    pub fn weights(&self) -> &RieszWeights {
        &self.weights
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn prey_operator(&self) -> &OperatorMatrix {
        &self.prey_op
    }

    pub fn predator_operator(&self) -> &OperatorMatrix {
        &self.predator_op
    }

    /// `(mu_max_n, mu_max_p)` for this configuration.
    pub fn mu_thresholds(&self) -> (f64, f64) {
        let b1 = if self.coeffs.len() > 1 { self.coeffs.get(1) } else { 0.0 };
        mu_guard_thresholds(&self.params, b1)
    }

    /// Whether `mu` lies below both positivity thresholds.
    pub fn mu_within_guard(&self) -> bool {
        let (n_max, p_max) = self.mu_thresholds();
        self.mu < n_max && self.mu < p_max
    }

    /// Computes level `k + 1` from the levels `0..=k` held in `history`.
    pub fn step(&self, history: &History) -> Result<(FieldPair, StepReport)> {
        if history.is_empty() {
            return Err(Error::InsufficientHistory { requested: 0, available: 0 });
        }
        if history.dim() != self.grid.interior_len() {
            return Err(Error::LengthMismatch { expected: self.grid.interior_len(), actual: history.dim() });
        }
        let k = history.len() - 1;
        let (mut rhs_n, mut rhs_p) = history_rhs(history, &self.coeffs, k)?;
        let (n_old, p_old) = (history.prey(k), history.predator(k));
        let t_next = self.grid.time(k + 1);
        for i in 0..rhs_n.len() {
            let (n, p) = (n_old[i], p_old[i]);
            let (mut fn_, mut fp) = (reaction_f1(n, p, &self.params), reaction_f2(n, p, &self.params));
            if let Some(src) = &self.forcing {
                let (sn, sp) = src.source(self.nodes[i], t_next);
                fn_ += sn;
                fp += sp;
            }
            rhs_n[i] += self.mu * fn_;
            rhs_p[i] += self.mu * fp;
        }
        let (n_new, res_n) = self.prey_op.solve_with_residual(&rhs_n)?;
        let (p_new, res_p) = self.predator_op.solve_with_residual(&rhs_p)?;
        let level = FieldPair { n_field: n_new, p_field: p_new, time_index: k + 1 };
        let report = StepReport::for_level(&level, &self.guards, (res_n, res_p));
        if report.guard_violation.is_some() && self.guards.mode == GuardMode::Strict {
            return Err(Error::GuardViolation(Box::new(report)));
        }
        Ok((level, report))
    }

    /// Runs all `n_steps` steps of the grid.
    pub fn run(&self, initial: FieldPair) -> Result<RunOutput> {
        self.run_steps(initial, self.grid.n_steps)
    }

    /// Runs the first `steps` steps (`steps <= n_steps`); zero returns the
    /// initial data unchanged.
    pub fn run_steps(&self, initial: FieldPair, steps: usize) -> Result<RunOutput> {
        if steps > self.grid.n_steps {
            return Err(Error::TableTooShort { required: steps + 1, available: self.coeffs.len() });
        }
        if initial.len() != self.grid.interior_len() || initial.p_field.len() != self.grid.interior_len() {
            return Err(Error::LengthMismatch { expected: self.grid.interior_len(), actual: initial.len() });
        }
        let initial = FieldPair { time_index: 0, ..initial };

        let mu_within_guard = self.mu_within_guard();
        if self.guards.mode != GuardMode::Off && !mu_within_guard {
            let (n_max, p_max) = self.mu_thresholds();
            log::warn!(
                "step factor mu = {:.6} is not below the positivity thresholds ({n_max:.6}, {p_max:.6})",
                self.mu
            );
        }

        let first = StepReport::for_level(&initial, &self.guards, (0.0, 0.0));
        if first.guard_violation.is_some() && self.guards.mode == GuardMode::Strict {
            return Err(Error::GuardViolation(Box::new(first)));
        }
        let mut reports = Vec::with_capacity(steps + 1);
        reports.push(first);
        let mut history = History::with_capacity(&initial, steps + 1);
        for _ in 0..steps {
            let (level, report) = self.step(&history)?;
            if let Some(v) = &report.guard_violation {
                log::warn!("step {}: {v}", report.time_index);
            }
            history.push(&level)?;
            reports.push(report);
        }
        Ok(RunOutput { history, reports, mu: self.mu, mu_within_guard })
    }
}

/// Trajectory and diagnostics of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub history: History,
    /// One report per level, including level 0.
    pub reports: Vec<StepReport>,
    pub mu: f64,
    pub mu_within_guard: bool,
}

impl RunOutput {
    pub fn final_level(&self) -> FieldPair {
        self.history.last()
    }

    /// Time indices kept for output at the given stride; the last level is
    /// always included.
    pub fn snapshot_indices(&self, stride: usize) -> Vec<usize> {
        let stride = stride.max(1);
        let last = self.history.len() - 1;
        let mut idx: Vec<usize> = (0..=last).step_by(stride).collect();
        if idx.last() != Some(&last) {
            idx.push(last);
        }
        idx
    }

    pub fn violations(&self) -> impl Iterator<Item = &StepReport> {
        self.reports.iter().filter(|r| r.guard_violation.is_some())
    }

    /// `(min N, max N, min P, max P)` over every level.
    pub fn global_extremes(&self) -> (f64, f64, f64, f64) {
        self.reports.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |acc, r| (acc.0.min(r.min_n), acc.1.max(r.max_n), acc.2.min(r.min_p), acc.3.max(r.max_p)),
        )
    }
}

/// Builds a stepper and runs it to the final time.
pub fn run(
    initial: FieldPair,
    grid: GridSpec,
    params: ModelParams,
    scheme: Scheme,
    guards: Guards,
) -> Result<RunOutput> {
    Stepper::new(grid, params, scheme, guards)?.run(initial)
}

/// Outcome of a two-run perturbation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    /// `max_k max(|N^k - N~^k|_inf, |P^k - P~^k|_inf)`.
    pub max_divergence: f64,
    /// `|N^0 - N~^0|_inf + |P^0 - P~^0|_inf`.
    pub initial_size: f64,
}

impl Perturbation {
    /// Amplification of the initial perturbation; zero when nothing was
    /// perturbed.
    pub fn ratio(&self) -> f64 {
        if self.initial_size == 0.0 {
            0.0
        } else {
            self.max_divergence / self.initial_size
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs the scheme from `initial` and from `initial` shifted by `epsilon` on
/// both species and measures how far the trajectories separate.
pub fn perturbation_experiment(
    initial: &FieldPair,
    grid: GridSpec,
    params: ModelParams,
    scheme: Scheme,
    epsilon: f64,
) -> Result<Perturbation> {
    let stepper = Stepper::new(grid, params, scheme, Guards::monitor(&params))?;
    let perturbed = initial.shifted(epsilon);
    let (base, other) = rayon::join(|| stepper.run(initial.clone()), || stepper.run(perturbed.clone()));
    let (base, other) = (base?, other?);
    let initial_size =
        max_abs_diff(&initial.n_field, &perturbed.n_field) + max_abs_diff(&initial.p_field, &perturbed.p_field);
    let max_divergence = (0..base.history.len())
        .map(|k| {
            max_abs_diff(base.history.prey(k), other.history.prey(k))
                .max(max_abs_diff(base.history.predator(k), other.history.predator(k)))
        })
        .fold(0.0, f64::max);
    Ok(Perturbation { max_divergence, initial_size })
}

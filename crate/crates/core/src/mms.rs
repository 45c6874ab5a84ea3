//! Manufactured-solution verification.
//!
//! The exact solution `N = P = (t+1)^2 x^2 (1-x)^2` has zero slope at both
//! ends of `(0, 1)`, so it satisfies the Neumann conditions. Substituting it
//! into the system defines the source terms [`forcing`]; running the forced
//! scheme then measures the discretization error directly.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{reaction_f1, reaction_f2, ModelParams};
use crate::riesz::apply_riesz;
use crate::stepper::{FieldPair, Forcing, Guards, Stepper};
use crate::weights::{caputo_coeffs, RieszWeights, Scheme};

/// `(t+1)^2 x^2 (1-x)^2`.
pub fn exact_solution(x: f64, t: f64) -> f64 {
    let s = x * (1.0 - x);
    (t + 1.0).powi(2) * s * s
}

/// Caputo derivative of order `alpha` of the exact solution.
pub fn caputo_of_exact(x: f64, t: f64, alpha: f64) -> f64 {
    let s = x * (1.0 - x);
    2.0 * s * s
        * (t.powf(1.0 - alpha) / libm::tgamma(2.0 - alpha)
            + t.powf(2.0 - alpha) / libm::tgamma(3.0 - alpha))
}

/// Riesz derivative of order `beta` of the exact solution (extended by zero
/// outside `[0, 1]`), valid at interior points.
pub fn riesz_of_exact(x: f64, t: f64, beta: f64) -> f64 {
    let left = x.powf(2.0 - beta) * (12.0 * (x - 1.0).powi(2) + (6.0 * x - 7.0) * beta + beta * beta);
    let right = (1.0 - x).powf(2.0 - beta) * (12.0 * x * x - 6.0 * x * beta + (beta - 1.0) * beta);
    let sec = 1.0 / (PI * beta / 2.0).cos();
    -(t + 1.0).powi(2) / libm::tgamma(5.0 - beta) * sec * (left + right)
}

/// Source terms `(f, g)` that make the exact solution solve the system.
///
/// Defined at interior points `0 < x < 1`.
pub fn forcing(x: f64, t: f64, params: &ModelParams) -> (f64, f64) {
    let u = exact_solution(x, t);
    let time = caputo_of_exact(x, t, params.alpha);
    let space = riesz_of_exact(x, t, params.beta);
    // N = P, so the ratio P / (P + N) is exactly 1/2
    let prey_reaction = u * (1.0 - u - params.rho_q / 2.0);
    let predator_reaction = params.sigma
        * u
        * (-(params.gamma + params.kappa * params.delta * u) / (1.0 + params.kappa * u) + 0.5);
    (
        time - params.d1 * space - prey_reaction,
        time - params.d2 * space - predator_reaction,
    )
}

/// [`forcing`] bound to a parameter set.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedForcing {
    pub params: ModelParams,
}

impl Forcing for ManufacturedForcing {
    fn source(&self, x: f64, t: f64) -> (f64, f64) {
        forcing(x, t, &self.params)
    }
}

/// Exact solution sampled at the interior nodes at time `t`.
pub fn exact_field(grid: &GridSpec, t: f64) -> FieldPair {
    FieldPair::from_fn(grid, |x| {
        let u = exact_solution(x, t);
        (u, u)
    })
}

/// Interior max-norm errors `(e_N, e_P)` against the exact solution at `t`.
pub fn linf_error(numeric: &FieldPair, grid: &GridSpec, t: f64) -> Result<(f64, f64)> {
    if numeric.len() != grid.interior_len() {
        return Err(Error::LengthMismatch { expected: grid.interior_len(), actual: numeric.len() });
    }
    let nodes = grid.interior_nodes();
    let err = |field: &[f64]| {
        field
            .iter()
            .zip(&nodes)
            .map(|(v, &x)| (v - exact_solution(x, t)).abs())
            .fold(0.0, f64::max)
    };
    Ok((err(&numeric.n_field), err(&numeric.p_field)))
}

/// Result of one forced run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsErrors {
    /// Final-time errors.
    pub e_n: f64,
    pub e_p: f64,
    /// Largest error over every time level.
    pub e_n_all: f64,
    pub e_p_all: f64,
}

/// Runs the forced scheme from the exact initial data and measures errors.
pub fn manufactured_run(grid: GridSpec, params: ModelParams, scheme: Scheme) -> Result<MmsErrors> {
    let stepper = Stepper::new(grid, params, scheme, Guards::off(&params))?
        .with_forcing(Arc::new(ManufacturedForcing { params }));
    let out = stepper.run(exact_field(&grid, 0.0))?;
    let mut errs = MmsErrors { e_n: 0.0, e_p: 0.0, e_n_all: 0.0, e_p_all: 0.0 };
    for (k, level) in out.history.iter().enumerate() {
        let (en, ep) = linf_error(&level, &grid, grid.time(k))?;
        errs.e_n_all = errs.e_n_all.max(en);
        errs.e_p_all = errs.e_p_all.max(ep);
        if k + 1 == out.history.len() {
            errs.e_n = en;
            errs.e_p = ep;
        }
    }
    Ok(errs)
}

/// Which step size a convergence study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Refine `tau` with `h` fixed.
    Time,
    /// Refine `h` with `tau` fixed.
    Space,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Time => "time",
            Axis::Space => "space",
        })
    }
}

/// Errors and empirical orders across a refinement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub axis: Axis,
    pub scheme: Scheme,
    /// The refined step size per level (`tau` or `h`).
    pub steps: Vec<f64>,
    /// The step size held fixed (`h` or `tau`).
    pub fixed: f64,
    pub errors: Vec<MmsErrors>,
    /// Orders between consecutive levels; one shorter than `steps`.
    pub rates_n: Vec<f64>,
    pub rates_p: Vec<f64>,
}

fn order(e0: f64, e1: f64, s0: f64, s1: f64) -> f64 {
    (e0 / e1).ln() / (s0 / s1).ln()
}

impl ConvergenceReport {
    pub fn from_errors(axis: Axis, scheme: Scheme, steps: Vec<f64>, fixed: f64, errors: Vec<MmsErrors>) -> Self {
        let pairs = |f: fn(&MmsErrors) -> f64| -> Vec<f64> {
            errors
                .windows(2)
                .zip(steps.windows(2))
                .map(|(e, s)| order(f(&e[0]), f(&e[1]), s[0], s[1]))
                .collect()
        };
        let rates_n = pairs(|e| e.e_n);
        let rates_p = pairs(|e| e.e_p);
        ConvergenceReport { axis, scheme, steps, fixed, errors, rates_n, rates_p }
    }

    pub fn e_n(&self) -> Vec<f64> {
        self.errors.iter().map(|e| e.e_n).collect()
    }

    pub fn e_p(&self) -> Vec<f64> {
        self.errors.iter().map(|e| e.e_p).collect()
    }

    /// Indices `j` where the error grew from level `j` to `j + 1`.
    pub fn non_monotone(&self) -> Vec<usize> {
        self.errors
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].e_n > w[0].e_n || w[1].e_p > w[0].e_p)
            .map(|(j, _)| j)
            .collect()
    }

    /// Orders of the last two levels `(N, P)`.
    pub fn finest_rates(&self) -> Option<(f64, f64)> {
        Some((*self.rates_n.last()?, *self.rates_p.last()?))
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (refined, held) = match self.axis {
            Axis::Time => ("tau", "h"),
            Axis::Space => ("h", "tau"),
        };
        let head = format!("{refined}({held} = {})", self.fixed);
        writeln!(
            f,
            "{head:<16} {:>22} {:>9} {:>22} {:>9}",
            "e_N(h, tau)", "rate", "e_P(h, tau)", "rate"
        )?;
        for (j, (s, e)) in self.steps.iter().zip(&self.errors).enumerate() {
            let (rn, rp) = if j == 0 {
                (String::new(), String::new())
            } else {
                (format!("{:.5}", self.rates_n[j - 1]), format!("{:.5}", self.rates_p[j - 1]))
            };
            writeln!(f, "{:<16} {:>22.15e} {rn:>9} {:>22.15e} {rp:>9}", s, e.e_n, e.e_p)?;
        }
        let bad = self.non_monotone();
        if !bad.is_empty() {
            writeln!(f, "warning: error increased after levels {bad:?}")?;
        }
        Ok(())
    }
}

fn intervals_for(step: f64, length: f64, what: &str) -> Result<usize> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidGrid(format!("{what} = {step} must be positive")));
    }
    let count = (length / step).round();
    if count < 1.0 || ((count * step) - length).abs() > 1e-9 * length {
        return Err(Error::InvalidGrid(format!(
            "{what} = {step} does not divide the interval length {length}"
        )));
    }
    Ok(count as usize)
}

/// Runs the forced system at every level and collects errors and orders.
///
/// Levels run in parallel on the current rayon pool.
pub fn convergence_study(
    axis: Axis,
    levels: &[f64],
    fixed: f64,
    scheme: Scheme,
    params: ModelParams,
) -> Result<ConvergenceReport> {
    if levels.is_empty() {
        return Err(Error::InvalidParameter("a convergence study needs at least one level".into()));
    }
    let grids = levels
        .iter()
        .map(|&s| {
            let (h, tau) = match axis {
                Axis::Time => (fixed, s),
                Axis::Space => (s, fixed),
            };
            GridSpec::unit(intervals_for(h, 1.0, "h")?, intervals_for(tau, 1.0, "tau")?)
        })
        .collect::<Result<Vec<_>>>()?;
    let errors = grids
        .par_iter()
        .map(|&g| manufactured_run(g, params, scheme))
        .collect::<Result<Vec<_>>>()?;
    let report = ConvergenceReport::from_errors(axis, scheme, levels.to_vec(), fixed, errors);
    let bad = report.non_monotone();
    if !bad.is_empty() {
        log::warn!("{axis} study: error increased after levels {bad:?}");
    }
    Ok(report)
}

/// Pointwise residual of the defining identity
/// `D_t^a u - D_i R_x^b u - f_i(u, u) - s_i = 0` at time `t`, with the
/// derivatives replaced by the discrete L1 and Riesz stencils on
/// `m_intervals` cells and `time_steps` steps over `[0, t]`.
///
/// Returns `(x, prey residual, predator residual)` per interior node. The
/// zero extension of the exact solution has a jump in its second derivative
/// at both ends, so nodes next to the boundary converge only like
/// `h^{2-b}`; away from the ends the stencil error is `O(h^2)`.
pub fn forcing_residuals(
    params: &ModelParams,
    scheme: Scheme,
    m_intervals: usize,
    time_steps: usize,
    t: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    let grid = GridSpec::new(0.0, 1.0, m_intervals, time_steps, t)?;
    let weights = RieszWeights::new(scheme, params.beta, m_intervals + 1)?;
    let full: Vec<f64> = grid.nodes().iter().map(|&x| exact_solution(x, t)).collect();
    let riesz = apply_riesz(&weights, &full, &grid)?;

    // u = s(t) phi(x): the L1 sum reduces to the scalar s(t) = (t+1)^2.
    let k = time_steps;
    let tau = grid.tau();
    let b = caputo_coeffs(params.alpha, k)?;
    let s = |n: usize| (n as f64 * tau + 1.0).powi(2);
    let mut memory = b.get(k - 1) * s(0);
    for n in 1..k {
        memory += (b.get(k - n - 1) - b.get(k - n)) * s(n);
    }
    let scalar = (s(k) - memory) * tau.powf(-params.alpha) / libm::tgamma(2.0 - params.alpha);

    Ok(grid
        .interior_nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let u = full[i + 1];
            let caputo = scalar * exact_solution(x, 0.0);
            let (f, g) = forcing(x, t, params);
            let r1 = caputo - params.d1 * riesz[i] - reaction_f1(u, u, params) - f;
            let r2 = caputo - params.d2 * riesz[i] - reaction_f2(u, u, params) - g;
            (x, r1, r2)
        })
        .collect())
}

/// Max-norm of [`forcing_residuals`] per species over all interior nodes.
pub fn forcing_residual(
    params: &ModelParams,
    scheme: Scheme,
    m_intervals: usize,
    time_steps: usize,
    t: f64,
) -> Result<(f64, f64)> {
    Ok(forcing_residuals(params, scheme, m_intervals, time_steps, t)?
        .into_iter()
        .fold((0.0f64, 0.0f64), |acc, (_, a, b)| (acc.0.max(a.abs()), acc.1.max(b.abs()))))
}

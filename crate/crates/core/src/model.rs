//! Predator-prey constants, reaction terms and the invariant box.

use crate::error::{Error, Result};
use crate::weights::{check_alpha, check_beta};

/// Physical constants of the fractional predator-prey system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Caputo order in time, `(0, 1]`.
    pub alpha: f64,
    /// Riesz order in space, `(1, 2]`.
    pub beta: f64,
    /// Prey diffusion.
    pub d1: f64,
    /// Predator diffusion.
    pub d2: f64,
    /// Predation coefficient.
    pub rho_q: f64,
    pub sigma: f64,
    /// Minimal predator mortality.
    pub gamma: f64,
    pub kappa: f64,
    /// Limiting predator mortality.
    pub delta: f64,
}

impl ModelParams {
    /// Reference parameter set of the numerical experiments, with
    /// `alpha = 0.5`, `beta = 1.5`.
    pub fn reference() -> Self {
        ModelParams {
            alpha: 0.5,
            beta: 1.5,
            d1: 0.005,
            d2: 0.2,
            rho_q: 1.1,
            sigma: 1.0,
            gamma: 0.05,
            kappa: 1.0,
            delta: 0.5,
        }
    }

    pub fn with_orders(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_beta(self.beta)?;
        let positive = [
            ("d1", self.d1),
            ("d2", self.d2),
            ("rho_q", self.rho_q),
            ("sigma", self.sigma),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.delta.is_finite() && self.delta >= self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < gamma <= delta, got gamma = {}, delta = {}",
                self.gamma, self.delta
            )));
        }
        Ok(())
    }

    /// Composite step factor `Gamma(2 - alpha) tau^alpha`.
    pub fn step_factor(&self, tau: f64) -> f64 {
        step_factor(self.alpha, tau)
    }

    /// Default predator cap `1/gamma + 1`.
    pub fn default_predator_cap(&self) -> f64 {
        1.0 / self.gamma + 1.0
    }
}

/// `mu = Gamma(2 - alpha) tau^alpha`, shared by the diffusion matrix and the
/// reaction scaling.
pub fn step_factor(alpha: f64, tau: f64) -> f64 {
    libm::tgamma(2.0 - alpha) * tau.powf(alpha)
}

/// Box `(floor, n_upper] x (floor, p_upper]` that positive solutions never
/// leave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsConfig {
    pub n_upper: f64,
    pub p_upper: f64,
    pub positivity_floor: f64,
}

impl BoundsConfig {
    /// Prey cap 1 and predator cap `1/gamma + 1`.
    pub fn for_params(params: &ModelParams) -> Self {
        BoundsConfig { n_upper: 1.0, p_upper: params.default_predator_cap(), positivity_floor: 0.0 }
    }

    pub fn with_predator_cap(mut self, p_upper: f64) -> Self {
        self.p_upper = p_upper;
        self
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if !(self.p_upper.is_finite() && self.p_upper > 1.0 / params.gamma) {
            return Err(Error::InvalidParameter(format!(
                "predator cap {} must exceed 1/gamma = {}",
                self.p_upper,
                1.0 / params.gamma
            )));
        }
        if !(self.n_upper > self.positivity_floor) {
            return Err(Error::InvalidParameter("prey cap must exceed the positivity floor".into()));
        }
        Ok(())
    }

    pub fn prey_ok(&self, n: f64) -> bool {
        n > self.positivity_floor && n <= self.n_upper
    }

    pub fn predator_ok(&self, p: f64) -> bool {
        p > self.positivity_floor && p <= self.p_upper
    }
}

/// Prey reaction `N (1 - N - rho P / (P + N))`; zero at the origin.
pub fn reaction_f1(n: f64, p: f64, params: &ModelParams) -> f64 {
    let total = n + p;
    if total == 0.0 {
        return 0.0;
    }
    n * (1.0 - n - params.rho_q * p / total)
}

/// Predator reaction `sigma P (-(gamma + kappa delta P) / (1 + kappa P) + N / (P + N))`;
/// zero at the origin.
pub fn reaction_f2(n: f64, p: f64, params: &ModelParams) -> f64 {
    let total = n + p;
    if total == 0.0 {
        return 0.0;
    }
    let mortality = (params.gamma + params.kappa * params.delta * p) / (1.0 + params.kappa * p);
    params.sigma * p * (-mortality + n / total)
}

/// Largest step factors for which the discrete scheme provably keeps prey
/// and predator inside the invariant box: `min(1, (1 - b_1)/rho)` and
/// `min(1, (1 - b_1)/(sigma delta))`.
pub fn mu_guard_thresholds(params: &ModelParams, b1: f64) -> (f64, f64) {
    let gap = 1.0 - b1;
    let n_max = (gap / params.rho_q).min(1.0);
    let p_max = (gap / (params.sigma * params.delta)).min(1.0);
    (n_max, p_max)
}

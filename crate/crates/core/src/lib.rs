//! Semi-implicit finite-difference solvers for the space-time fractional
//! predator-prey reaction-diffusion system
//!
//! ```text
//! D_t^a N = D1 R_x^b N + N (1 - N - rho P / (P + N))
//! D_t^a P = D2 R_x^b P + sigma P (-(gamma + kappa delta P) / (1 + kappa P) + N / (P + N))
//! ```
//!
//! with a Caputo derivative of order `a` in `(0, 1]`, a Riesz derivative of
//! order `b` in `(1, 2]` and homogeneous Neumann boundaries.
//!
//! * [`weights`]: L1, fractional centered and WSGD coefficient tables.
//! * [`riesz`]: the folded implicit operator and the direct stencil.
//! * [`model`]: parameters, reaction terms and the invariant box.
//! * [`stepper`]: time stepping with positivity and boundedness guards.
//! * [`mms`]: manufactured-solution convergence studies.

pub mod error;
pub mod grid;
pub mod mms;
pub mod model;
pub mod riesz;
pub mod stepper;
pub mod weights;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use model::{BoundsConfig, ModelParams};
pub use stepper::{FieldPair, GuardMode, Guards, History, RunOutput, StepReport, Stepper};
pub use weights::{CaputoCoeffs, RieszWeights, Scheme};

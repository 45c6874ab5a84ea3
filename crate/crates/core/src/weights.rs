//! Coefficient tables for the time and space discretizations.
//!
//! Three families are produced here:
//!
//! * [`CaputoCoeffs`]: the L1 weights `b_n = (n+1)^{1-a} - n^{1-a}` of the
//!   Caputo derivative of order `a` in `(0, 1]`.
//! * [`RieszWeights`] with [`Scheme::Centered`]: fractional centered
//!   difference weights `g_j` for the Riesz derivative of order `b` in `(1, 2]`.
//! * [`RieszWeights`] with [`Scheme::Wsgd`]: the symmetrized weighted and
//!   shifted Grünwald weights `theta_j`.
//!
//! Both Riesz families are even in `j`; only `j >= 0` is stored. Tables are
//! immutable once built and are meant to be shared across steps and runs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 1.0 && beta <= 2.0 {
        Ok(())
    } else {
        Err(Error::BetaOutOfRange(beta))
    }
}

/// L1 weights of the Caputo derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoCoeffs {
    alpha: f64,
    b: Vec<f64>,
}

/// Builds `b_0 .. b_{count-1}`.
pub fn caputo_coeffs(alpha: f64, count: usize) -> Result<CaputoCoeffs> {
    check_alpha(alpha)?;
    if count == 0 {
        return Err(Error::EmptyTable);
    }
    let expo = 1.0 - alpha;
    let b = (0..count)
        .map(|n| {
            if n == 0 {
                1.0
            } else {
                // n^{1-a} ((1 + 1/n)^{1-a} - 1), free of cancellation for large n
                let n = n as f64;
                n.powf(expo) * (expo * (1.0 / n).ln_1p()).exp_m1()
            }
        })
        .collect();
    Ok(CaputoCoeffs { alpha, b })
}

impl CaputoCoeffs {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }

    pub fn get(&self, n: usize) -> f64 {
        self.b[n]
    }
}

/// Spatial discretization of the Riesz derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Fractional centered difference.
    Centered,
    /// Weighted and shifted Grünwald difference.
    Wsgd,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Centered => "centered",
            Scheme::Wsgd => "wsgd",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "centered" | "centred" => Ok(Scheme::Centered),
            "wsgd" => Ok(Scheme::Wsgd),
            other => Err(format!("unknown scheme '{other}' (expected centered or wsgd)")),
        }
    }
}

/// Even weight table `w_j = w_{-j}` of a second-order Riesz stencil,
/// stored for `j = 0 .. len-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszWeights {
    scheme: Scheme,
    beta: f64,
    values: Vec<f64>,
}

impl RieszWeights {
    pub fn new(scheme: Scheme, beta: f64, count: usize) -> Result<Self> {
        match scheme {
            Scheme::Centered => centered_weights(beta, count),
            Scheme::Wsgd => wsgd_weights(beta, count),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Weight at a signed offset, using the even symmetry.
    pub fn at(&self, j: isize) -> f64 {
        self.values[j.unsigned_abs()]
    }

    /// `w_0 - 2 sum_{j>=1} |w_j|` over the stored table; positive for every
    /// admissible order and length.
    pub fn tail_margin(&self) -> f64 {
        let tail: f64 = self.values.iter().skip(1).map(|w| w.abs()).sum();
        self.values[0] - 2.0 * tail
    }
}

/// Fractional centered difference weights `g_0 .. g_{count-1}`.
///
/// `g_0 = Gamma(b+1) / Gamma(b/2+1)^2`; the rest follow
/// `g_{j+1} = (1 - (b+1)/(b/2+j+1)) g_j`, which never touches the poles of
/// the Gamma quotient.
pub fn centered_weights(beta: f64, count: usize) -> Result<RieszWeights> {
    check_beta(beta)?;
    if count == 0 {
        return Err(Error::EmptyTable);
    }
    let mut values = Vec::with_capacity(count);
    let g0 = libm::tgamma(beta + 1.0) / libm::tgamma(beta / 2.0 + 1.0).powi(2);
    values.push(g0);
    for j in 0..count - 1 {
        let ratio = 1.0 - (beta + 1.0) / (beta / 2.0 + j as f64 + 1.0);
        values.push(ratio * values[j]);
    }
    Ok(RieszWeights { scheme: Scheme::Centered, beta, values })
}

/// Symmetrized WSGD weights `theta_0 .. theta_{count-1}`.
///
/// `theta_0` and `theta_1` come from their closed forms, `theta_2` from
/// `w_3 / (2 cos(b pi/2))` and the tail from the three-term ratio. At
/// `b = 2` the Grünwald quotient is singular and the limit table
/// `[2, -1, 0, ...]` is returned.
pub fn wsgd_weights(beta: f64, count: usize) -> Result<RieszWeights> {
    check_beta(beta)?;
    if count == 0 {
        return Err(Error::EmptyTable);
    }
    let mut values = vec![0.0; count];
    if beta == 2.0 {
        values[0] = 2.0;
        if count > 1 {
            values[1] = -1.0;
        }
        return Ok(RieszWeights { scheme: Scheme::Wsgd, beta, values });
    }

    let cos = (beta * PI / 2.0).cos();
    let bb = beta * beta;
    values[0] = (2.0 - beta - bb) / (2.0 * cos);
    if count > 1 {
        values[1] = beta * (beta + 2.0) * (beta - 1.0) / (8.0 * cos);
    }
    if count > 2 {
        // w_3 = g_2 (1 - b(b+1)/6) with the Grünwald weight g_2 = b(b-1)/2
        let w3 = beta * (beta - 1.0) / 2.0 * (1.0 - beta * (beta + 1.0) / 6.0);
        values[2] = w3 / (2.0 * cos);
    }
    for j in 2..count.saturating_sub(1) {
        let jf = j as f64;
        let ratio = ((jf - beta) * (beta + bb - 2.0 * (2.0 + jf)))
            / ((2.0 + jf) * (beta + bb - 2.0 * (1.0 + jf)));
        values[j + 1] = ratio * values[j];
    }
    Ok(RieszWeights { scheme: Scheme::Wsgd, beta, values })
}

//! Discrete Riesz operator on the interior nodes.
//!
//! The stencil is nonlocal, so the implicit operator `I + (mu D / h^b) W` is
//! stored dense and factored once. Boundary values are eliminated with the
//! three-point Neumann closure `u_0 = (4 u_1 - u_2) / 3`,
//! `u_M = (4 u_{M-1} - u_{M-2}) / 3`, folded into columns `1, 2, M-2, M-1`.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::weights::RieszWeights;

/// Smallest number of subintervals for which the four folded columns are
/// distinct.
pub const MIN_INTERVALS: usize = 5;

/// Relative residual bound every solve must meet.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

/// Dense `I + A` of the implicit diffusion step with its LU factors.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    scale: f64,
    matrix: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

/// Folded stencil `W` acting on interior unknowns, so that
/// `(W v)_i = sum_{m=0}^{M} w_{|i-m|} u_m` with `u = eliminate_ghosts(v)`.
fn folded_stencil(weights: &RieszWeights, m_intervals: usize) -> DMatrix<f64> {
    let n = m_intervals - 1;
    let w = weights.as_slice();
    DMatrix::from_fn(n, n, |r, c| {
        let i = r + 1;
        let m = c + 1;
        let mut v = w[i.abs_diff(m)];
        // u_0 = (4 u_1 - u_2) / 3 enters row i with weight w_i
        if m == 1 {
            v += 4.0 / 3.0 * w[i];
        } else if m == 2 {
            v -= w[i] / 3.0;
        }
        // u_M = (4 u_{M-1} - u_{M-2}) / 3 enters with weight w_{M-i}
        if m == m_intervals - 1 {
            v += 4.0 / 3.0 * w[m_intervals - i];
        } else if m == m_intervals - 2 {
            v -= w[m_intervals - i] / 3.0;
        }
        v
    })
}

/// Builds `I + (mu D / h^b) W` for one species and factors it.
pub fn assemble_matrix(
    weights: &RieszWeights,
    diffusion: f64,
    mu: f64,
    grid: &GridSpec,
) -> Result<OperatorMatrix> {
    grid.validate()?;
    let m = grid.m_intervals;
    if m < MIN_INTERVALS {
        return Err(Error::InvalidGrid(format!(
            "ghost elimination needs at least {MIN_INTERVALS} subintervals, got {m}"
        )));
    }
    if !(diffusion.is_finite() && diffusion > 0.0) {
        return Err(Error::InvalidParameter(format!("diffusion {diffusion} must be positive")));
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("step factor mu = {mu} must be non-negative")));
    }
    if weights.len() < m {
        return Err(Error::TableTooShort { required: m, available: weights.len() });
    }

    let scale = mu * diffusion / grid.h().powf(weights.beta());
    let mut matrix = folded_stencil(weights, m) * scale;
    for d in 0..m - 1 {
        matrix[(d, d)] += 1.0;
    }
    let lu = matrix.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::Solver("operator matrix is singular".into()));
    }
    Ok(OperatorMatrix { scale, matrix, lu })
}

impl OperatorMatrix {
    /// Number of interior unknowns.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The factor `mu D / h^b` multiplying the folded stencil.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Row-major copy of the entries.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let x = DVector::from_column_slice(v);
        Ok((&self.matrix * x).as_slice().to_vec())
    }

    /// Solves `(I + A) x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_with_residual(rhs).map(|(x, _)| x)
    }

    /// Solves `(I + A) x = rhs` and returns `x` with the residual infinity norm.
    ///
    /// Fails if the residual exceeds `1e-10 (1 + |rhs|_inf)`.
    pub fn solve_with_residual(&self, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_len(rhs.len())?;
        let b = DVector::from_column_slice(rhs);
        let x = self
            .lu
            .solve(&b)
            .ok_or_else(|| Error::Solver("LU back-substitution failed".into()))?;
        let residual = (&b - &self.matrix * &x).amax();
        let bound = SOLVE_RESIDUAL_TOL * (1.0 + b.amax());
        if !residual.is_finite() || residual > bound {
            return Err(Error::Solver(format!(
                "residual {residual:e} exceeds bound {bound:e}"
            )));
        }
        Ok((x.as_slice().to_vec(), residual))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), actual: len });
        }
        Ok(())
    }
}

/// Direct stencil `-(1/h^b) sum_j w_j u_{i-j}` at every interior node of a
/// full grid vector `u_0 .. u_M`, with no boundary closure.
pub fn apply_riesz(weights: &RieszWeights, field: &[f64], grid: &GridSpec) -> Result<Vec<f64>> {
    let m = grid.m_intervals;
    if field.len() != m + 1 {
        return Err(Error::LengthMismatch { expected: m + 1, actual: field.len() });
    }
    if weights.len() < m {
        return Err(Error::TableTooShort { required: m, available: weights.len() });
    }
    let w = weights.as_slice();
    let factor = -1.0 / grid.h().powf(weights.beta());
    Ok((1..m)
        .map(|i| {
            let s: f64 = field.iter().enumerate().map(|(k, u)| w[i.abs_diff(k)] * u).sum();
            factor * s
        })
        .collect())
}

/// Extends interior values `u_1 .. u_{M-1}` with the Neumann ghost values.
pub fn eliminate_ghosts(interior: &[f64]) -> Result<Vec<f64>> {
    let n = interior.len();
    if n < 2 {
        return Err(Error::LengthMismatch { expected: 2, actual: n });
    }
    let mut full = Vec::with_capacity(n + 2);
    full.push((4.0 * interior[0] - interior[1]) / 3.0);
    full.extend_from_slice(interior);
    full.push((4.0 * interior[n - 1] - interior[n - 2]) / 3.0);
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{centered_weights, wsgd_weights};

    #[test]
    fn classical_neumann_matrix_by_hand() {
        let grid = GridSpec::unit(5, 10).unwrap();
        let h = grid.h();
        let mu = h * h;
        let w = centered_weights(2.0, 6).unwrap();
        let a = assemble_matrix(&w, 1.0, mu, &grid).unwrap();
        let c = mu / (h * h);
        // folded second-difference stencil on 4 unknowns
        let expected = [
            [2.0 - 4.0 / 3.0, -1.0 + 1.0 / 3.0, 0.0, 0.0],
            [-1.0, 2.0, -1.0, 0.0],
            [0.0, -1.0, 2.0, -1.0],
            [0.0, 0.0, -1.0 + 1.0 / 3.0, 2.0 - 4.0 / 3.0],
        ];
        for r in 0..4 {
            for col in 0..4 {
                let e = if r == col { 1.0 } else { 0.0 } + c * expected[r][col];
                assert!((a.entry(r, col) - e).abs() < 1e-14, "({r},{col})");
            }
        }
    }

    #[test]
    fn zero_mu_is_identity() {
        let grid = GridSpec::unit(12, 10).unwrap();
        let w = wsgd_weights(1.3, 13).unwrap();
        let a = assemble_matrix(&w, 0.2, 0.0, &grid).unwrap();
        for r in 0..a.dim() {
            for c in 0..a.dim() {
                assert_eq!(a.entry(r, c), if r == c { 1.0 } else { 0.0 });
            }
        }
        let rhs: Vec<f64> = (0..a.dim()).map(|i| i as f64 - 3.5).collect();
        assert_eq!(a.solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn solve_recovers_ones() {
        let grid = GridSpec::unit(30, 10).unwrap();
        let w = centered_weights(1.5, 31).unwrap();
        let a = assemble_matrix(&w, 0.2, 0.3, &grid).unwrap();
        let ones = vec![1.0; a.dim()];
        let rhs = a.matvec(&ones).unwrap();
        let x = a.solve(&rhs).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_small_grids_and_bad_coefficients() {
        let w = centered_weights(1.5, 10).unwrap();
        let small = GridSpec::unit(4, 10).unwrap();
        assert!(matches!(assemble_matrix(&w, 1.0, 0.1, &small), Err(Error::InvalidGrid(_))));
        let grid = GridSpec::unit(8, 10).unwrap();
        assert!(assemble_matrix(&w, 0.0, 0.1, &grid).is_err());
        assert!(assemble_matrix(&w, 1.0, -0.1, &grid).is_err());
        let short = centered_weights(1.5, 4).unwrap();
        assert!(matches!(
            assemble_matrix(&short, 1.0, 0.1, &grid),
            Err(Error::TableTooShort { .. })
        ));
    }

    #[test]
    fn solve_checks_length() {
        let grid = GridSpec::unit(8, 10).unwrap();
        let w = centered_weights(1.5, 9).unwrap();
        let a = assemble_matrix(&w, 1.0, 0.1, &grid).unwrap();
        assert!(matches!(a.solve(&[1.0; 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn ghosts_of_constant() {
        let full = eliminate_ghosts(&[0.7; 6]).unwrap();
        assert_eq!(full.len(), 8);
        assert!((full[0] - 0.7).abs() < 1e-15);
        assert!((full[7] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn ghosts_exact_for_flat_quadratic() {
        // u = (x - 0)^2 has zero slope at x = 0; the closure reproduces u_0 = 0
        let h = 0.1;
        let interior: Vec<f64> = (1..10).map(|i| (i as f64 * h).powi(2)).collect();
        let full = eliminate_ghosts(&interior).unwrap();
        assert!(full[0].abs() < 1e-15);
    }

    #[test]
    fn ghosts_need_two_values() {
        assert!(eliminate_ghosts(&[1.0]).is_err());
    }

    #[test]
    fn riesz_of_quadratic_is_laplacian_at_two() {
        let grid = GridSpec::unit(40, 10).unwrap();
        let w = centered_weights(2.0, 41).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|x| x * x).collect();
        let d = apply_riesz(&w, &u, &grid).unwrap();
        for v in &d {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn riesz_length_mismatch() {
        let grid = GridSpec::unit(10, 10).unwrap();
        let w = centered_weights(1.5, 11).unwrap();
        assert!(apply_riesz(&w, &[0.0; 10], &grid).is_err());
    }
}

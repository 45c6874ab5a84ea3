use crate::error::{Error, Result};

/// Uniform space-time mesh on `[left, right] x [0, t_final]`.
///
/// Nodes are `x_i = left + i h` for `i = 0..=m_intervals`; the unknowns of the
/// schemes live on the `m_intervals - 1` interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub left: f64,
    pub right: f64,
    pub m_intervals: usize,
    pub n_steps: usize,
    pub t_final: f64,
}

impl GridSpec {
    pub fn new(left: f64, right: f64, m_intervals: usize, n_steps: usize, t_final: f64) -> Result<Self> {
        let grid = GridSpec { left, right, m_intervals, n_steps, t_final };
        grid.validate()?;
        Ok(grid)
    }

    /// Unit interval with `T = 1`, the setting of every built-in experiment.
    pub fn unit(m_intervals: usize, n_steps: usize) -> Result<Self> {
        Self::new(0.0, 1.0, m_intervals, n_steps, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.left.is_finite() && self.right.is_finite()) || self.right <= self.left {
            return Err(Error::InvalidGrid(format!(
                "domain [{}, {}] must be a finite interval with left < right",
                self.left, self.right
            )));
        }
        if self.m_intervals < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 subintervals, got {}",
                self.m_intervals
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidGrid("number of time steps must be positive".into()));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidGrid(format!("final time {} must be positive", self.t_final)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.right - self.left) / self.m_intervals as f64
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn interior_len(&self) -> usize {
        self.m_intervals - 1
    }

    pub fn node(&self, i: usize) -> f64 {
        self.left + i as f64 * self.h()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.tau()
    }

    /// Interior node coordinates `x_1 .. x_{M-1}`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.m_intervals).map(|i| self.node(i)).collect()
    }

    /// All node coordinates `x_0 .. x_M`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.m_intervals).map(|i| self.node(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_nodes() {
        let g = GridSpec::unit(100, 100).unwrap();
        assert!((g.h() - 0.01).abs() < 1e-15);
        assert!((g.tau() - 0.01).abs() < 1e-15);
        assert_eq!(g.interior_len(), 99);
        assert_eq!(g.node(0), 0.0);
        assert!((g.node(100) - 1.0).abs() < 1e-15);
        assert_eq!(g.interior_nodes().len(), 99);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(1.0, 0.0, 10, 10, 1.0).is_err());
        assert!(GridSpec::unit(1, 10).is_err());
        assert!(GridSpec::unit(10, 0).is_err());
        assert!(GridSpec::new(0.0, 1.0, 10, 10, 0.0).is_err());
    }
}

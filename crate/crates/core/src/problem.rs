//! The quadratic program `minimize ½xᵀQx + qᵀx subject to ℓ ≤ Ax ≤ u`.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Problem data.  `Q` is stored as an upper-triangle symmetric matrix; bounds
/// may be infinite (`ℓ_i = −∞`, `u_i = +∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub q_mat: SparseMatrix,
    pub q: Vec<f64>,
    pub a: SparseMatrix,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
}

impl QpProblem {
    /// Builds and validates a problem.
    pub fn new(q_mat: SparseMatrix, q: Vec<f64>, a: SparseMatrix, l: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let p = Self { q_mat, q, a, l, u };
        p.validate()?;
        Ok(p)
    }

    /// Checks dimensions, symmetry storage, finiteness and bound ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.q.len();
        let m = self.l.len();
        if !self.q_mat.is_square() || self.q_mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Q is {}x{}, q has length {n}",
                self.q_mat.nrows(),
                self.q_mat.ncols()
            )));
        }
        if !self.q_mat.is_symmetric() {
            return Err(Error::InvalidProblem("Q must use symmetric (upper triangle) storage".into()));
        }
        if self.a.ncols() != n || self.a.nrows() != m || self.u.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected {m}x{n} with |l| = {m}, |u| = {}",
                self.a.nrows(),
                self.a.ncols(),
                self.u.len()
            )));
        }
        if self.a.is_symmetric() {
            return Err(Error::InvalidProblem("A must use general storage".into()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(self.q_mat.values()) || !finite(self.a.values()) || !finite(&self.q) {
            return Err(Error::InvalidProblem("Q, q and A must be finite".into()));
        }
        for i in 0..m {
            let (l, u) = (self.l[i], self.u[i]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(Error::InvalidProblem(format!("invalid bounds [{l}, {u}] on row {i}")));
            }
        }
        Ok(())
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.l.len()
    }

    /// `½xᵀQx + qᵀx`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        0.5 * self.q_mat.quad_form(x) + dot(&self.q, x)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Componentwise clamp of `v` to `[l, u]`.
pub(crate) fn clamp(v: f64, l: f64, u: f64) -> f64 {
    v.max(l).min(u)
}

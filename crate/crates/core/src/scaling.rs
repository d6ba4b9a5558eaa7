//! Ruiz equilibration of the constraint matrix and single-constant objective
//! scaling.
//!
//! The solver works on the scaled problem
//! `x̄ = D⁻¹x, Q̄ = cDQD, q̄ = cDq, Ā = EAD, ℓ̄ = Eℓ, ū = Eu, ȳ = cE⁻¹y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{inf_norm, QpProblem};
use crate::sparse::SparseMatrix;

/// Default number of Ruiz sweeps.
pub const DEFAULT_SCALING_ITERS: usize = 10;

/// Diagonal scalings `D` (variables), `E` (constraints) and objective constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingData {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub c: f64,
    pub dinv: Vec<f64>,
    pub einv: Vec<f64>,
    pub cinv: f64,
}

impl ScalingData {
    /// Identity scaling for dimensions `n`, `m`.
    pub fn identity(n: usize, m: usize) -> Self {
        Self::from_parts(vec![1.0; n], vec![1.0; m], 1.0)
    }

    /// Builds the data (and cached reciprocals) from `D`, `E`, `c`.
    pub fn from_parts(d: Vec<f64>, e: Vec<f64>, c: f64) -> Self {
        let dinv = d.iter().map(|v| 1.0 / v).collect();
        let einv = e.iter().map(|v| 1.0 / v).collect();
        Self { d, e, c, dinv, einv, cinv: 1.0 / c }
    }

    /// `x̄ = D⁻¹x`.
    pub fn scale_x(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.dinv).map(|(a, b)| a * b).collect()
    }

    /// `ȳ = cE⁻¹y`.
    pub fn scale_y(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.einv).map(|(a, b)| self.c * a * b).collect()
    }

    /// `x = Dx̄`.
    pub fn unscale_x(&self, xbar: &[f64]) -> Vec<f64> {
        xbar.iter().zip(&self.d).map(|(a, b)| a * b).collect()
    }

    /// `y = c⁻¹Eȳ`.
    pub fn unscale_y(&self, ybar: &[f64]) -> Vec<f64> {
        ybar.iter().zip(&self.e).map(|(a, b)| self.cinv * a * b).collect()
    }

    /// Applies the scaling to `p` (whose `A` must be the matrix the scaling
    /// was computed for, or share its dimensions).
    pub fn apply(&self, p: &QpProblem) -> QpProblem {
        QpProblem {
            q_mat: p.q_mat.scale(&self.d, &self.d).scaled_by(self.c),
            q: p.q.iter().zip(&self.d).map(|(q, d)| self.c * d * q).collect(),
            a: p.a.scale(&self.e, &self.d),
            l: p.l.iter().zip(&self.e).map(|(l, e)| l * e).collect(),
            u: p.u.iter().zip(&self.e).map(|(u, e)| u * e).collect(),
        }
    }

    /// Inverse of [`ScalingData::apply`].
    pub fn unapply(&self, p: &QpProblem) -> QpProblem {
        QpProblem {
            q_mat: p.q_mat.scale(&self.dinv, &self.dinv).scaled_by(self.cinv),
            q: p.q.iter().zip(&self.dinv).map(|(q, d)| self.cinv * d * q).collect(),
            a: p.a.scale(&self.einv, &self.dinv),
            l: p.l.iter().zip(&self.einv).map(|(l, e)| l * e).collect(),
            u: p.u.iter().zip(&self.einv).map(|(u, e)| u * e).collect(),
        }
    }
}

/// Runs `iters` Ruiz sweeps on `A` and returns `(D, E, Ā = EAD)`.
///
/// Each sweep computes the row factors `√‖Ā_i·‖∞` and column factors
/// `√‖Ā_·j‖∞` from the same pre-sweep `Ā` and applies them jointly.  Empty
/// rows and columns get factor 1.  `Ā` is recomputed from the original `A`
/// after every sweep, so `Ā = EAD` holds exactly.
pub fn ruiz_equilibrate(a: &SparseMatrix, iters: usize) -> (Vec<f64>, Vec<f64>, SparseMatrix) {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = vec![1.0; n];
    let mut e = vec![1.0; m];
    let mut abar = a.clone();
    let factor = |norm: f64| if norm > 0.0 { norm.sqrt() } else { 1.0 };
    for _ in 0..iters {
        let rows = abar.row_inf_norms();
        let cols = abar.col_inf_norms();
        for (ei, r) in e.iter_mut().zip(rows) {
            *ei /= factor(r);
        }
        for (dj, c) in d.iter_mut().zip(cols) {
            *dj /= factor(c);
        }
        abar = a.scale(&e, &d);
    }
    (d, e, abar)
}

/// Scales `p` with `iters` Ruiz sweeps on `A` and `c = 1/max(1, ‖D(Qx⁰+q)‖∞)`.
///
/// `x0 = None` uses the zero vector.
pub fn scale_problem(p: &QpProblem, x0: Option<&[f64]>, iters: usize) -> Result<(QpProblem, ScalingData)> {
    let n = p.n();
    if let Some(x0) = x0 {
        if x0.len() != n {
            return Err(Error::DimensionMismatch(format!("x0 has length {}, expected {n}", x0.len())));
        }
    }
    let (d, e, _) = ruiz_equilibrate(&p.a, iters);
    let c = objective_constant(p, &d, x0);
    let s = ScalingData::from_parts(d, e, c);
    Ok((s.apply(p), s))
}

/// `c = 1/max(1, ‖D(Qx⁰+q)‖∞)`.
pub fn objective_constant(p: &QpProblem, d: &[f64], x0: Option<&[f64]>) -> f64 {
    let mut g = p.q.clone();
    if let Some(x0) = x0 {
        p.q_mat.mul_vec_acc(x0, &mut g);
    }
    let dg: Vec<f64> = g.iter().zip(d).map(|(g, d)| g * d).collect();
    1.0 / inf_norm(&dg).max(1.0)
}

/// `x = Dx̄`, `y = c⁻¹Eȳ`.
pub fn unscale_solution(xbar: &[f64], ybar: &[f64], s: &ScalingData) -> Result<(Vec<f64>, Vec<f64>)> {
    if xbar.len() != s.d.len() || ybar.len() != s.e.len() {
        return Err(Error::DimensionMismatch("solution and scaling dimensions differ".into()));
    }
    Ok((s.unscale_x(xbar), s.unscale_y(ybar)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_magnitude_matrix_is_fixed_point() {
        let a = SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![0.0, 1.0], vec![-1.0, 1.0]]);
        let (d, e, abar) = ruiz_equilibrate(&a, 5);
        assert_eq!(d, vec![1.0; 2]);
        assert_eq!(e, vec![1.0; 3]);
        assert_eq!(abar, a);
    }

    #[test]
    fn one_by_one_sweep() {
        let a = SparseMatrix::from_dense(&[vec![4.0]]);
        let (d, e, abar) = ruiz_equilibrate(&a, 1);
        assert_eq!(d, vec![0.5]);
        assert_eq!(e, vec![0.5]);
        assert_eq!(abar.get(0, 0), 1.0);
    }

    #[test]
    fn zero_rows_and_columns_keep_unit_scale() {
        let a = SparseMatrix::from_dense(&[vec![0.0, 0.0], vec![9.0, 0.0]]);
        let (d, e, _) = ruiz_equilibrate(&a, 3);
        assert_eq!(d[1], 1.0);
        assert_eq!(e[0], 1.0);
        assert!(d.iter().chain(&e).all(|v| *v > 0.0 && v.is_finite()));
    }

    #[test]
    fn identity_when_no_sweeps_and_small_gradient() {
        let p = QpProblem::new(
            SparseMatrix::identity(2),
            vec![0.5, -1.0],
            SparseMatrix::from_dense(&[vec![3.0, 1.0]]),
            vec![-1.0],
            vec![1.0],
        )
        .unwrap();
        let (sp, s) = scale_problem(&p, None, 0).unwrap();
        assert_eq!(s, ScalingData::identity(2, 1));
        assert_eq!(sp, p);
    }

    #[test]
    fn objective_constant_example() {
        let p = QpProblem::new(
            SparseMatrix::zeros(2, 2, true),
            vec![10.0, 0.0],
            SparseMatrix::identity(2).to_general(),
            vec![-1.0; 2],
            vec![1.0; 2],
        )
        .unwrap();
        let (sp, s) = scale_problem(&p, Some(&[0.0, 0.0]), 0).unwrap();
        assert_eq!(s.c, 0.1);
        assert_eq!(sp.q, vec![1.0, 0.0]);
    }

    #[test]
    fn unscale_formula() {
        let s = ScalingData::from_parts(vec![2.0], vec![3.0], 0.5);
        let (x, y) = unscale_solution(&[1.0], &[1.0], &s).unwrap();
        assert_eq!(x, vec![2.0]);
        assert_eq!(y, vec![6.0]);
        assert!(unscale_solution(&[1.0, 2.0], &[1.0], &s).is_err());
    }

    #[test]
    fn infinite_bounds_stay_infinite() {
        let p = QpProblem::new(
            SparseMatrix::identity(1),
            vec![0.0],
            SparseMatrix::from_dense(&[vec![5.0], vec![0.1]]),
            vec![f64::NEG_INFINITY, 0.0],
            vec![1.0, f64::INFINITY],
        )
        .unwrap();
        let (sp, _) = scale_problem(&p, None, 10).unwrap();
        assert_eq!(sp.l[0], f64::NEG_INFINITY);
        assert_eq!(sp.u[1], f64::INFINITY);
    }
}

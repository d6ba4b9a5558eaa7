//! Termination and infeasibility tests on the scaled iterates, plus an
//! independent verifier that works on the original (unscaled) data only.

use serde::{Deserialize, Serialize};

use crate::problem::{clamp, dot, inf_norm, QpProblem};
use crate::scaling::ScalingData;

/// Unscaled residual norms and their tolerance thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residuals {
    /// `(1/c)‖D⁻¹(Q̄x̄ + q̄ + Āᵀȳ)‖∞`.
    pub dual: f64,
    /// `(1/c)·max(‖D⁻¹Q̄x̄‖∞, ‖D⁻¹q̄‖∞, ‖D⁻¹Āᵀȳ‖∞)`.
    pub dual_scale: f64,
    /// `‖E⁻¹(Āx̄ − z̄)‖∞`.
    pub prim: f64,
    /// `max(‖E⁻¹Āx̄‖∞, ‖E⁻¹z̄‖∞)`.
    pub prim_scale: f64,
}

impl Residuals {
    /// `dual ≤ εa + εr·dual_scale`.
    pub fn dual_ok(&self, eps_abs: f64, eps_rel: f64) -> bool {
        self.dual <= eps_abs + eps_rel * self.dual_scale
    }

    /// `prim ≤ εa + εr·prim_scale`.
    pub fn prim_ok(&self, eps_abs: f64, eps_rel: f64) -> bool {
        self.prim <= eps_abs + eps_rel * self.prim_scale
    }
}

fn scaled_inf_norm(v: &[f64], w: &[f64], factor: f64) -> f64 {
    v.iter().zip(w).fold(0.0f64, |m, (a, b)| m.max((a * b).abs())) * factor
}

/// Dual residual of `Q̄x̄ + q̄ + Āᵀȳ` given the products `Q̄x̄` and `Āᵀȳ`,
/// optionally with the proximal term `Σx⁻¹(x̄ − x̂)` added.
pub fn dual_residual(
    s: &ScalingData,
    qx: &[f64],
    q: &[f64],
    aty: &[f64],
    prox: Option<&[f64]>,
) -> (f64, f64) {
    let n = qx.len();
    let mut r = vec![0.0; n];
    for j in 0..n {
        r[j] = qx[j] + q[j] + aty[j];
        if let Some(p) = prox {
            r[j] += p[j];
        }
    }
    let res = scaled_inf_norm(&r, &s.dinv, s.cinv);
    let scale = scaled_inf_norm(qx, &s.dinv, s.cinv)
        .max(scaled_inf_norm(q, &s.dinv, s.cinv))
        .max(scaled_inf_norm(aty, &s.dinv, s.cinv));
    (res, scale)
}

/// Primal residual `‖E⁻¹(Āx̄ − z̄)‖∞` and its scale.
pub fn primal_residual(s: &ScalingData, ax: &[f64], z: &[f64]) -> (f64, f64) {
    let r: Vec<f64> = ax.iter().zip(z).map(|(a, b)| a - b).collect();
    (
        scaled_inf_norm(&r, &s.einv, 1.0),
        scaled_inf_norm(ax, &s.einv, 1.0).max(scaled_inf_norm(z, &s.einv, 1.0)),
    )
}

/// Primal infeasibility test at `δȳ` on the scaled problem `sp`.
///
/// True iff `δȳ ≠ 0`, `‖D⁻¹Āᵀδȳ‖∞ ≤ ε‖Eδȳ‖∞` and
/// `ūᵀ[δȳ]₊ − ℓ̄ᵀ[−δȳ]₊ ≤ −ε‖Eδȳ‖∞`.  Returns the certificate `c⁻¹Eδȳ`.
pub fn check_primal_infeasibility(sp: &QpProblem, s: &ScalingData, dy: &[f64], eps: f64) -> Option<Vec<f64>> {
    let ey = scaled_inf_norm(dy, &s.e, 1.0);
    if ey == 0.0 {
        return None;
    }
    let aty = sp.a.tmul_vec(dy);
    if scaled_inf_norm(&aty, &s.dinv, 1.0) > eps * ey {
        return None;
    }
    if support_value(&sp.l, &sp.u, dy) > -eps * ey {
        return None;
    }
    Some(dy.iter().zip(&s.e).map(|(v, e)| s.cinv * e * v).collect())
}

/// `uᵀ[y]₊ − ℓᵀ[−y]₊`, where zero multipliers contribute 0 regardless of the bound.
fn support_value(l: &[f64], u: &[f64], y: &[f64]) -> f64 {
    let mut v = 0.0;
    for i in 0..y.len() {
        if y[i] > 0.0 {
            v += u[i] * y[i];
        } else if y[i] < 0.0 {
            v += l[i] * y[i];
        }
    }
    v
}

/// Componentwise recession-cone test `(E⁻¹Āδx̄)_i` against `±ε‖Dδx̄‖∞`.
fn recession_ok(l: &[f64], u: &[f64], adx: &[f64], tol: f64) -> bool {
    (0..adx.len()).all(|i| {
        let v = adx[i];
        let lo_ok = l[i] == f64::NEG_INFINITY || v >= -tol;
        let hi_ok = u[i] == f64::INFINITY || v <= tol;
        lo_ok && hi_ok
    })
}

/// Dual infeasibility test at `δx̄` on the scaled problem `sp`.
///
/// The constraint directions must lie (approximately) in the recession cone
/// of the box, and either `δx̄` is a zero-curvature descent direction or, in
/// nonconvex mode, a negative-curvature direction
/// `δx̄ᵀQ̄δx̄ ≤ −cε²‖δx̄‖₂²`.  Returns the certificate `Dδx̄`.
pub fn check_dual_infeasibility(
    sp: &QpProblem,
    s: &ScalingData,
    dx: &[f64],
    eps: f64,
    nonconvex: bool,
) -> Option<Vec<f64>> {
    let cert: Vec<f64> = dx.iter().zip(&s.d).map(|(v, d)| v * d).collect();
    let dnorm = inf_norm(&cert);
    if dnorm == 0.0 {
        return None;
    }
    let adx = sp.a.mul_vec(dx);
    let eadx: Vec<f64> = adx.iter().zip(&s.einv).map(|(a, e)| a * e).collect();
    if !recession_ok(&sp.l, &sp.u, &eadx, eps * dnorm) {
        return None;
    }
    let qdx = sp.q_mat.mul_vec(dx);
    let flat = scaled_inf_norm(&qdx, &s.dinv, 1.0) <= s.c * eps * dnorm && dot(&sp.q, dx) <= -s.c * eps * dnorm;
    let curved = nonconvex && dot(dx, &qdx) <= -s.c * eps * eps * dot(dx, dx);
    (flat || curved).then_some(cert)
}

/// Outcome of [`verify_kkt`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    /// `‖Qx + q + Aᵀy‖∞`.
    pub dual: f64,
    pub dual_tol: f64,
    /// `‖Ax − Π_C(Ax)‖∞`.
    pub prim: f64,
    pub prim_tol: f64,
    /// Every nonzero `y_i` sits at the bound its sign selects (within `prim_tol`).
    pub signs_consistent: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.dual <= self.dual_tol && self.prim <= self.prim_tol && self.signs_consistent
    }
}

/// Recomputes approximate stationarity of `(x, y)` from the original data,
/// independently of any solver state.
pub fn verify_kkt(p: &QpProblem, x: &[f64], y: &[f64], eps_abs: f64, eps_rel: f64) -> Verification {
    let qx = p.q_mat.mul_vec(x);
    let aty = p.a.tmul_vec(y);
    let r: Vec<f64> = (0..p.n()).map(|j| qx[j] + p.q[j] + aty[j]).collect();
    let dual = inf_norm(&r);
    let dual_tol = eps_abs + eps_rel * inf_norm(&qx).max(inf_norm(&p.q)).max(inf_norm(&aty));
    let ax = p.a.mul_vec(x);
    let px: Vec<f64> = (0..p.m()).map(|i| clamp(ax[i], p.l[i], p.u[i])).collect();
    let prim = ax.iter().zip(&px).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let prim_tol = eps_abs + eps_rel * inf_norm(&ax).max(inf_norm(&px));
    let signs_consistent = (0..p.m()).all(|i| {
        if y[i] > 0.0 {
            p.u[i].is_finite() && (ax[i] - p.u[i]).abs() <= prim_tol
        } else if y[i] < 0.0 {
            p.l[i].is_finite() && (ax[i] - p.l[i]).abs() <= prim_tol
        } else {
            true
        }
    });
    Verification { dual, dual_tol, prim, prim_tol, signs_consistent }
}

/// Recomputes the primal infeasibility conditions for an unscaled certificate
/// `δy`: `‖Aᵀδy‖∞ ≤ ε‖δy‖∞` and `uᵀ[δy]₊ − ℓᵀ[−δy]₊ ≤ −ε‖δy‖∞`.
pub fn verify_primal_certificate(p: &QpProblem, dy: &[f64], eps: f64) -> bool {
    let norm = inf_norm(dy);
    norm > 0.0 && inf_norm(&p.a.tmul_vec(dy)) <= eps * norm && support_value(&p.l, &p.u, dy) <= -eps * norm
}

/// Recomputes the dual infeasibility conditions for an unscaled certificate
/// `δx` on the original data.
///
/// The recession-cone and zero-curvature descent conditions are scale free.
/// The negative-curvature condition (nonconvex only) is
/// `δxᵀQδx ≤ −ε²‖D⁻¹δx‖₂²`, where `dinv` holds the variable scaling `D⁻¹`
/// the solver ran with (`None` for the identity).
pub fn verify_dual_certificate(p: &QpProblem, dx: &[f64], eps: f64, nonconvex: bool, dinv: Option<&[f64]>) -> bool {
    let norm = inf_norm(dx);
    if norm == 0.0 || !recession_ok(&p.l, &p.u, &p.a.mul_vec(dx), eps * norm) {
        return false;
    }
    let qdx = p.q_mat.mul_vec(dx);
    let flat = inf_norm(&qdx) <= eps * norm && dot(&p.q, dx) <= -eps * norm;
    let scaled_sq: f64 = match dinv {
        Some(w) => dx.iter().zip(w).map(|(v, w)| (v * w) * (v * w)).sum(),
        None => dot(dx, dx),
    };
    let curved = nonconvex && dot(dx, &qdx) <= -eps * eps * scaled_sq;
    flat || curved
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseMatrix;

    fn two_sided() -> QpProblem {
        // Rows x ≤ −1 and −x ≤ −1 (i.e. x ≥ 1).
        QpProblem::new(
            SparseMatrix::zeros(1, 1, true),
            vec![0.0],
            SparseMatrix::from_dense(&[vec![1.0], vec![-1.0]]),
            vec![f64::NEG_INFINITY; 2],
            vec![-1.0, -1.0],
        )
        .unwrap()
    }

    #[test]
    fn primal_infeasibility_hand_example() {
        let p = two_sided();
        let s = ScalingData::identity(1, 2);
        let cert = check_primal_infeasibility(&p, &s, &[1.0, 1.0], 1e-5).unwrap();
        assert_eq!(cert, vec![1.0, 1.0]);
        assert!(verify_primal_certificate(&p, &cert, 1e-5));
        assert!(check_primal_infeasibility(&p, &s, &[0.0, 0.0], 1e-5).is_none());
        // Sign-flipped multiplier meets an infinite bound: not a certificate.
        assert!(check_primal_infeasibility(&p, &s, &[-1.0, -1.0], 1e-5).is_none());
    }

    #[test]
    fn zero_multiplier_on_infinite_bound_counts_zero() {
        assert_eq!(support_value(&[f64::NEG_INFINITY], &[f64::INFINITY], &[0.0]), 0.0);
    }

    #[test]
    fn unbounded_lp_ray() {
        let p = QpProblem::new(
            SparseMatrix::zeros(1, 1, true),
            vec![-1.0],
            SparseMatrix::zeros(0, 1, false),
            vec![],
            vec![],
        )
        .unwrap();
        let s = ScalingData::identity(1, 0);
        let cert = check_dual_infeasibility(&p, &s, &[1.0], 1e-5, false).unwrap();
        assert!(cert[0] > 0.0);
        assert!(verify_dual_certificate(&p, &cert, 1e-5, false, None));
        assert!(check_dual_infeasibility(&p, &s, &[0.0], 1e-5, false).is_none());
        assert!(check_dual_infeasibility(&p, &s, &[-1.0], 1e-5, false).is_none());
    }

    #[test]
    fn negative_curvature_direction() {
        let p = QpProblem::new(
            SparseMatrix::diagonal(&[-2.0]),
            vec![0.0],
            SparseMatrix::zeros(0, 1, false),
            vec![],
            vec![],
        )
        .unwrap();
        let s = ScalingData::identity(1, 0);
        assert!(check_dual_infeasibility(&p, &s, &[0.3], 1e-5, true).is_some());
        assert!(check_dual_infeasibility(&p, &s, &[0.3], 1e-5, false).is_none());
        assert!(verify_dual_certificate(&p, &[0.3], 1e-5, true, None));
    }

    #[test]
    fn recession_cone_blocks_bounded_rows() {
        let p = QpProblem::new(
            SparseMatrix::zeros(1, 1, true),
            vec![-1.0],
            SparseMatrix::from_dense(&[vec![1.0]]),
            vec![f64::NEG_INFINITY],
            vec![3.0],
        )
        .unwrap();
        let s = ScalingData::identity(1, 1);
        assert!(check_dual_infeasibility(&p, &s, &[1.0], 1e-5, false).is_none());
    }

    #[test]
    fn clamped_scalar_kkt_point() {
        // min x² s.t. x ≥ 1: x = 1, y = −2.
        let p = QpProblem::new(
            SparseMatrix::diagonal(&[2.0]),
            vec![0.0],
            SparseMatrix::from_dense(&[vec![1.0]]),
            vec![1.0],
            vec![f64::INFINITY],
        )
        .unwrap();
        let v = verify_kkt(&p, &[1.0], &[-2.0], 1e-9, 0.0);
        assert_eq!(v.dual, 0.0);
        assert_eq!(v.prim, 0.0);
        assert!(v.ok());
        // Wrong multiplier sign points at the infinite bound.
        let v = verify_kkt(&p, &[1.0], &[2.0], 1e-9, 0.0);
        assert!(!v.ok());
    }

    #[test]
    fn residual_threshold_is_inclusive_only_at_equality() {
        let r = Residuals { dual: 1.1e-4, dual_scale: 10.0, prim: 0.0, prim_scale: 0.0 };
        assert!(!r.dual_ok(1e-4, 0.0));
        assert!(r.prim_ok(1e-4, 0.0));
    }
}

//! Penalty parameters: constraint penalties `Σy` and proximal weights `Σx`.

use serde::{Deserialize, Serialize};

use crate::eigen::{gershgorin_lower_bound, min_eigenvalue};
use crate::problem::inf_norm;
use crate::sparse::SparseMatrix;

/// Lower clamp of the initial constraint penalty.
pub const SIGMA_INIT_MIN: f64 = 1e-4;
/// Upper clamp of the initial constraint penalty.
pub const SIGMA_INIT_MAX: f64 = 1e4;
/// Margin added to `|λ*|` in the nonconvex proximal weight.
pub const CURVATURE_MARGIN: f64 = 1e-6;

/// Penalties and tolerances carried across outer iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyState {
    /// Diagonal of `Σy`.
    pub sigma_y: Vec<f64>,
    /// Diagonal of `Σx⁻¹`.
    pub sigma_x_inv: Vec<f64>,
    /// Outer primal tolerance `εa,k` (nonconvex mode).
    pub eps_abs_k: f64,
    /// Outer primal tolerance `εr,k` (nonconvex mode).
    pub eps_rel_k: f64,
    /// Inner tolerance `δa,k`.
    pub delta_abs: f64,
    /// Inner tolerance `δr,k`.
    pub delta_rel: f64,
}

/// Common initial penalty
/// `clamp(σ_init·max(1,|f(x̄⁰)|)/max(1, ½‖Āx̄⁰ − z⁰‖²), 10⁻⁴, 10⁴)`.
pub fn init_sigma(sigma_init: f64, objective: f64, residual: &[f64]) -> f64 {
    let viol = 0.5 * residual.iter().map(|r| r * r).sum::<f64>();
    (sigma_init * objective.abs().max(1.0) / viol.max(1.0)).clamp(SIGMA_INIT_MIN, SIGMA_INIT_MAX)
}

/// Componentwise penalty update.  Rows whose violation fell below `θ` times
/// the previous one keep their penalty; the others are multiplied by
/// `min(σ_max/σ_i, max(Δ|r_i|/‖r‖∞, 1))`.  Returns the number of rows changed.
pub fn update_sigma(sigma: &mut [f64], r: &[f64], r_prev: &[f64], theta: f64, delta: f64, sigma_max: f64) -> usize {
    let rmax = inf_norm(r);
    let mut changed = 0;
    for i in 0..sigma.len() {
        if r[i].abs() < theta * r_prev[i].abs() {
            continue;
        }
        let growth = if rmax > 0.0 { (delta * r[i].abs() / rmax).max(1.0) } else { 1.0 };
        let factor = (sigma_max / sigma[i]).min(growth);
        if factor != 1.0 {
            let new = (sigma[i] * factor).min(sigma_max);
            if new != sigma[i] {
                sigma[i] = new;
                changed += 1;
            }
        }
    }
    changed
}

/// Outcome of the proximal weight selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximalChoice {
    /// Common value of `Σx⁻¹`.
    pub sigma_x_inv: f64,
    /// Lower bound on `λ_min(Q̄)` used (nonconvex mode only).
    pub lambda_lb: Option<f64>,
    /// Whether the eigenvalue iteration converged (otherwise Gershgorin was used).
    pub eig_converged: Option<bool>,
}

/// Value of `Σx⁻¹` given a lower bound on the smallest eigenvalue of `Q̄`.
pub fn proximal_from_bound(lambda_lb: Option<f64>, gamma: f64) -> f64 {
    match lambda_lb {
        Some(l) if l < 0.0 => (l - CURVATURE_MARGIN).abs(),
        _ => 1.0 / gamma,
    }
}

/// Chooses `Σx⁻¹`: in nonconvex mode `|λ* − 10⁻⁶|` when the bound `λ*` on
/// `λ_min(Q̄)` is negative, otherwise `1/γ`.  The bound comes from the
/// eigenvalue iteration, or from Gershgorin discs when it does not converge.
pub fn select_proximal(q: &SparseMatrix, nonconvex: bool, gamma: f64, eig_tol: f64, eig_max_iter: usize) -> ProximalChoice {
    if !nonconvex || q.ncols() == 0 {
        return ProximalChoice { sigma_x_inv: 1.0 / gamma, lambda_lb: None, eig_converged: None };
    }
    let (lb, converged) = match min_eigenvalue(q, None, eig_tol, eig_max_iter) {
        Ok(est) if est.converged => (est.lambda_lb, true),
        _ => (gershgorin_lower_bound(q), false),
    };
    ProximalChoice { sigma_x_inv: proximal_from_bound(Some(lb), gamma), lambda_lb: Some(lb), eig_converged: Some(converged) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn init_sigma_examples() {
        assert_eq!(init_sigma(20.0, 0.0, &[0.0, 0.0]), 20.0);
        // Objective 10⁶ with unit violation: capped.
        assert_eq!(init_sigma(20.0, 1e6, &[2f64.sqrt()]), 1e4);
        // Violation ½‖r‖² = 10⁶: floored.
        assert_eq!(init_sigma(20.0, 1.0, &[2e6f64.sqrt(), 0.0]), 1e-4);
        assert_eq!(init_sigma(20.0, -3.0, &[]), 60.0);
    }

    #[test]
    fn update_sigma_examples() {
        // Residual halved: 0.5 ≥ θ so both rows take the growth branch; the
        // row at the max residual grows by Δ, the other has Δ|r|/‖r‖ = 0.5 → factor 1.
        let mut s = vec![1.0, 1.0];
        let n = update_sigma(&mut s, &[1.0, 0.005], &[2.0, 0.01], 0.25, 100.0, 1e9);
        assert_eq!(n, 1);
        assert_eq!(s, vec![100.0, 1.0]);

        // Sufficient decrease: untouched.
        let mut s = vec![5.0];
        assert_eq!(update_sigma(&mut s, &[0.1], &[1.0], 0.25, 100.0, 1e9), 0);
        assert_eq!(s[0], 5.0);

        // Cap.
        let mut s = vec![1e9, 1e8];
        update_sigma(&mut s, &[1.0, 1.0], &[1.0, 1.0], 0.25, 100.0, 1e9);
        assert_eq!(s, vec![1e9, 1e9]);

        // Zero residual everywhere: nothing changes.
        let mut s = vec![3.0];
        assert_eq!(update_sigma(&mut s, &[0.0], &[0.0], 0.25, 100.0, 1e9), 0);
    }

    #[test]
    fn proximal_choices() {
        let psd = SparseMatrix::diagonal(&[1.0, 2.0]);
        assert_eq!(select_proximal(&psd, false, 1e7, 1e-5, 100).sigma_x_inv, 1e-7);
        let zero = SparseMatrix::zeros(2, 2, true);
        let c = select_proximal(&zero, true, 1e7, 1e-5, 100);
        assert_eq!(c.sigma_x_inv, 1e-7);
        assert_relative_eq!(proximal_from_bound(Some(-10.0), 1e7), 10.000001, max_relative = 1e-15);
        let ind = SparseMatrix::diagonal(&[-10.0, 3.0]);
        let c = select_proximal(&ind, true, 1e7, 1e-5, 1000);
        assert!(c.sigma_x_inv >= 10.0);
    }
}

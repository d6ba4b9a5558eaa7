//! Exact stepsize along a Newton direction.
//!
//! Along `x + τd` the subproblem objective is a convex piecewise quadratic
//! whose derivative is
//! `ψ′(τ) = ητ + β + ⟨δ, [δτ − α]₊⟩`,
//! a nondecreasing piecewise affine function.  Its zero is the optimal step.

use crate::problem::{dot, QpProblem};

/// Piecewise affine derivative `ψ′(τ) = ητ + β + ⟨δ, [δτ − α]₊⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PwaDerivative {
    pub eta: f64,
    pub beta: f64,
    pub delta: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl PwaDerivative {
    /// `ψ′(τ)`.
    pub fn eval(&self, tau: f64) -> f64 {
        let mut v = self.eta * tau + self.beta;
        for (d, a) in self.delta.iter().zip(&self.alpha) {
            let h = d * tau - a;
            if h > 0.0 {
                v += d * h;
            }
        }
        v
    }

    /// `ψ(τ) − ψ(0)` up to a constant: `½ητ² + βτ + ½‖[δτ − α]₊‖²`.
    pub fn primitive(&self, tau: f64) -> f64 {
        let mut v = 0.5 * self.eta * tau * tau + self.beta * tau;
        for (d, a) in self.delta.iter().zip(&self.alpha) {
            let h = (d * tau - a).max(0.0);
            v += 0.5 * h * h;
        }
        v
    }

    /// Scale used for residual tolerances: `|η|·|τ| + |β| + ‖δ‖²`.
    pub fn scale_at(&self, tau: f64) -> f64 {
        self.eta.abs() * tau.abs() + self.beta.abs() + dot(&self.delta, &self.delta)
    }
}

/// Builds `ψ′` for the step from `x` along `d`.
///
/// `η = ⟨d,(Q+Σx⁻¹)d⟩`, `β = ⟨d, Qx + Σx⁻¹(x−x̂) + q⟩`,
/// `δ = [−Σy^½Ad ; Σy^½Ad]`, `α = Σy^{−½}[y + Σy(Ax−ℓ) ; Σy(u−Ax) − y]`.
#[allow(clippy::too_many_arguments)]
pub fn build_derivative(
    p: &QpProblem,
    x: &[f64],
    xhat: &[f64],
    d: &[f64],
    y: &[f64],
    sigma_y: &[f64],
    sigma_x_inv: &[f64],
) -> PwaDerivative {
    let qx = p.q_mat.mul_vec(x);
    let ax = p.a.mul_vec(x);
    let qd = p.q_mat.mul_vec(d);
    let ad = p.a.mul_vec(d);
    derivative_from_products(p, x, xhat, d, &qx, &ax, &qd, &ad, y, sigma_y, sigma_x_inv)
}

/// As [`build_derivative`] with the products `Qx, Ax, Qd, Ad` supplied.
#[allow(clippy::too_many_arguments)]
pub fn derivative_from_products(
    p: &QpProblem,
    x: &[f64],
    xhat: &[f64],
    d: &[f64],
    qx: &[f64],
    ax: &[f64],
    qd: &[f64],
    ad: &[f64],
    y: &[f64],
    sigma_y: &[f64],
    sigma_x_inv: &[f64],
) -> PwaDerivative {
    let n = p.n();
    let m = p.m();
    let mut eta = dot(d, qd);
    let mut beta = 0.0;
    for j in 0..n {
        eta += sigma_x_inv[j] * d[j] * d[j];
        beta += d[j] * (qx[j] + sigma_x_inv[j] * (x[j] - xhat[j]) + p.q[j]);
    }
    let mut delta = vec![0.0; 2 * m];
    let mut alpha = vec![0.0; 2 * m];
    for i in 0..m {
        let s = sigma_y[i].sqrt();
        delta[i] = -s * ad[i];
        delta[m + i] = s * ad[i];
        alpha[i] = (y[i] + sigma_y[i] * (ax[i] - p.l[i])) / s;
        alpha[m + i] = (sigma_y[i] * (p.u[i] - ax[i]) - y[i]) / s;
    }
    PwaDerivative { eta, beta, delta, alpha }
}

/// Zero of `ψ′`.
///
/// Breakpoints `t_i = α_i/δ_i` (pairs with `δ_i = 0` or infinite `α_i` are
/// skipped) are sorted and deduplicated; a binary search finds the first
/// `t_i` with `ψ′(t_i) ≥ 0` and the zero is interpolated on `[t_{i−1}, t_i]`.
/// Left of the first breakpoint and right of the last one, the zero of the
/// outer affine piece is used.
pub fn exact_linesearch(pwa: &PwaDerivative) -> f64 {
    let mut t: Vec<f64> = pwa
        .delta
        .iter()
        .zip(&pwa.alpha)
        .filter(|(d, a)| **d != 0.0 && a.is_finite())
        .map(|(d, a)| a / d)
        .collect();
    if t.is_empty() {
        return -pwa.beta / pwa.eta;
    }
    t.sort_by(f64::total_cmp);
    t.dedup();

    // Slopes of the outermost affine pieces.
    let finite = |d: &&f64, a: &&f64| **d != 0.0 && a.is_finite();
    let left_slope = pwa.eta
        + pwa.delta.iter().zip(&pwa.alpha).filter(|(d, a)| finite(d, a) && **d < 0.0).map(|(d, _)| d * d).sum::<f64>();
    let right_slope = pwa.eta
        + pwa.delta.iter().zip(&pwa.alpha).filter(|(d, a)| finite(d, a) && **d > 0.0).map(|(d, _)| d * d).sum::<f64>();

    // First index with ψ′(t_i) ≥ 0.
    let (mut lo, mut hi) = (0usize, t.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pwa.eval(t[mid]) >= 0.0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let i = lo;
    if i == t.len() {
        let last = t[t.len() - 1];
        return last - pwa.eval(last) / right_slope;
    }
    let ti = t[i];
    let fi = pwa.eval(ti);
    if i == 0 {
        return ti - fi / left_slope;
    }
    let tp = t[i - 1];
    let fp = pwa.eval(tp);
    tp - (ti - tp) / (fi - fp) * fp
}

//! Semismooth Newton machinery for the inner subproblem
//!
//! `φ(x) = ½xᵀQx + qᵀx + ½‖x − x̂‖²_{Σx⁻¹} + ½ dist²_{Σy}(Ax + Σy⁻¹y, C)`.
//!
//! The generalized Hessian is `H = Q + A_Jᵀ Σy_J A_J + Σx⁻¹` where `J` is the
//! active set.  The direction is obtained either from `H` itself (Schur mode)
//! or from the augmented quasidefinite KKT matrix
//! `[[Q + Σx⁻¹, A_Jᵀ], [A_J, −Σy⁻¹]]`, whose inactive constraint rows are
//! empty apart from their diagonal (KKT mode).  Between refactorizations the
//! factors are kept current with row additions/deletions (KKT) or rank-1
//! updates (Schur).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{clamp, dot, QpProblem};
use crate::sparse::{compute_ordering, LdlFactors, SparseMatrix};

/// Ratio threshold below which the KKT formulation is preferred.
pub const KKT_RATIO_THRESHOLD: f64 = 2.0;

/// Linear system formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinsysMode {
    Kkt,
    Schur,
}

/// Active constraint set with the changes relative to a previous set.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    mask: Vec<bool>,
    /// Sorted member indices.
    pub members: Vec<usize>,
    /// Indices that became active (sorted).
    pub entered: Vec<usize>,
    /// Indices that stopped being active (sorted).
    pub left: Vec<usize>,
}

impl ActiveSet {
    /// Builds a set from a membership mask with no previous set.
    pub fn from_mask(mask: Vec<bool>) -> Self {
        let members: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        Self { entered: members.clone(), members, left: Vec::new(), mask }
    }

    /// The empty set over `m` constraints.
    pub fn empty(m: usize) -> Self {
        Self::from_mask(vec![false; m])
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Active set `J = { i : (Ax + Σy⁻¹y)_i ∉ [ℓ_i, u_i] }` (boundary values are
/// inactive), with deltas against `previous` (all members enter when `None`).
pub fn detect_active_set(
    ax: &[f64],
    y: &[f64],
    sigma_y: &[f64],
    l: &[f64],
    u: &[f64],
    previous: Option<&ActiveSet>,
) -> ActiveSet {
    let m = ax.len();
    let mask: Vec<bool> = (0..m)
        .map(|i| {
            let w = ax[i] + y[i] / sigma_y[i];
            w < l[i] || w > u[i]
        })
        .collect();
    match previous {
        None => ActiveSet::from_mask(mask),
        Some(prev) => {
            let members = (0..m).filter(|&i| mask[i]).collect();
            let entered = (0..m).filter(|&i| mask[i] && !prev.mask[i]).collect();
            let left = (0..m).filter(|&i| !mask[i] && prev.mask[i]).collect();
            ActiveSet { mask, members, entered, left }
        }
    }
}

/// Gradient of the subproblem together with the projected point and trial
/// multiplier it is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemGradient {
    /// `∇φ = Qx + q + Aᵀỹ + Σx⁻¹(x − x̂)`.
    pub grad: Vec<f64>,
    /// Trial multiplier `ỹ = y + Σy(Ax − z)`.
    pub ytrial: Vec<f64>,
    /// `z = Π_C(Ax + Σy⁻¹y)`.
    pub z: Vec<f64>,
    /// `Qx` (reused by the caller for residuals).
    pub qx: Vec<f64>,
    /// `Aᵀỹ` (reused by the caller for residuals).
    pub aty: Vec<f64>,
}

/// Evaluates `∇φ` at `x` given `Ax`.
#[allow(clippy::too_many_arguments)]
pub fn subproblem_gradient(
    p: &QpProblem,
    x: &[f64],
    ax: &[f64],
    xhat: &[f64],
    y: &[f64],
    sigma_y: &[f64],
    sigma_x_inv: &[f64],
) -> SubproblemGradient {
    let m = p.m();
    let mut z = vec![0.0; m];
    let mut ytrial = vec![0.0; m];
    for i in 0..m {
        // ỹ = y + Σy(Ax − z) = Σy(w − Π(w)) with w = Ax + Σy⁻¹y; the latter
        // form is exactly zero on rows strictly inside the box.
        let w = ax[i] + y[i] / sigma_y[i];
        z[i] = clamp(w, p.l[i], p.u[i]);
        ytrial[i] = sigma_y[i] * (w - z[i]);
    }
    let qx = p.q_mat.mul_vec(x);
    let aty = p.a.tmul_vec(&ytrial);
    let grad = (0..p.n())
        .map(|j| qx[j] + p.q[j] + aty[j] + sigma_x_inv[j] * (x[j] - xhat[j]))
        .collect();
    SubproblemGradient { grad, ytrial, z, qx, aty }
}

/// `φ(x)` up to an additive constant independent of `x`.
pub fn subproblem_value(p: &QpProblem, x: &[f64], xhat: &[f64], y: &[f64], sigma_y: &[f64], sigma_x_inv: &[f64]) -> f64 {
    let ax = p.a.mul_vec(x);
    let mut v = p.objective(x);
    for j in 0..p.n() {
        v += 0.5 * sigma_x_inv[j] * (x[j] - xhat[j]).powi(2);
    }
    for i in 0..p.m() {
        let w = ax[i] + y[i] / sigma_y[i];
        let dist = w - clamp(w, p.l[i], p.u[i]);
        v += 0.5 * sigma_y[i] * dist * dist;
    }
    v
}

/// Number of off-diagonal entries of `Q` counted in both triangles.
fn full_offdiag_count(q: &SparseMatrix) -> usize {
    let mut off = 0;
    for j in 0..q.ncols() {
        for (i, _) in q.col(j) {
            if i != j {
                off += if q.is_symmetric() { 2 } else { 1 };
            }
        }
    }
    off
}

/// Estimated flop ratio `(n/(n+m)) · |K|² / |H̃|²` between the full KKT and
/// Schur factorizations.  Counts include both triangles and the diagonal.
pub fn linsys_ratio(q: &SparseMatrix, a: &SparseMatrix) -> f64 {
    let n = a.ncols();
    let m = a.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    let q_reg = full_offdiag_count(q) + n; // |Q + Σx⁻¹|
    let k_count = (q_reg + 2 * a.nnz() + m) as f64;
    let counts = a.row_counts();
    let mut h_est = q_reg as f64;
    if let Some((ihat, &ahat)) = counts.iter().enumerate().max_by_key(|&(i, c)| (*c, std::cmp::Reverse(i))) {
        let ahat_f = ahat as f64;
        h_est += ahat_f * ahat_f - ahat_f;
        for (i, &c) in counts.iter().enumerate() {
            if i == ihat {
                continue;
            }
            let c = c as f64;
            let overlap = (ahat_f + c - n as f64).max(0.0);
            h_est += c * c - c - overlap * overlap + overlap;
        }
    }
    (n as f64 / (n + m) as f64) * k_count * k_count / (h_est * h_est)
}

/// Chooses KKT iff the ratio is strictly below 2; problems without
/// constraints always use the Schur system.
pub fn select_linsys(q: &SparseMatrix, a: &SparseMatrix) -> LinsysMode {
    if a.nrows() == 0 {
        return LinsysMode::Schur;
    }
    mode_for_ratio(linsys_ratio(q, a))
}

/// KKT iff `ratio < 2` (a tie selects Schur).
pub fn mode_for_ratio(ratio: f64) -> LinsysMode {
    if ratio < KKT_RATIO_THRESHOLD {
        LinsysMode::Kkt
    } else {
        LinsysMode::Schur
    }
}

/// Limits deciding between factor updates and refactorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdatePolicy {
    pub max_rank_update: usize,
    pub max_rank_update_fraction: f64,
    /// Disables updates entirely (always refactorize).
    pub always_refactor: bool,
}

impl Default for UpdatePolicy {
    fn default() -> Self {
        Self { max_rank_update: 160, max_rank_update_fraction: 0.1, always_refactor: false }
    }
}

impl UpdatePolicy {
    /// `min(max_rank_update, fraction·(n+m))`.
    pub fn limit(&self, n: usize, m: usize) -> f64 {
        (self.max_rank_update as f64).min(self.max_rank_update_fraction * (n + m) as f64)
    }
}

/// Instrumentation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonCounters {
    pub factorizations: usize,
    /// Refresh calls served by low-rank modifications.
    pub update_refreshes: usize,
    pub rank1_updates: usize,
    pub row_adds: usize,
    pub row_deletes: usize,
}

/// Factored Newton system for the current active set and penalties.
#[derive(Debug, Clone)]
pub struct NewtonSystem {
    mode: LinsysMode,
    n: usize,
    m: usize,
    factors: LdlFactors,
    perm: Vec<usize>,
    q_mat: SparseMatrix,
    a_rows: Vec<Vec<(usize, f64)>>,
    active: Vec<bool>,
    /// Σy value each constraint row was last written with.
    written_sigma: Vec<f64>,
    sigma_x_inv: Vec<f64>,
    policy: UpdatePolicy,
    counters: NewtonCounters,
}

impl NewtonSystem {
    /// Computes the fill-reducing ordering and factorizes for `active`.
    pub fn new(
        p: &QpProblem,
        mode: LinsysMode,
        active: &ActiveSet,
        sigma_y: &[f64],
        sigma_x_inv: &[f64],
        policy: UpdatePolicy,
    ) -> Result<Self> {
        let (n, m) = (p.n(), p.m());
        let a_rows = p.a.rows();
        let perm = match mode {
            LinsysMode::Kkt => compute_ordering(&kkt_pattern(&p.q_mat, &p.a))?,
            LinsysMode::Schur => compute_ordering(&schur_pattern(&p.q_mat, &a_rows, n))?,
        };
        let k = match mode {
            LinsysMode::Kkt => assemble_kkt(&p.q_mat, &a_rows, active.mask(), sigma_y, sigma_x_inv)?,
            LinsysMode::Schur => assemble_schur(&p.q_mat, &a_rows, active.mask(), sigma_y, sigma_x_inv)?,
        };
        let factors = LdlFactors::factorize(&k, &perm)?;
        Ok(Self {
            mode,
            n,
            m,
            factors,
            perm,
            q_mat: p.q_mat.clone(),
            a_rows,
            active: active.mask().to_vec(),
            written_sigma: sigma_y.to_vec(),
            sigma_x_inv: sigma_x_inv.to_vec(),
            policy,
            counters: NewtonCounters { factorizations: 1, ..Default::default() },
        })
    }

    pub fn mode(&self) -> LinsysMode {
        self.mode
    }

    pub fn counters(&self) -> NewtonCounters {
        self.counters
    }

    pub fn factors(&self) -> &LdlFactors {
        &self.factors
    }

    /// Active mask the factors currently represent.
    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    /// Refactorizes from scratch.
    pub fn refactor(&mut self, active: &[bool], sigma_y: &[f64], sigma_x_inv: &[f64]) -> Result<()> {
        let k = match self.mode {
            LinsysMode::Kkt => assemble_kkt(&self.q_mat, &self.a_rows, active, sigma_y, sigma_x_inv)?,
            LinsysMode::Schur => assemble_schur(&self.q_mat, &self.a_rows, active, sigma_y, sigma_x_inv)?,
        };
        self.factors = LdlFactors::factorize(&k, &self.perm)?;
        self.active = active.to_vec();
        self.written_sigma = sigma_y.to_vec();
        self.sigma_x_inv = sigma_x_inv.to_vec();
        self.counters.factorizations += 1;
        Ok(())
    }

    /// Brings the factors in line with `active`, `Σy` and `Σx⁻¹`, by low-rank
    /// modification when the number of changes is within the policy limits
    /// and by refactorization otherwise.  Returns `true` if it refactorized.
    pub fn refresh(&mut self, active: &[bool], sigma_y: &[f64], sigma_x_inv: &[f64]) -> Result<bool> {
        if active.len() != self.m || sigma_y.len() != self.m || sigma_x_inv.len() != self.n {
            return Err(Error::DimensionMismatch("refresh inputs do not match the system".into()));
        }
        if sigma_x_inv != self.sigma_x_inv.as_slice() {
            self.refactor(active, sigma_y, sigma_x_inv)?;
            return Ok(true);
        }
        let entered: Vec<usize> = (0..self.m).filter(|&i| active[i] && !self.active[i]).collect();
        let left: Vec<usize> = (0..self.m).filter(|&i| !active[i] && self.active[i]).collect();
        let resigned: Vec<usize> = (0..self.m)
            .filter(|&i| active[i] && self.active[i] && sigma_y[i] != self.written_sigma[i])
            .collect();
        if entered.is_empty() && left.is_empty() && resigned.is_empty() {
            return Ok(false);
        }
        let limit = self.policy.limit(self.n, self.m);
        let within = !self.policy.always_refactor
            && (entered.len() + left.len()) as f64 <= limit
            && (resigned.len() as f64) < limit / 2.0;
        if !within {
            self.refactor(active, sigma_y, sigma_x_inv)?;
            return Ok(true);
        }
        let result = match self.mode {
            LinsysMode::Kkt => self.update_kkt(&entered, &left, &resigned, sigma_y),
            LinsysMode::Schur => self.update_schur(&entered, &left, &resigned, sigma_y),
        };
        match result {
            Ok(()) => {
                self.active = active.to_vec();
                self.counters.update_refreshes += 1;
                Ok(false)
            }
            Err(_) => {
                // A numerically failed modification falls back to a fresh factorization.
                self.refactor(active, sigma_y, sigma_x_inv)?;
                Ok(true)
            }
        }
    }

    fn update_kkt(&mut self, entered: &[usize], left: &[usize], resigned: &[usize], sigma_y: &[f64]) -> Result<()> {
        let n = self.n;
        for &i in left.iter().chain(resigned) {
            self.factors.row_delete(n + i, -1.0 / self.written_sigma[i])?;
            self.counters.row_deletes += 1;
        }
        for &i in entered.iter().chain(resigned) {
            self.factors.row_add(n + i, &self.a_rows[i], -1.0 / sigma_y[i])?;
            self.written_sigma[i] = sigma_y[i];
            self.counters.row_adds += 1;
        }
        Ok(())
    }

    fn update_schur(&mut self, entered: &[usize], left: &[usize], resigned: &[usize], sigma_y: &[f64]) -> Result<()> {
        let apply = |f: &mut LdlFactors, row: &[(usize, f64)], weight: f64| -> Result<()> {
            if weight == 0.0 || row.is_empty() {
                return Ok(());
            }
            let s = weight.abs().sqrt();
            let w: Vec<(usize, f64)> = row.iter().map(|&(j, v)| (j, s * v)).collect();
            f.rank1_update(&w, weight.signum())
        };
        // Additions first so that the intermediate matrices stay positive definite.
        let mut ups: Vec<(usize, f64)> = entered.iter().map(|&i| (i, sigma_y[i])).collect();
        let mut downs: Vec<(usize, f64)> = left.iter().map(|&i| (i, -self.written_sigma[i])).collect();
        for &i in resigned {
            let dw = sigma_y[i] - self.written_sigma[i];
            if dw > 0.0 {
                ups.push((i, dw));
            } else {
                downs.push((i, dw));
            }
        }
        for (i, w) in ups.into_iter().chain(downs) {
            apply(&mut self.factors, &self.a_rows[i], w)?;
            self.counters.rank1_updates += 1;
        }
        for &i in entered.iter().chain(resigned) {
            self.written_sigma[i] = sigma_y[i];
        }
        Ok(())
    }

    /// Solves for the Newton direction `H d = −∇φ`.  In KKT mode the
    /// multiplier block `λ` is also returned (zero on inactive rows);
    /// Schur mode returns an empty `λ`.
    pub fn direction_with_multipliers(&self, grad: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if grad.len() != self.n {
            return Err(Error::DimensionMismatch(format!("gradient has length {}, expected {}", grad.len(), self.n)));
        }
        match self.mode {
            LinsysMode::Schur => {
                let mut d: Vec<f64> = grad.iter().map(|g| -g).collect();
                self.factors.solve_in_place(&mut d)?;
                Ok((d, Vec::new()))
            }
            LinsysMode::Kkt => {
                let mut rhs = vec![0.0; self.n + self.m];
                for (r, g) in rhs.iter_mut().zip(grad) {
                    *r = -g;
                }
                self.factors.solve_in_place(&mut rhs)?;
                let lambda = rhs.split_off(self.n);
                Ok((rhs, lambda))
            }
        }
    }

    /// Newton direction `d` with `H d = −∇φ`.
    pub fn direction(&self, grad: &[f64]) -> Result<Vec<f64>> {
        Ok(self.direction_with_multipliers(grad)?.0)
    }
}

/// Upper-triangle pattern of the fully-active KKT matrix.
fn kkt_pattern(q: &SparseMatrix, a: &SparseMatrix) -> SparseMatrix {
    let mask = vec![true; a.nrows()];
    assemble_kkt(q, &a.rows(), &mask, &vec![1.0; a.nrows()], &vec![1.0; a.ncols()]).expect("pattern assembly")
}

/// Upper-triangle pattern of `Q + AᵀA + I`.
fn schur_pattern(q: &SparseMatrix, a_rows: &[Vec<(usize, f64)>], n: usize) -> SparseMatrix {
    let mask = vec![true; a_rows.len()];
    assemble_schur(q, a_rows, &mask, &vec![1.0; a_rows.len()], &vec![1.0; n]).expect("pattern assembly")
}

fn q_triplets(q: &SparseMatrix, sigma_x_inv: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut t = q.triplets();
    for (j, &s) in sigma_x_inv.iter().enumerate() {
        t.push((j, j, s));
    }
    t
}

/// `[[Q + Σx⁻¹, A_Jᵀ], [A_J, −Σy⁻¹]]` in upper-triangle storage.
pub fn assemble_kkt(
    q: &SparseMatrix,
    a_rows: &[Vec<(usize, f64)>],
    active: &[bool],
    sigma_y: &[f64],
    sigma_x_inv: &[f64],
) -> Result<SparseMatrix> {
    let n = sigma_x_inv.len();
    let m = a_rows.len();
    let mut t = q_triplets(q, sigma_x_inv);
    for (i, row) in a_rows.iter().enumerate() {
        if active[i] {
            t.extend(row.iter().map(|&(j, v)| (j, n + i, v)));
        }
        t.push((n + i, n + i, -1.0 / sigma_y[i]));
    }
    SparseMatrix::from_triplets(n + m, n + m, &t, true)
}

/// `Q + A_Jᵀ Σy_J A_J + Σx⁻¹` in upper-triangle storage.
pub fn assemble_schur(
    q: &SparseMatrix,
    a_rows: &[Vec<(usize, f64)>],
    active: &[bool],
    sigma_y: &[f64],
    sigma_x_inv: &[f64],
) -> Result<SparseMatrix> {
    let n = sigma_x_inv.len();
    let mut t = q_triplets(q, sigma_x_inv);
    for (i, row) in a_rows.iter().enumerate() {
        if !active[i] {
            continue;
        }
        for &(j, vj) in row {
            for &(k, vk) in row {
                if j <= k {
                    t.push((j, k, sigma_y[i] * vj * vk));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &t, true)
}

/// `⟨∇φ, d⟩`, used by callers to verify descent.
pub fn directional_derivative(grad: &[f64], d: &[f64]) -> f64 {
    dot(grad, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar_problem() -> QpProblem {
        QpProblem::new(
            SparseMatrix::diagonal(&[2.0]),
            vec![0.0],
            SparseMatrix::from_dense(&[vec![1.0]]),
            vec![1.0],
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn active_set_membership() {
        let ax = [-2.0, 0.0, 5.0];
        let s = detect_active_set(&ax, &[0.0; 3], &[1.0; 3], &[-1.0; 3], &[1.0; 3], None);
        assert_eq!(s.members, vec![0, 2]);
        assert_eq!(s.entered, vec![0, 2]);
        let s2 = detect_active_set(&[0.0, 3.0, 0.0], &[0.0; 3], &[1.0; 3], &[-1.0; 3], &[1.0; 3], Some(&s));
        assert_eq!(s2.members, vec![1]);
        assert_eq!(s2.entered, vec![1]);
        assert_eq!(s2.left, vec![0, 2]);
    }

    #[test]
    fn boundary_is_inactive_and_interior_empty() {
        let s = detect_active_set(&[-1.0, 1.0, 0.3], &[0.0; 3], &[1.0; 3], &[-1.0; 3], &[1.0; 3], None);
        assert!(s.is_empty());
    }

    #[test]
    fn scalar_gradient_example() {
        let p = scalar_problem();
        let g = subproblem_gradient(&p, &[0.0], &[0.0], &[0.0], &[0.0], &[10.0], &[1e-7]);
        assert_eq!(g.z, vec![1.0]);
        assert_eq!(g.ytrial, vec![-10.0]);
        assert_eq!(g.grad, vec![-10.0]);
    }

    #[test]
    fn zero_gradient_at_stationary_interior_point() {
        let p = QpProblem::new(
            SparseMatrix::diagonal(&[1.0]),
            vec![0.0],
            SparseMatrix::from_dense(&[vec![1.0]]),
            vec![-1.0],
            vec![1.0],
        )
        .unwrap();
        let g = subproblem_gradient(&p, &[0.0], &[0.0], &[0.0], &[0.0], &[1.0], &[1e-7]);
        assert_eq!(g.grad, vec![0.0]);
    }

    #[test]
    fn scalar_direction_both_modes() {
        let p = scalar_problem();
        let active = ActiveSet::from_mask(vec![true]);
        for mode in [LinsysMode::Kkt, LinsysMode::Schur] {
            let sys = NewtonSystem::new(&p, mode, &active, &[100.0], &[1e-7], UpdatePolicy::default()).unwrap();
            let d = sys.direction(&[-10.0]).unwrap();
            assert_relative_eq!(d[0], 10.0 / 102.0000001, max_relative = 1e-14);
            assert_eq!(sys.direction(&[0.0]).unwrap(), vec![0.0]);
        }
    }

    #[test]
    fn kkt_multipliers_vanish_on_inactive_rows() {
        let p = QpProblem::new(
            SparseMatrix::identity(2),
            vec![0.0; 2],
            SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, -1.0]]),
            vec![0.0; 2],
            vec![1.0; 2],
        )
        .unwrap();
        let active = ActiveSet::from_mask(vec![true, false]);
        let sys = NewtonSystem::new(&p, LinsysMode::Kkt, &active, &[3.0, 5.0], &[1e-7; 2], UpdatePolicy::default()).unwrap();
        let (_, lambda) = sys.direction_with_multipliers(&[1.0, -2.0]).unwrap();
        assert_eq!(lambda[1], 0.0);
        assert!(lambda[0] != 0.0);
    }

    #[test]
    fn no_constraints_selects_schur() {
        let q = SparseMatrix::identity(3);
        let a = SparseMatrix::zeros(0, 3, false);
        assert_eq!(select_linsys(&q, &a), LinsysMode::Schur);
    }

    #[test]
    fn ratio_hand_evaluation_dense_four_by_four() {
        // Q diagonal (|Q + Σx⁻¹| = 4), A dense 4×4 (|A| = 16, rows of 4).
        // |K| = 4 + 32 + 4 = 40.  Â = 4; each other row overlaps by
        // [4 + 4 − 4]₊ = 4: 16 − 4 − 16 + 4 = 0, so |H̃| = 4 + 12 = 16.
        // ratio = (4/8)·1600/256 = 3.125.
        let q = SparseMatrix::diagonal(&[1.0; 4]);
        let a = SparseMatrix::from_dense(&vec![vec![1.0; 4]; 4]);
        assert_relative_eq!(linsys_ratio(&q, &a), 3.125);
        assert_eq!(select_linsys(&q, &a), LinsysMode::Schur);
    }

    #[test]
    fn ratio_tie_goes_to_schur() {
        // n = m = 1, Q = [1], A = [1]: |K| = 1 + 2 + 1 = 4, |H̃| = 1, ratio = ½·16.
        let q = SparseMatrix::diagonal(&[1.0]);
        let a = SparseMatrix::from_dense(&[vec![1.0]]);
        assert_relative_eq!(linsys_ratio(&q, &a), 8.0);
        assert_eq!(mode_for_ratio(2.0), LinsysMode::Schur);
        assert_eq!(mode_for_ratio(2.0 - 1e-12), LinsysMode::Kkt);
    }

    #[test]
    fn sparse_rows_with_dense_coupling_prefer_kkt() {
        // One dense row couples all variables; the Schur matrix fills completely.
        let n = 50;
        let q = SparseMatrix::diagonal(&vec![1.0; n]);
        let a = SparseMatrix::from_dense(&[vec![1.0; n]]);
        assert_eq!(select_linsys(&q, &a), LinsysMode::Kkt);
    }
}

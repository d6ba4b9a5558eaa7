//! The proximal augmented Lagrangian solver.
//!
//! The outer loop updates the multiplier estimate `ȳ`, the proximal center
//! `x̂` and the penalties `Σy`; the inner loop minimizes the proximal
//! augmented Lagrangian subproblem with semismooth Newton steps and an
//! exact linesearch.  All iterations run on the scaled problem; residuals,
//! termination and results refer to the original data.

pub mod checks;
pub mod penalty;
pub mod settings;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use crate::problem::QpProblem;
pub use checks::{
    check_dual_infeasibility, check_primal_infeasibility, verify_dual_certificate, verify_kkt,
    verify_primal_certificate, Residuals, Verification,
};
pub use penalty::{init_sigma, select_proximal, update_sigma, PenaltyState, ProximalChoice};
pub use settings::{LinsysChoice, Settings, SETTING_KEYS};

use crate::error::{Error, Result};
use crate::linesearch::{derivative_from_products, exact_linesearch};
use crate::newton::{
    detect_active_set, select_linsys, subproblem_gradient, ActiveSet, LinsysMode, NewtonCounters, NewtonSystem,
    UpdatePolicy,
};
use crate::problem::{clamp, dot};
use crate::scaling::{objective_constant, ruiz_equilibrate, ScalingData};
use crate::sparse::SparseMatrix;

/// Steps shorter than this count as no progress.
pub const MIN_STEP: f64 = 1e-16;
/// Proximal weight `Σx⁻¹` used once dual progress stalls in convex mode.
pub const REFINED_SIGMA_X_INV: f64 = 1e-12;
/// Consecutive outer iterations with primal but without dual convergence
/// before the convex proximal weight is lowered.
pub const REFINE_AFTER: usize = 10;

/// Final solver status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    TimeLimit,
    Stalled,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::PrimalInfeasible => "primal_infeasible",
            Status::DualInfeasible => "dual_infeasible",
            Status::MaxIter => "max_iter",
            Status::TimeLimit => "time_limit",
            Status::Stalled => "stalled",
        }
    }

    /// Solved, or infeasible with a certificate.
    pub fn is_conclusive(&self) -> bool {
        matches!(self, Status::Solved | Status::PrimalInfeasible | Status::DualInfeasible)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "solved" => Status::Solved,
            "primal_infeasible" => Status::PrimalInfeasible,
            "dual_infeasible" => Status::DualInfeasible,
            "max_iter" => Status::MaxIter,
            "time_limit" => Status::TimeLimit,
            "stalled" => Status::Stalled,
            other => return Err(Error::InvalidProblem(format!("unknown status `{other}`"))),
        })
    }
}

/// Counters and timings of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    /// Outer iterations entered, including the one in which the solve ended.
    pub outer_iterations: usize,
    pub newton_iterations: usize,
    pub factorizations: usize,
    /// Newton system refreshes served by low-rank modifications.
    pub updates: usize,
    pub rank1_updates: usize,
    pub row_adds: usize,
    pub row_deletes: usize,
    pub linsys: LinsysMode,
    /// Final common value of `Σx⁻¹` (scaled problem).
    pub sigma_x_inv: f64,
    /// Lower bound on `λ_min(Q̄)` (nonconvex mode).
    pub lambda_min_bound: Option<f64>,
    pub setup_time: f64,
    pub solve_time: f64,
    /// `setup_time + solve_time`, the figure used for benchmark statistics.
    pub run_time: f64,
}

/// One accepted Newton step (scaled quantities).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonStep {
    pub outer: usize,
    pub x_before: Vec<f64>,
    pub x_after: Vec<f64>,
    /// Proximal center `x̂^k`.
    pub xhat: Vec<f64>,
    /// Multiplier estimate `ȳ^k`.
    pub y: Vec<f64>,
    pub sigma_y: Vec<f64>,
    pub sigma_x_inv: Vec<f64>,
    pub tau: f64,
    /// Whether this step's refresh refactorized the Newton matrix.
    pub refactorized: bool,
}

/// Bookkeeping at the end of one outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub k: usize,
    pub inner_iterations: usize,
    /// Unscaled residuals at the final inner iterate.
    pub residuals: Residuals,
    /// The outer primal criterion with `εa,k, εr,k` held.
    pub criterion_held: bool,
    pub xhat_updated: bool,
    /// State after the update.
    pub penalties: PenaltyState,
}

/// Optional per-iteration trace.  Iterates are in the scaled space given by `scaling`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub scaling: ScalingData,
    pub outer: Vec<OuterRecord>,
    pub steps: Vec<NewtonStep>,
}

/// Result of a solve (unscaled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: Status,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
    pub prim_res: f64,
    pub dual_res: f64,
    /// `δy` for primal, `δx` for dual infeasibility.
    pub certificate: Option<Vec<f64>>,
    pub info: SolveInfo,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<SolveTrace>,
}

/// A problem set up for (repeated) solving.  Constraint scaling `D, E` and
/// the linear system choice are fixed at setup; the objective constant `c`
/// is recomputed on every solve.
#[derive(Debug, Clone)]
pub struct Solver {
    problem: QpProblem,
    settings: Settings,
    d: Vec<f64>,
    e: Vec<f64>,
    mode: LinsysMode,
    /// Proximal choice for `DQD` (i.e. `c = 1`).
    base_proximal: ProximalChoice,
    setup_time: f64,
}

impl Solver {
    /// Validates the data and settings, equilibrates `A`, chooses the linear
    /// system and (nonconvex mode) bounds the smallest eigenvalue of `DQD`.
    pub fn new(problem: QpProblem, settings: Settings) -> Result<Self> {
        let t0 = Instant::now();
        problem.validate()?;
        settings.validate()?;
        if problem.n() == 0 {
            return Err(Error::InvalidProblem("problem has no variables".into()));
        }
        let (d, e, abar) = ruiz_equilibrate(&problem.a, settings.scaling_iters);
        let mode = match settings.linsys {
            LinsysChoice::Kkt => LinsysMode::Kkt,
            LinsysChoice::Schur => LinsysMode::Schur,
            LinsysChoice::Auto => select_linsys(&problem.q_mat, &abar),
        };
        let base_proximal = Self::proximal_for(&problem.q_mat, &d, &settings);
        Ok(Self { problem, settings, d, e, mode, base_proximal, setup_time: t0.elapsed().as_secs_f64() })
    }

    fn proximal_for(q: &SparseMatrix, d: &[f64], settings: &Settings) -> ProximalChoice {
        select_proximal(&q.scale(d, d), settings.nonconvex, settings.gamma_init, settings.eig_tol, settings.eig_max_iter)
    }

    pub fn problem(&self) -> &QpProblem {
        &self.problem
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn settings_mut(&mut self) -> &mut Settings {
        &mut self.settings
    }

    pub fn linsys(&self) -> LinsysMode {
        self.mode
    }

    /// Variable scaling `D` and constraint scaling `E`.
    pub fn scaling(&self) -> (&[f64], &[f64]) {
        (&self.d, &self.e)
    }

    /// Replaces the linear cost `q`.
    pub fn update_q(&mut self, q: Vec<f64>) -> Result<()> {
        if q.len() != self.problem.n() {
            return Err(Error::DimensionMismatch(format!("q has length {}, expected {}", q.len(), self.problem.n())));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("q must be finite".into()));
        }
        self.problem.q = q;
        Ok(())
    }

    /// Replaces `Q` by a matrix with the same sparsity pattern.
    pub fn update_q_matrix(&mut self, q_mat: SparseMatrix) -> Result<()> {
        if !q_mat.same_pattern(&self.problem.q_mat) {
            return Err(Error::InvalidStructure("new Q must have the same sparsity pattern".into()));
        }
        let mut p = self.problem.clone();
        p.q_mat = q_mat;
        p.validate()?;
        self.base_proximal = Self::proximal_for(&p.q_mat, &self.d, &self.settings);
        self.problem = p;
        Ok(())
    }

    /// Replaces the bounds `ℓ, u`.
    pub fn update_bounds(&mut self, l: Vec<f64>, u: Vec<f64>) -> Result<()> {
        let mut p = self.problem.clone();
        p.l = l;
        p.u = u;
        p.validate()?;
        self.problem = p;
        Ok(())
    }

    /// Solves from the origin, or from `warm = (x0, y0)` when given and
    /// `settings.warm_start` is set.
    pub fn solve(&self, warm: Option<(&[f64], &[f64])>) -> Result<SolveResult> {
        let (n, m) = (self.problem.n(), self.problem.m());
        let warm = warm.filter(|_| self.settings.warm_start);
        if let Some((x0, y0)) = warm {
            if x0.len() != n || y0.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "warm start has lengths ({}, {}), expected ({n}, {m})",
                    x0.len(),
                    y0.len()
                )));
            }
            if x0.iter().chain(y0).any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem("warm start must be finite".into()));
            }
        }
        let c = objective_constant(&self.problem, &self.d, warm.map(|w| w.0));
        let scaling = ScalingData::from_parts(self.d.clone(), self.e.clone(), c);
        let sp = scaling.apply(&self.problem);
        let (x0, y0) = match warm {
            Some((x0, y0)) => (scaling.scale_x(x0), scaling.scale_y(y0)),
            None => (vec![0.0; n], vec![0.0; m]),
        };
        let lambda = self.base_proximal.lambda_lb.map(|l| c * l);
        let sx_inv = penalty::proximal_from_bound(lambda, self.settings.gamma_init);
        let run = Run::new(self, &sp, scaling, x0, y0, sx_inv, lambda);
        run.execute()
    }
}

/// Sets up and solves in one call.
pub fn solve(problem: QpProblem, settings: Settings, warm: Option<(&[f64], &[f64])>) -> Result<SolveResult> {
    Solver::new(problem, settings)?.solve(warm)
}

/// Quantities evaluated at an inner iterate.
struct Evaluation {
    grad: Vec<f64>,
    qx: Vec<f64>,
    z: Vec<f64>,
    ytrial: Vec<f64>,
    /// Residuals at `(x̄, ỹ)`, or at `(x̄, ȳ)` when the trial check is off.
    residuals: Residuals,
    /// Residuals at `(x̄, ȳ)`.
    current: Residuals,
    /// Every nonzero `ȳ_i` selects the bound `z_i` sits at.
    current_consistent: bool,
}

/// State of one solve on the scaled problem.
struct Run<'a> {
    solver: &'a Solver,
    settings: &'a Settings,
    sp: &'a QpProblem,
    s: ScalingData,
    x: Vec<f64>,
    ax: Vec<f64>,
    y: Vec<f64>,
    xhat: Vec<f64>,
    dx: Vec<f64>,
    pen: PenaltyState,
    r_prev: Vec<f64>,
    gamma: f64,
    lambda: Option<f64>,
    system: Option<NewtonSystem>,
    active: Option<ActiveSet>,
    newton_total: usize,
    /// Index `k` of the current outer iteration.
    outer: usize,
    /// Outer iterations entered so far.
    started: usize,
    /// Return `ȳ` (not `ỹ`) with the final iterate.
    return_current: bool,
    start: Instant,
    trace: Option<SolveTrace>,
}

enum InnerExit {
    Done,
    Finished(Status, Option<Vec<f64>>),
}

impl<'a> Run<'a> {
    fn new(
        solver: &'a Solver,
        sp: &'a QpProblem,
        s: ScalingData,
        x: Vec<f64>,
        y: Vec<f64>,
        sx_inv: f64,
        lambda: Option<f64>,
    ) -> Self {
        let settings = &solver.settings;
        let (n, m) = (sp.n(), sp.m());
        let ax = sp.a.mul_vec(&x);
        let feasible_residual: Vec<f64> = (0..m).map(|i| ax[i] - clamp(ax[i], sp.l[i], sp.u[i])).collect();
        let sigma0 = init_sigma(settings.sigma_init, sp.objective(&x), &feasible_residual);
        let r_prev = (0..m).map(|i| ax[i] - clamp(ax[i] + y[i] / sigma0, sp.l[i], sp.u[i])).collect();
        let pen = PenaltyState {
            sigma_y: vec![sigma0; m],
            sigma_x_inv: vec![sx_inv; n],
            eps_abs_k: settings.delta_abs0,
            eps_rel_k: settings.delta_rel0,
            delta_abs: settings.delta_abs0,
            delta_rel: settings.delta_rel0,
        };
        let trace = settings.record_trace.then(|| SolveTrace { scaling: s.clone(), outer: Vec::new(), steps: Vec::new() });
        Self {
            solver,
            settings,
            sp,
            s,
            xhat: x.clone(),
            dx: vec![0.0; n],
            x,
            ax,
            y,
            pen,
            r_prev,
            gamma: settings.gamma_init,
            lambda,
            system: None,
            active: None,
            newton_total: 0,
            outer: 0,
            started: 0,
            return_current: false,
            start: Instant::now(),
            trace,
        }
    }

    fn evaluate(&self) -> Evaluation {
        let g = subproblem_gradient(self.sp, &self.x, &self.ax, &self.xhat, &self.y, &self.pen.sigma_y, &self.pen.sigma_x_inv);
        let (prim, prim_scale) = checks::primal_residual(&self.s, &self.ax, &g.z);
        let aty_current = self.sp.a.tmul_vec(&self.y);
        let (dual, dual_scale) = checks::dual_residual(&self.s, &g.qx, &self.sp.q, &aty_current, None);
        let current = Residuals { dual, dual_scale, prim, prim_scale };
        let residuals = if self.settings.dual_residual_at_trial {
            let (dual, dual_scale) = checks::dual_residual(&self.s, &g.qx, &self.sp.q, &g.aty, None);
            Residuals { dual, dual_scale, prim, prim_scale }
        } else {
            current
        };
        let current_consistent = (0..self.y.len()).all(|i| {
            let y = self.y[i];
            (y <= 0.0 || g.z[i] == self.sp.u[i]) && (y >= 0.0 || g.z[i] == self.sp.l[i])
        });
        Evaluation { grad: g.grad, qx: g.qx, z: g.z, ytrial: g.ytrial, residuals, current, current_consistent }
    }

    fn inner_done(&self, ev: &Evaluation) -> bool {
        let n = self.x.len();
        let prox: Vec<f64> = (0..n).map(|j| self.pen.sigma_x_inv[j] * (self.x[j] - self.xhat[j])).collect();
        let aty: Vec<f64> = (0..n).map(|j| ev.grad[j] - ev.qx[j] - self.sp.q[j] - prox[j]).collect();
        let (res, scale) = checks::dual_residual(&self.s, &ev.qx, &self.sp.q, &aty, Some(&prox));
        res <= self.pen.delta_abs + self.pen.delta_rel * scale
    }

    fn timed_out(&self) -> bool {
        self.solver.setup_time + self.start.elapsed().as_secs_f64() > self.settings.time_limit
    }

    fn policy(&self) -> UpdatePolicy {
        UpdatePolicy {
            max_rank_update: self.settings.max_rank_update,
            max_rank_update_fraction: self.settings.max_rank_update_fraction,
            always_refactor: self.settings.always_refactor,
        }
    }

    /// Refreshes (or builds) the Newton system for the current iterate.
    /// Returns whether a refactorization happened.
    fn refresh_system(&mut self) -> Result<bool> {
        let active = detect_active_set(&self.ax, &self.y, &self.pen.sigma_y, &self.sp.l, &self.sp.u, self.active.as_ref());
        let refactored = match self.system.as_mut() {
            Some(sys) => sys.refresh(active.mask(), &self.pen.sigma_y, &self.pen.sigma_x_inv)?,
            None => {
                let policy = self.policy();
                self.system = Some(NewtonSystem::new(
                    self.sp,
                    self.solver.mode,
                    &active,
                    &self.pen.sigma_y,
                    &self.pen.sigma_x_inv,
                    policy,
                )?);
                true
            }
        };
        self.active = Some(active);
        Ok(refactored)
    }

    /// Inner Newton loop of outer iteration `self.outer`; leaves the final
    /// evaluation in `last`.
    fn inner(&mut self, last: &mut Evaluation) -> Result<InnerExit> {
        let mut nu = 0;
        let mut misses = 0;
        loop {
            let ev = self.evaluate();
            let (ea, er) = (self.settings.eps_abs, self.settings.eps_rel);
            let at_trial = ev.residuals.dual_ok(ea, er) && ev.residuals.prim_ok(ea, er);
            // The current multiplier ȳ may already certify the iterate (e.g. a
            // warm start at a solution) even when the trial multiplier does
            // not; the pair that passed is the one returned.
            let at_current = !at_trial && ev.current.dual_ok(ea, er) && ev.current.prim_ok(ea, er) && ev.current_consistent;
            let solved = at_trial || at_current;
            self.return_current = at_current || (solved && !self.settings.dual_residual_at_trial);
            let dy: Vec<f64> = ev.ytrial.iter().zip(&self.y).map(|(a, b)| a - b).collect();
            let inner_done = !solved && self.inner_done(&ev);
            *last = ev;
            if solved {
                return Ok(InnerExit::Finished(Status::Solved, None));
            }
            if let Some(cert) = check_primal_infeasibility(self.sp, &self.s, &dy, self.settings.eps_pinf) {
                return Ok(InnerExit::Finished(Status::PrimalInfeasible, Some(cert)));
            }
            if let Some(cert) =
                check_dual_infeasibility(self.sp, &self.s, &self.dx, self.settings.eps_dinf, self.settings.nonconvex)
            {
                return Ok(InnerExit::Finished(Status::DualInfeasible, Some(cert)));
            }
            if inner_done || nu >= self.settings.inner_max_iter {
                return Ok(InnerExit::Done);
            }
            if self.newton_total >= self.settings.max_total_newton_iter {
                return Ok(InnerExit::Finished(Status::MaxIter, None));
            }
            if self.timed_out() {
                return Ok(InnerExit::Finished(Status::TimeLimit, None));
            }

            let refactorized = self.refresh_system()?;
            let sys = self.system.as_mut().expect("system built by refresh");
            let d = sys.direction(&last.grad)?;
            let slope = dot(&last.grad, &d);
            let tau = if slope < 0.0 {
                let qd = self.sp.q_mat.mul_vec(&d);
                let ad = self.sp.a.mul_vec(&d);
                let pwa = derivative_from_products(
                    self.sp,
                    &self.x,
                    &self.xhat,
                    &d,
                    &last.qx,
                    &self.ax,
                    &qd,
                    &ad,
                    &self.y,
                    &self.pen.sigma_y,
                    &self.pen.sigma_x_inv,
                );
                exact_linesearch(&pwa)
            } else {
                0.0
            };
            if !(tau.abs() >= MIN_STEP) || !tau.is_finite() {
                // No progress: refactorize once from scratch, give up if that does not help.
                misses += 1;
                if misses >= 2 {
                    return Ok(InnerExit::Finished(Status::Stalled, None));
                }
                let mask = self.active.as_ref().expect("active set").mask().to_vec();
                sys.refactor(&mask, &self.pen.sigma_y, &self.pen.sigma_x_inv)?;
                continue;
            }
            misses = 0;
            let x_before = self.trace.as_ref().map(|_| self.x.clone());
            for j in 0..self.x.len() {
                self.dx[j] = tau * d[j];
                self.x[j] += self.dx[j];
            }
            self.ax = self.sp.a.mul_vec(&self.x);
            nu += 1;
            self.newton_total += 1;
            if let (Some(trace), Some(x_before)) = (self.trace.as_mut(), x_before) {
                trace.steps.push(NewtonStep {
                    outer: self.outer,
                    x_before,
                    x_after: self.x.clone(),
                    xhat: self.xhat.clone(),
                    y: self.y.clone(),
                    sigma_y: self.pen.sigma_y.clone(),
                    sigma_x_inv: self.pen.sigma_x_inv.clone(),
                    tau,
                    refactorized,
                });
            }
        }
    }

    fn execute(mut self) -> Result<SolveResult> {
        let mut last = self.evaluate();
        let mut dual_stall = 0usize;
        let mut refined = false;
        let (status, certificate) = loop {
            if self.outer >= self.settings.max_outer_iter {
                break (Status::MaxIter, None);
            }
            let inner_start = self.newton_total;
            self.started += 1;
            if let InnerExit::Finished(status, cert) = self.inner(&mut last)? {
                break (status, cert);
            }
            let set = self.settings;

            // Multiplier update ȳ ← ȳ + δȳ.
            self.y.clone_from(&last.ytrial);

            // Proximal center and outer tolerances.
            let criterion_held = !set.nonconvex
                || last.residuals.prim_ok(self.pen.eps_abs_k, self.pen.eps_rel_k);
            if criterion_held {
                self.xhat.clone_from(&self.x);
                if set.nonconvex {
                    self.pen.eps_abs_k = (set.rho * self.pen.eps_abs_k).max(set.eps_abs);
                    self.pen.eps_rel_k = (set.rho * self.pen.eps_rel_k).max(set.eps_rel);
                }
            }

            // Convex-mode proximal weight adjustments.
            let convex_prox = !set.nonconvex || self.lambda.is_none_or(|l| l >= 0.0);
            if convex_prox {
                if set.proximal_update && !refined {
                    self.gamma = (self.gamma * set.gamma_upd).min(set.gamma_max);
                    self.pen.sigma_x_inv.fill(1.0 / self.gamma);
                }
                let prim = last.residuals.prim_ok(set.eps_abs, set.eps_rel);
                let dual = last.residuals.dual_ok(set.eps_abs, set.eps_rel);
                dual_stall = if prim && !dual { dual_stall + 1 } else { 0 };
                if dual_stall >= REFINE_AFTER && !refined {
                    self.pen.sigma_x_inv.fill(REFINED_SIGMA_X_INV);
                    refined = true;
                }
            }

            // Constraint penalties.
            let r: Vec<f64> = self.ax.iter().zip(&last.z).map(|(a, z)| a - z).collect();
            update_sigma(&mut self.pen.sigma_y, &r, &self.r_prev, set.theta, set.delta, set.sigma_max);
            self.r_prev = r;

            // Inner tolerances.
            self.pen.delta_abs = (set.rho * self.pen.delta_abs).max(set.eps_abs);
            self.pen.delta_rel = (set.rho * self.pen.delta_rel).max(set.eps_rel);

            if let Some(trace) = self.trace.as_mut() {
                trace.outer.push(OuterRecord {
                    k: self.outer,
                    inner_iterations: self.newton_total - inner_start,
                    residuals: last.residuals,
                    criterion_held,
                    xhat_updated: criterion_held,
                    penalties: self.pen.clone(),
                });
            }
            self.outer += 1;
            if self.timed_out() {
                last = self.evaluate();
                break (Status::TimeLimit, None);
            }
        };
        Ok(self.finish(status, certificate, &last))
    }

    fn finish(self, status: Status, certificate: Option<Vec<f64>>, last: &Evaluation) -> SolveResult {
        let x = self.s.unscale_x(&self.x);
        let (y, residuals) =
            if self.return_current { (&self.y, last.current) } else { (&last.ytrial, last.residuals) };
        let y = self.s.unscale_y(y);
        let objective = self.solver.problem.objective(&x);
        let counters = self.system.as_ref().map(|s| s.counters()).unwrap_or_else(NewtonCounters::default);
        let solve_time = self.start.elapsed().as_secs_f64();
        SolveResult {
            status,
            x,
            y,
            objective,
            prim_res: residuals.prim,
            dual_res: residuals.dual,
            certificate,
            info: SolveInfo {
                outer_iterations: self.started,
                newton_iterations: self.newton_total,
                factorizations: counters.factorizations,
                updates: counters.update_refreshes,
                rank1_updates: counters.rank1_updates,
                row_adds: counters.row_adds,
                row_deletes: counters.row_deletes,
                linsys: self.solver.mode,
                sigma_x_inv: self.pen.sigma_x_inv.first().copied().unwrap_or(0.0),
                lambda_min_bound: self.lambda,
                setup_time: self.solver.setup_time,
                solve_time,
                run_time: self.solver.setup_time + solve_time,
            },
            trace: self.trace,
        }
    }
}

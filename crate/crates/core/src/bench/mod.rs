//! Benchmark generators, suite runners and statistics.

pub mod generators;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub use generators::{
    gen_mpc, gen_portfolio, gen_random_qp, gen_random_qp_with, MpcProblem, RandomQpOptions, PORTFOLIO_BETAS,
};
pub use stats::{
    effective_runtime, performance_profile, read_records, sgm, sgm_by_solver, write_profile, write_records,
    BenchRecord, PerformanceProfile, ProfileCurve, DEFAULT_SHIFT,
};

use crate::error::{Error, Result};
use crate::solver::{Settings, SolveResult, Solver};

/// Standard deviation of the state disturbance in the closed-loop MPC run.
pub const MPC_DISTURBANCE_STD: f64 = 0.01;

/// Solves the portfolio problems for every `n` and `β`, one record each.
pub fn portfolio_suite(ns: &[usize], betas: &[f64], settings: &Settings, solver_id: &str, seed: u64) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &n in ns {
        for &beta in betas {
            let p = gen_portfolio(n, beta, seed.wrapping_add(n as u64))?;
            let r = Solver::new(p, settings.clone())?.solve(None)?;
            out.push(BenchRecord::from_result(format!("portfolio-n{n}-beta{beta:e}"), solver_id, &r));
        }
    }
    Ok(out)
}

/// Solves one MPC problem per horizon.
pub fn mpc_suite(
    horizons: &[usize],
    nx: usize,
    nu: usize,
    settings: &Settings,
    solver_id: &str,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &h in horizons {
        let mpc = gen_mpc(nx, nu, h, seed.wrapping_add(h as u64))?;
        let r = Solver::new(mpc.problem, settings.clone())?.solve(None)?;
        out.push(BenchRecord::from_result(format!("mpc-nx{nx}-nu{nu}-N{h}"), solver_id, &r));
    }
    Ok(out)
}

/// Solves `count` random QPs of the given shape.
#[allow(clippy::too_many_arguments)]
pub fn random_suite(
    count: usize,
    n: usize,
    m: usize,
    density: f64,
    convex: bool,
    settings: &Settings,
    solver_id: &str,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    let mut s = settings.clone();
    s.nonconvex |= !convex;
    (0..count)
        .map(|i| {
            let p = gen_random_qp(n, m, density, convex, seed.wrapping_add(i as u64))?;
            let r = Solver::new(p, s.clone())?.solve(None)?;
            let kind = if convex { "convex" } else { "nonconvex" };
            Ok(BenchRecord::from_result(format!("random-{kind}-n{n}-m{m}-{i}"), solver_id, &r))
        })
        .collect()
}

/// One step of a closed-loop MPC run: the warm-started and the cold solve
/// of the same problem.
#[derive(Debug, Clone)]
pub struct ClosedLoopStep {
    pub x_init: Vec<f64>,
    pub warm: SolveResult,
    pub cold: SolveResult,
}

/// Runs `steps` sequential problems: after each solve the first input is
/// applied, a normal disturbance with deviation `disturbance_std` is added
/// to the next initial state, and the next problem is solved both cold and
/// warm-started from the shifted previous solution.  The first problem has
/// no previous solution, so its warm solve is cold as well.
pub fn mpc_closed_loop(
    mpc: &MpcProblem,
    steps: usize,
    disturbance_std: f64,
    settings: &Settings,
    seed: u64,
) -> Result<Vec<ClosedLoopStep>> {
    let noise = Normal::new(0.0, disturbance_std).map_err(|e| Error::InvalidProblem(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mpc = mpc.clone();
    let mut solver = Solver::new(mpc.problem.clone(), settings.clone())?;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let cold = solver.solve(None)?;
        let warm = match &prev {
            Some((z, y)) => {
                let (zs, ys) = mpc.shift_warm_start(z, y);
                solver.solve(Some((&zs, &ys)))?
            }
            None => cold.clone(),
        };
        let u0 = &warm.x[mpc.input_offset(0)..mpc.input_offset(0) + mpc.nu];
        let mut next = mpc.step(&mpc.x_init, u0);
        for v in next.iter_mut() {
            *v += noise.sample(&mut rng);
        }
        prev = Some((warm.x.clone(), warm.y.clone()));
        out.push(ClosedLoopStep { x_init: mpc.x_init.clone(), warm, cold });
        mpc.set_initial_state(&next);
        solver.update_bounds(mpc.problem.l.clone(), mpc.problem.u.clone())?;
    }
    Ok(out)
}

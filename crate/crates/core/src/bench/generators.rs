//! Seeded benchmark problem generators.  Every generator is a pure function
//! of its dimensions, parameters and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::eigen::jacobi_eig;
use crate::error::{Error, Result};
use crate::problem::QpProblem;
use crate::sparse::SparseMatrix;

/// Risk-aversion values of the portfolio preset.
pub const PORTFOLIO_BETAS: [f64; 5] = [1e-2, 1e-1, 1.0, 1e1, 1e2];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(mean: f64, std: f64) -> Normal<f64> {
    Normal::new(mean, std).expect("finite positive deviation")
}

/// Portfolio optimization in the lifted variables `(x, y)`, `y = Fᵀx`:
///
/// ```text
/// minimize   xᵀDx + yᵀy − β⁻¹μᵀx
/// subject to x ≥ 0,  Σx = 1,  Fᵀx − y = 0
/// ```
///
/// with `r = ⌈n/10⌉` factors, `D_ii ~ U[0, √r]`, `F` (n×r) 50% dense with
/// standard normal entries and `μ ~ U[0,1]`.  Stored as `½zᵀQz + qᵀz` with
/// `Q = 2·diag(D, I)`.  Rows: `n` sign rows, one budget row, `r` factor rows.
/// The data do not depend on `β` (only `q` scales with `1/β`).
pub fn gen_portfolio(n: usize, beta: f64, seed: u64) -> Result<QpProblem> {
    if n < 1 {
        return Err(Error::InvalidProblem("portfolio needs at least one asset".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidProblem(format!("beta must be positive, got {beta}")));
    }
    let mut g = rng(seed);
    let r = n.div_ceil(10);
    let nv = n + r;
    let sr = (r as f64).sqrt();
    let d: Vec<f64> = (0..n).map(|_| g.random::<f64>() * sr).collect();
    let mut f = Vec::new();
    for i in 0..n {
        for k in 0..r {
            if g.random::<f64>() < 0.5 {
                let v: f64 = StandardNormal.sample(&mut g);
                f.push((i, k, v));
            }
        }
    }
    let mu: Vec<f64> = (0..n).map(|_| g.random::<f64>()).collect();

    let mut qdiag = vec![2.0; nv];
    for i in 0..n {
        qdiag[i] = 2.0 * d[i];
    }
    let q_mat = SparseMatrix::diagonal(&qdiag);
    let mut q = vec![0.0; nv];
    for i in 0..n {
        q[i] = -mu[i] / beta;
    }

    let m = n + 1 + r;
    let mut trip = Vec::with_capacity(2 * n + f.len() + r);
    for i in 0..n {
        trip.push((i, i, 1.0));
        trip.push((n, i, 1.0));
    }
    for &(i, k, v) in &f {
        trip.push((n + 1 + k, i, v));
    }
    for k in 0..r {
        trip.push((n + 1 + k, n + k, -1.0));
    }
    let a = SparseMatrix::from_triplets(m, nv, &trip, false)?;
    let mut l = vec![0.0; m];
    let mut u = vec![f64::INFINITY; m];
    l[n] = 1.0;
    u[n] = 1.0;
    for k in 0..r {
        u[n + 1 + k] = 0.0;
    }
    QpProblem::new(q_mat, q, a, l, u)
}

/// A generated optimal control problem together with the data needed to
/// step it forward in a receding-horizon loop.
#[derive(Debug, Clone, PartialEq)]
pub struct MpcProblem {
    pub nx: usize,
    pub nu: usize,
    pub horizon: usize,
    /// Dynamics `x⁺ = A x + B u` (dense, row major).
    pub a_dyn: Vec<Vec<f64>>,
    pub b_dyn: Vec<Vec<f64>>,
    pub x_bound: Vec<f64>,
    pub u_bound: Vec<f64>,
    pub x_init: Vec<f64>,
    pub problem: QpProblem,
}

impl MpcProblem {
    /// Number of variables `(N+1)nx + N·nu`.
    pub fn n(&self) -> usize {
        (self.horizon + 1) * self.nx + self.horizon * self.nu
    }

    /// Offset of state `x_k` in `z`.
    pub fn state_offset(&self, k: usize) -> usize {
        k * (self.nx + self.nu)
    }

    /// Offset of input `u_k` in `z`.
    pub fn input_offset(&self, k: usize) -> usize {
        k * (self.nx + self.nu) + self.nx
    }

    /// Applies `x⁺ = A x + B u`.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        (0..self.nx)
            .map(|i| {
                (0..self.nx).map(|j| self.a_dyn[i][j] * x[j]).sum::<f64>()
                    + (0..self.nu).map(|j| self.b_dyn[i][j] * u[j]).sum::<f64>()
            })
            .collect()
    }

    /// Bounds for a new initial state (the first `nx` rows are `x₀ = x̃`).
    pub fn bounds_for(&self, x_init: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut l = self.problem.l.clone();
        let mut u = self.problem.u.clone();
        l[..self.nx].copy_from_slice(x_init);
        u[..self.nx].copy_from_slice(x_init);
        (l, u)
    }

    /// Changes the initial state in place.
    pub fn set_initial_state(&mut self, x_init: &[f64]) {
        let (l, u) = self.bounds_for(x_init);
        self.problem.l = l;
        self.problem.u = u;
        self.x_init = x_init.to_vec();
    }

    /// Shifts a primal-dual solution one sample forward: stages move one
    /// step earlier and the last stage is repeated, with the final state
    /// propagated through the dynamics.  The initial-state multipliers are
    /// taken from the first dynamics block.
    pub fn shift_warm_start(&self, z: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (nx, nu, nh) = (self.nx, self.nu, self.horizon);
        let mut zs = vec![0.0; z.len()];
        for k in 0..nh {
            let (src_x, src_u) = (self.state_offset(k + 1), self.input_offset((k + 1).min(nh - 1)));
            zs[self.state_offset(k)..self.state_offset(k) + nx].copy_from_slice(&z[src_x..src_x + nx]);
            zs[self.input_offset(k)..self.input_offset(k) + nu].copy_from_slice(&z[src_u..src_u + nu]);
        }
        let last_x = &z[self.state_offset(nh)..self.state_offset(nh) + nx];
        let last_u = &z[self.input_offset(nh - 1)..self.input_offset(nh - 1) + nu];
        let next = self.step(last_x, last_u);
        zs[self.state_offset(nh)..self.state_offset(nh) + nx].copy_from_slice(&next);

        // Row blocks: initial state (nx), dynamics (N·nx), state boxes ((N+1)·nx), input boxes (N·nu).
        let mut ys = vec![0.0; y.len()];
        let dyn0 = nx;
        let xb0 = dyn0 + nh * nx;
        let ub0 = xb0 + (nh + 1) * nx;
        ys[..nx].copy_from_slice(&y[dyn0..dyn0 + nx]);
        shift_blocks(&y[dyn0..xb0], &mut ys[dyn0..xb0], nx);
        shift_blocks(&y[xb0..ub0], &mut ys[xb0..ub0], nx);
        shift_blocks(&y[ub0..], &mut ys[ub0..], nu);
        (zs, ys)
    }
}

/// Moves equally sized blocks one position earlier, repeating the last.
fn shift_blocks(src: &[f64], dst: &mut [f64], block: usize) {
    let nb = src.len() / block;
    for k in 0..nb {
        let from = (k + 1).min(nb - 1) * block;
        dst[k * block..(k + 1) * block].copy_from_slice(&src[from..from + block]);
    }
}

/// Upper bound on the spectral radius of a square dense matrix from
/// `‖A^k‖_F^{1/k}` with `k = 16`.
fn spectral_radius_bound(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut p = a.to_vec();
    let mut log_scale = 0.0;
    for _ in 0..4 {
        // p ← p·p, renormalized to avoid overflow.
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let v = p[i][k];
                if v != 0.0 {
                    for j in 0..n {
                        next[i][j] += v * p[k][j];
                    }
                }
            }
        }
        let norm = next.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        log_scale = 2.0 * log_scale + norm.ln();
        for v in next.iter_mut().flatten() {
            *v /= norm;
        }
        p = next;
    }
    (log_scale / 16.0).exp()
}

/// Limit on the spectral-radius estimate of the generated dynamics.
pub const MPC_MAX_SPECTRAL_RADIUS: f64 = 1.2;
/// Fraction of the state box reached by the zero-input trajectory from the initial state.
pub const MPC_INITIAL_STATE_MARGIN: f64 = 0.9;

/// Random linear MPC problem over the horizon `N` in the variables
/// `z = (x₀, u₀, x₁, …, u_{N−1}, x_N)`:
///
/// ```text
/// minimize   x_Nᵀ Q x_N + Σ x_kᵀ Q x_k + u_kᵀ R u_k
/// subject to x₀ = x̃,  x_{k+1} = A x_k + B u_k,  |x_k| ≤ x_b,  |u_k| ≤ u_b
/// ```
///
/// `Q = MᵀM` with `M` 50% dense, entries normal with deviation 5;
/// `R = 0.01 I`; `A` normal with deviation 2 (rescaled so its spectral
/// radius estimate is at most 1.2), `B` standard normal; limits normal with
/// mean 10 and deviation 2.  The terminal cost and set equal the stage ones.
/// The initial state is a random direction scaled so that the zero-input
/// trajectory just stays inside the state box, which guarantees feasibility.
pub fn gen_mpc(nx: usize, nu: usize, horizon: usize, seed: u64) -> Result<MpcProblem> {
    if nx == 0 || nu == 0 || horizon == 0 {
        return Err(Error::InvalidProblem("nx, nu and N must be positive".into()));
    }
    let mut g = rng(seed);
    let mut mm = vec![vec![0.0; nx]; nx];
    let n5 = normal(0.0, 5.0);
    for row in mm.iter_mut() {
        for v in row.iter_mut() {
            if g.random::<f64>() < 0.5 {
                *v = n5.sample(&mut g);
            }
        }
    }
    let n2 = normal(0.0, 2.0);
    let mut a_dyn: Vec<Vec<f64>> = (0..nx).map(|_| (0..nx).map(|_| n2.sample(&mut g)).collect()).collect();
    let rho = spectral_radius_bound(&a_dyn);
    if rho > MPC_MAX_SPECTRAL_RADIUS {
        let s = MPC_MAX_SPECTRAL_RADIUS / rho;
        a_dyn.iter_mut().flatten().for_each(|v| *v *= s);
    }
    let b_dyn: Vec<Vec<f64>> =
        (0..nx).map(|_| (0..nu).map(|_| StandardNormal.sample(&mut g)).collect()).collect();
    let lim = normal(10.0, 2.0);
    let x_bound: Vec<f64> = (0..nx).map(|_| lim.sample(&mut g).abs().max(0.1)).collect();
    let u_bound: Vec<f64> = (0..nu).map(|_| lim.sample(&mut g).abs().max(0.1)).collect();
    let dir: Vec<f64> = (0..nx).map(|_| StandardNormal.sample(&mut g)).collect();

    // Stage cost Q = MᵀM (upper triangle), doubled for the ½zᵀHz convention.
    let mut qs = vec![vec![0.0; nx]; nx];
    for i in 0..nx {
        for j in i..nx {
            qs[i][j] = 2.0 * (0..nx).map(|k| mm[k][i] * mm[k][j]).sum::<f64>();
        }
    }

    let mut mpc = MpcProblem {
        nx,
        nu,
        horizon,
        a_dyn,
        b_dyn,
        x_bound,
        u_bound,
        x_init: vec![0.0; nx],
        problem: QpProblem {
            q_mat: SparseMatrix::zeros(0, 0, true),
            q: vec![],
            a: SparseMatrix::zeros(0, 0, false),
            l: vec![],
            u: vec![],
        },
    };

    // Zero-input trajectory from `dir`; scale so it peaks at the margin.
    let mut x = dir.clone();
    let mut peak = 0.0f64;
    for _ in 0..=horizon {
        for i in 0..nx {
            peak = peak.max(x[i].abs() / mpc.x_bound[i]);
        }
        x = mpc.step(&x, &vec![0.0; nu]);
    }
    let scale = if peak > 0.0 { MPC_INITIAL_STATE_MARGIN / peak } else { 0.0 };
    let x_init: Vec<f64> = dir.iter().map(|v| v * scale).collect();

    let nv = mpc.n();
    let mut qt = Vec::new();
    for k in 0..=horizon {
        let o = mpc.state_offset(k);
        for i in 0..nx {
            for j in i..nx {
                if qs[i][j] != 0.0 {
                    qt.push((o + i, o + j, qs[i][j]));
                }
            }
        }
        if k < horizon {
            let o = mpc.input_offset(k);
            for i in 0..nu {
                qt.push((o + i, o + i, 2.0 * 0.01));
            }
        }
    }
    let q_mat = SparseMatrix::from_triplets(nv, nv, &qt, true)?;

    let m = nx + horizon * nx + (horizon + 1) * nx + horizon * nu;
    let mut at = Vec::new();
    let mut l = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    for i in 0..nx {
        at.push((i, i, 1.0));
        l.push(x_init[i]);
        u.push(x_init[i]);
    }
    let mut row = nx;
    for k in 0..horizon {
        let (xo, uo, xn) = (mpc.state_offset(k), mpc.input_offset(k), mpc.state_offset(k + 1));
        for i in 0..nx {
            at.push((row, xn + i, 1.0));
            for j in 0..nx {
                if mpc.a_dyn[i][j] != 0.0 {
                    at.push((row, xo + j, -mpc.a_dyn[i][j]));
                }
            }
            for j in 0..nu {
                if mpc.b_dyn[i][j] != 0.0 {
                    at.push((row, uo + j, -mpc.b_dyn[i][j]));
                }
            }
            l.push(0.0);
            u.push(0.0);
            row += 1;
        }
    }
    for k in 0..=horizon {
        let o = mpc.state_offset(k);
        for i in 0..nx {
            at.push((row, o + i, 1.0));
            l.push(-mpc.x_bound[i]);
            u.push(mpc.x_bound[i]);
            row += 1;
        }
    }
    for k in 0..horizon {
        let o = mpc.input_offset(k);
        for i in 0..nu {
            at.push((row, o + i, 1.0));
            l.push(-mpc.u_bound[i]);
            u.push(mpc.u_bound[i]);
            row += 1;
        }
    }
    let a = SparseMatrix::from_triplets(m, nv, &at, false)?;
    mpc.problem = QpProblem::new(q_mat, vec![0.0; nv], a, l, u)?;
    mpc.x_init = x_init;
    Ok(mpc)
}

/// Options of [`gen_random_qp_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomQpOptions {
    pub n: usize,
    pub m: usize,
    /// Density of the random parts of `Q` and `A`, in `(0, 1]`.
    pub density: f64,
    /// `None`: convex `Q = GᵀG + 10⁻²I`.  `Some(λ)`: symmetric `Q` with
    /// smallest eigenvalue exactly `λ` (up to rounding).
    pub lambda_min: Option<f64>,
    /// Append the rows `x_i ∈ [x_f,i − w, x_f,i + w]` (bounded feasible set).
    pub box_variables: bool,
    /// Fraction of general rows that are equalities.
    pub equality_fraction: f64,
    /// Fraction of general rows with one infinite bound.
    pub one_sided_fraction: f64,
}

impl RandomQpOptions {
    pub fn new(n: usize, m: usize, density: f64) -> Self {
        Self { n, m, density, lambda_min: None, box_variables: false, equality_fraction: 0.1, one_sided_fraction: 0.0 }
    }
}

/// Random QP with finite bounds enclosing a known feasible point; convex
/// (`Q = GᵀG + 10⁻²I`) or nonconvex with a smallest eigenvalue drawn
/// uniformly from `[−10, −0.1]`.
pub fn gen_random_qp(n: usize, m: usize, density: f64, convex: bool, seed: u64) -> Result<QpProblem> {
    let mut opts = RandomQpOptions::new(n, m, density);
    if !convex {
        let mut g = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
        opts.lambda_min = Some(-g.random_range(0.1..=10.0));
    }
    gen_random_qp_with(&opts, seed)
}

fn random_sparse_dense(g: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; cols]; rows];
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            if g.random::<f64>() < density {
                *v = StandardNormal.sample(g);
            }
        }
    }
    out
}

/// Random QP per `opts`.
pub fn gen_random_qp_with(opts: &RandomQpOptions, seed: u64) -> Result<QpProblem> {
    let RandomQpOptions { n, m, density, .. } = *opts;
    if n == 0 {
        return Err(Error::InvalidProblem("n must be positive".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidProblem(format!("density must lie in (0, 1], got {density}")));
    }
    let mut g = rng(seed);
    let mut qd = vec![vec![0.0; n]; n];
    match opts.lambda_min {
        None => {
            let gm = random_sparse_dense(&mut g, n, n, density);
            for i in 0..n {
                for j in i..n {
                    qd[i][j] = (0..n).map(|k| gm[k][i] * gm[k][j]).sum::<f64>();
                }
                qd[i][i] += 1e-2;
            }
        }
        Some(lambda) => {
            let s = random_sparse_dense(&mut g, n, n, density);
            let mut sym = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    sym[i][j] = 0.5 * (s[i][j] + s[j][i]);
                }
            }
            let (vals, _) = jacobi_eig(&sym);
            let shift = vals[0] - lambda;
            for i in 0..n {
                for j in i..n {
                    qd[i][j] = sym[i][j];
                }
                qd[i][i] -= shift;
            }
        }
    }
    let q_mat = SparseMatrix::from_dense_symmetric(&qd);
    let q: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut g)).collect();

    let mut ad = random_sparse_dense(&mut g, m, n, density);
    // Keep every general row nonempty.
    for row in ad.iter_mut() {
        if row.iter().all(|v| *v == 0.0) {
            let j = g.random_range(0..n);
            row[j] = StandardNormal.sample(&mut g);
        }
    }
    let xf: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut g)).collect();
    let mut l = Vec::with_capacity(m + n);
    let mut u = Vec::with_capacity(m + n);
    for row in &ad {
        let axf: f64 = row.iter().zip(&xf).map(|(a, x)| a * x).sum();
        let kind: f64 = g.random();
        let lo = axf - g.random_range(0.1..1.0);
        let hi = axf + g.random_range(0.1..1.0);
        if kind < opts.equality_fraction {
            l.push(axf);
            u.push(axf);
        } else if kind < opts.equality_fraction + opts.one_sided_fraction {
            if g.random::<bool>() {
                l.push(f64::NEG_INFINITY);
                u.push(hi);
            } else {
                l.push(lo);
                u.push(f64::INFINITY);
            }
        } else {
            l.push(lo);
            u.push(hi);
        }
    }
    if opts.box_variables {
        for j in 0..n {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            ad.push(row);
            l.push(xf[j] - g.random_range(0.5..2.0));
            u.push(xf[j] + g.random_range(0.5..2.0));
        }
    }
    let a = SparseMatrix::from_dense(&ad);
    let a = if a.nrows() == 0 { SparseMatrix::zeros(0, n, false) } else { a };
    QpProblem::new(q_mat, q, a, l, u)
}

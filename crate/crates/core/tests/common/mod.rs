#![allow(dead_code)]

use pqp::SparseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    inf_norm(&d) / inf_norm(b).max(1e-300)
}

/// Dense symmetric matrix used as the "intended" matrix in update tests.
#[derive(Clone)]
pub struct DenseSym {
    pub n: usize,
    pub a: Vec<Vec<f64>>,
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![vec![0.0; n]; n] }
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_dense_symmetric(&self.a)
    }

    pub fn add_outer(&mut self, w: &[(usize, f64)], sign: f64) {
        for &(i, a) in w {
            for &(j, b) in w {
                self.a[i][j] += sign * a * b;
            }
        }
    }

    pub fn set_row(&mut self, k: usize, entries: &[(usize, f64)], diag: f64) {
        for i in 0..self.n {
            self.a[i][k] = 0.0;
            self.a[k][i] = 0.0;
        }
        for &(i, v) in entries {
            self.a[i][k] = v;
            self.a[k][i] = v;
        }
        self.a[k][k] = diag;
    }

    pub fn norm_inf(&self) -> f64 {
        self.a
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Random sparse SPD matrix: sparse random symmetric part plus a dominant diagonal.
pub fn random_spd(rng: &mut impl Rng, n: usize, density: f64) -> DenseSym {
    let mut m = DenseSym::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let v: f64 = rng.random_range(-1.0..1.0);
                m.a[i][j] = v;
                m.a[j][i] = v;
            }
        }
    }
    for i in 0..n {
        let off: f64 = m.a[i].iter().map(|v| v.abs()).sum();
        m.a[i][i] = off + rng.random_range(0.5..2.0);
    }
    m
}

/// Random quasidefinite matrix `[[M, Bᵀ], [B, −N]]` with `M` (`n1×n1`) and `N` SPD.
pub fn random_quasidefinite(rng: &mut impl Rng, n1: usize, n2: usize, density: f64) -> DenseSym {
    let m = random_spd(rng, n1, density);
    let nn = random_spd(rng, n2, density);
    let n = n1 + n2;
    let mut k = DenseSym::zeros(n);
    for i in 0..n1 {
        for j in 0..n1 {
            k.a[i][j] = m.a[i][j];
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            k.a[n1 + i][n1 + j] = -nn.a[i][j];
        }
    }
    for i in 0..n2 {
        for j in 0..n1 {
            if rng.random::<f64>() < density {
                let v: f64 = rng.random_range(-1.0..1.0);
                k.a[n1 + i][j] = v;
                k.a[j][n1 + i] = v;
            }
        }
    }
    k
}

pub fn random_sparse_vec(rng: &mut impl Rng, range: std::ops::Range<usize>, density: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for i in range.clone() {
        if rng.random::<f64>() < density {
            out.push((i, rng.random_range(-1.0..1.0)));
        }
    }
    if out.is_empty() {
        out.push((rng.random_range(range), 0.5));
    }
    out
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Outcome of a randomized factor-update sequence.
pub struct UpdateSequenceReport {
    pub reconstruction: f64,
    pub solve_rel: f64,
    pub ops: usize,
}

/// Factorizes a random quasidefinite matrix, applies a random interleaving of
/// rank-1 updates/downdates and row deletions/additions, and compares the
/// result with a fresh factorization of the intended matrix.
///
/// `reconstruction` is `‖LDLᵀ − PK̂Pᵀ‖∞ / (1 + ‖K̂‖∞)`; `solve_rel` the relative
/// ∞-norm gap between the updated and fresh solves.
pub fn run_update_sequence(rng: &mut impl Rng, n1: usize, n2: usize, steps: usize) -> UpdateSequenceReport {
    use pqp::LdlFactors;
    let n = n1 + n2;
    let density = (4.0 / n as f64).min(0.5);
    let mut target = random_quasidefinite(rng, n1, n2, density);
    let perm = random_perm(rng, n);
    let mut f = LdlFactors::factorize(&target.to_sparse(), &perm).expect("quasidefinite factorizes");

    let mut removed: Vec<Option<(Vec<(usize, f64)>, f64)>> = vec![None; n];
    let mut ops = 0;
    for _ in 0..steps {
        let live_m: Vec<usize> = (0..n1).filter(|&i| removed[i].is_none()).collect();
        let live_n: Vec<usize> = (n1..n).filter(|&i| removed[i].is_none()).collect();
        let dead: Vec<usize> = (0..n).filter(|&i| removed[i].is_some()).collect();
        match rng.random_range(0..4) {
            0 if !live_m.is_empty() => {
                let w = pick_sparse(rng, &live_m, density);
                f.rank1_update(&w, 1.0).unwrap();
                target.add_outer(&w, 1.0);
            }
            1 if !live_n.is_empty() => {
                let w = pick_sparse(rng, &live_n, density);
                f.rank1_update(&w, -1.0).unwrap();
                target.add_outer(&w, -1.0);
            }
            2 if live_m.len() + live_n.len() > 1 => {
                let all: Vec<usize> = live_m.iter().chain(&live_n).copied().collect();
                let k = all[rng.random_range(0..all.len())];
                let col: Vec<(usize, f64)> = (0..n)
                    .filter(|&i| i != k && target.a[i][k] != 0.0)
                    .map(|i| (i, target.a[i][k]))
                    .collect();
                let diag = target.a[k][k];
                let placeholder = if k < n1 { 1.0 } else { -1.0 };
                f.row_delete(k, placeholder).unwrap();
                target.set_row(k, &[], placeholder);
                removed[k] = Some((col, diag));
            }
            3 if !dead.is_empty() => {
                let k = dead[rng.random_range(0..dead.len())];
                let (col, diag) = removed[k].take().unwrap();
                let mut dropped = 0.0;
                let kept: Vec<(usize, f64)> = col
                    .into_iter()
                    .filter(|&(i, v)| {
                        let keep = removed[i].is_none();
                        if !keep {
                            dropped += v.abs();
                        }
                        keep
                    })
                    .collect();
                let diag = diag.signum() * (diag.abs() + dropped);
                f.row_add(k, &kept, diag).unwrap();
                target.set_row(k, &kept, diag);
            }
            _ => continue,
        }
        ops += 1;
    }

    let k = target.to_sparse();
    let reconstruction = f.reconstruction_residual(&k) / (1.0 + target.norm_inf());
    let fresh = LdlFactors::factorize(&k, &perm).expect("intended matrix factorizes");
    let b = random_vec(rng, n);
    let x_upd = f.solve(&b).unwrap();
    let x_fresh = fresh.solve(&b).unwrap();
    UpdateSequenceReport {
        reconstruction,
        solve_rel: rel_diff(&x_upd, &x_fresh),
        ops,
    }
}

fn pick_sparse(rng: &mut impl Rng, pool: &[usize], density: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for &i in pool {
        if rng.random::<f64>() < density.max(0.1) {
            out.push((i, rng.random_range(-1.0..1.0)));
        }
    }
    if out.is_empty() {
        out.push((pool[rng.random_range(0..pool.len())], 0.7));
    }
    out
}

/// Random dense-ish matrix with entries in `[-1, 1]` at the given density.
pub fn random_matrix(rng: &mut impl Rng, m: usize, n: usize, density: f64) -> SparseMatrix {
    let mut rows = vec![vec![0.0; n]; m];
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            if rng.random::<f64>() < density {
                *v = rng.random_range(-1.0..1.0);
            }
        }
    }
    SparseMatrix::from_dense(&rows)
}

/// Random subproblem data: a convex problem with box bounds, plus an iterate,
/// multipliers and penalties.
pub struct RandomSubproblem {
    pub problem: pqp::QpProblem,
    pub x: Vec<f64>,
    pub xhat: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma_y: Vec<f64>,
    pub sigma_x_inv: Vec<f64>,
}

pub fn random_subproblem(rng: &mut impl Rng, n: usize, m: usize) -> RandomSubproblem {
    let mut q = random_spd(rng, n, 0.3);
    // Make Q only positive semidefinite-ish by shrinking its diagonal.
    for i in 0..n {
        q.a[i][i] *= 0.5;
    }
    let a = random_matrix(rng, m, n, 0.4);
    let l: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..0.0)).collect();
    let u: Vec<f64> = l.iter().map(|l| l + rng.random_range(0.0..1.5)).collect();
    let problem = pqp::QpProblem::new(q.to_sparse(), random_vec(rng, n), a, l, u).unwrap();
    RandomSubproblem {
        x: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        xhat: random_vec(rng, n),
        y: random_vec(rng, m),
        sigma_y: (0..m).map(|_| 10f64.powf(rng.random_range(-2.0..3.0))).collect(),
        sigma_x_inv: vec![10f64.powf(rng.random_range(-7.0..0.0)); n],
        problem,
    }
}

/// Brute-force convex QP oracle: enumerates every assignment of each row to
/// free / at lower bound / at upper bound, solves the equality-constrained
/// KKT system, keeps the feasible points and returns the best one.
pub fn enumeration_oracle(p: &pqp::QpProblem) -> Option<(Vec<f64>, f64)> {
    use nalgebra::{DMatrix, DVector};
    let (n, m) = (p.n(), p.m());
    let qd = p.q_mat.to_dense();
    let ad = p.a.to_dense();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let total = 3usize.pow(m as u32);
    'combo: for code in 0..total {
        let mut rows = Vec::new();
        let mut c = code;
        for i in 0..m {
            let choice = c % 3;
            c /= 3;
            match choice {
                0 => {}
                1 => rows.push((i, p.l[i])),
                _ => {
                    if p.l[i] == p.u[i] {
                        continue 'combo; // same as choice 1
                    }
                    rows.push((i, p.u[i]))
                }
            }
        }
        if rows.iter().any(|(_, b)| !b.is_finite()) {
            continue;
        }
        let k = rows.len();
        let mut kkt = DMatrix::<f64>::zeros(n + k, n + k);
        let mut rhs = DVector::<f64>::zeros(n + k);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = qd[i][j];
            }
            rhs[i] = -p.q[i];
        }
        for (r, &(i, b)) in rows.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = ad[i][j];
                kkt[(j, n + r)] = ad[i][j];
            }
            rhs[n + r] = b;
        }
        let Some(sol) = kkt.clone().lu().solve(&rhs) else { continue };
        if (&kkt * &sol - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
            continue;
        }
        let x: Vec<f64> = sol.iter().take(n).copied().collect();
        let ax = p.a.mul_vec(&x);
        let feasible = (0..m).all(|i| ax[i] >= p.l[i] - 1e-9 && ax[i] <= p.u[i] + 1e-9);
        if !feasible {
            continue;
        }
        let f = p.objective(&x);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((x, f));
        }
    }
    best
}

/// Random symmetric matrix with entries in `[-1, 1]` and a full diagonal.
pub fn random_symmetric(r: &mut impl Rng, n: usize, density: f64) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            if i == j || r.random::<f64>() < density {
                let v: f64 = r.random_range(-1.0..1.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
    }
    a
}

/// Smallest eigenvalue from a dense symmetric eigensolver.
pub fn dense_min_eig(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]);
    nalgebra::SymmetricEigen::new(m).eigenvalues.min()
}

/// Random piecewise-affine derivative with `pairs` breakpoint terms.
pub fn random_pwa(r: &mut impl Rng, pairs: usize) -> pqp::linesearch::PwaDerivative {
    let mut delta = Vec::new();
    let mut alpha = Vec::new();
    for _ in 0..pairs {
        let d = match r.random_range(0..10) {
            0 => 0.0,
            _ => r.random_range(-3.0..3.0),
        };
        let a = match r.random_range(0..12) {
            0 => f64::INFINITY,
            _ => r.random_range(-5.0..5.0),
        };
        delta.push(d);
        alpha.push(a);
    }
    pqp::linesearch::PwaDerivative {
        eta: 10f64.powf(r.random_range(-6.0..2.0)),
        beta: r.random_range(-20.0..20.0),
        delta,
        alpha,
    }
}

/// Bisection oracle for the root of a nondecreasing piecewise-affine derivative.
pub fn bisection(p: &pqp::linesearch::PwaDerivative) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while p.eval(lo) > 0.0 {
        lo *= 2.0;
    }
    while p.eval(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.eval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

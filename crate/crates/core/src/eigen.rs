//! Lower bound on the smallest eigenvalue of a sparse symmetric matrix.
//!
//! The iteration minimizes the Rayleigh quotient over the span of the current
//! iterate, its residual and a conjugate direction (block size one, no
//! preconditioner).  The small projected problems are solved with a dense
//! generalized symmetric eigensolver (Cholesky reduction + cyclic Jacobi).

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Default residual tolerance used by the solver.
pub const DEFAULT_TOLERANCE: f64 = 1e-5;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Gram matrices with a condition estimate above this value lose their
/// conjugate (then residual) direction for the iteration.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// Result of [`min_eigenvalue`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigEstimate {
    /// Lower bound `λ* = λ − ‖w‖₂` (exact when the iterate approximates the
    /// smallest eigenpair).
    pub lambda_lb: f64,
    /// Rayleigh quotient `λ` of `eigvec` at exit.
    pub rayleigh: f64,
    /// Unit-norm approximate eigenvector.
    pub eigvec: Vec<f64>,
    /// Iterations performed.
    pub iterations: usize,
    /// `‖Qx − λx‖₂` at exit.
    pub residual_norm: f64,
    /// Whether the residual tolerance was reached within the iteration cap.
    pub converged: bool,
    /// Rayleigh quotient after every iteration, starting with the initial one.
    pub history: Vec<f64>,
}

/// Solves `A v = μ B v` for small dense symmetric `A` and SPD `B`.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors,
/// normalized so that `vᵀ B v = 1`.  Fails with [`Error::SingularGram`] when
/// `B` is not numerically positive definite.
pub fn small_generalized_symmetric_eig(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let k = a.len();
    if k == 0 {
        return Err(Error::Empty("generalized eigenproblem of size 0".into()));
    }
    if b.len() != k || a.iter().chain(b).any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch("A and B must both be k×k".into()));
    }
    let l = dense_cholesky(b).ok_or(Error::SingularGram)?;
    // C = L⁻¹ A L⁻ᵀ
    let mut tmp = vec![vec![0.0; k]; k];
    for j in 0..k {
        let col: Vec<f64> = (0..k).map(|i| a[i][j]).collect();
        let s = forward_sub(&l, &col);
        for i in 0..k {
            tmp[i][j] = s[i];
        }
    }
    let mut c = vec![vec![0.0; k]; k];
    for i in 0..k {
        let s = forward_sub(&l, &tmp[i]);
        c[i] = s;
    }
    for i in 0..k {
        for j in 0..i {
            let avg = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = avg;
            c[j][i] = avg;
        }
    }
    let (vals, vecs) = jacobi_eig(&c);
    let vecs = vecs.iter().map(|u| backward_sub_t(&l, u)).collect();
    Ok((vals, vecs))
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending and orthonormal eigenvectors.
pub fn jacobi_eig(m: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut v = vec![vec![0.0; k]; k];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= f64::EPSILON * f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order.iter().map(|&j| (0..k).map(|i| v[i][j]).collect()).collect();
    (vals, vecs)
}

fn dense_cholesky(b: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = b.len();
    let scale = (0..k).map(|i| b[i][i].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let mut l = vec![vec![0.0; k]; k];
    for j in 0..k {
        let mut d = b[j][j];
        for p in 0..j {
            d -= l[j][p] * l[j][p];
        }
        if d <= 1e-14 * scale {
            return None;
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..k {
            let mut s = b[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            l[i][j] = s / d;
        }
    }
    Some(l)
}

fn forward_sub(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = l.len();
    let mut x = b.to_vec();
    for i in 0..k {
        for p in 0..i {
            x[i] -= l[i][p] * x[p];
        }
        x[i] /= l[i][i];
    }
    x
}

fn backward_sub_t(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = l.len();
    let mut x = b.to_vec();
    for i in (0..k).rev() {
        for p in i + 1..k {
            x[i] -= l[p][i] * x[p];
        }
        x[i] /= l[i][i];
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Deterministic default starting vector: all ones with a fixed ±10 %
/// perturbation pattern, normalized.
pub fn default_start(n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let h = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 63;
            if h == 0 {
                1.1
            } else {
                0.9
            }
        })
        .collect();
    let nrm = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nrm);
    x
}

/// Gershgorin lower bound `min_i (Q_ii − Σ_{j≠i} |Q_ij|)` on `λ_min(Q)`.
pub fn gershgorin_lower_bound(q: &SparseMatrix) -> f64 {
    let n = q.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for j in 0..n {
        for (i, v) in q.col(j) {
            if i == j {
                diag[i] += v;
            } else {
                off[i] += v.abs();
                if q.is_symmetric() {
                    off[j] += v.abs();
                }
            }
        }
    }
    (0..n).map(|i| diag[i] - off[i]).fold(f64::INFINITY, f64::min)
}

/// Estimates `λ_min(Q)` from below by locally optimal Rayleigh-quotient
/// minimization.
///
/// `x0 = None` uses [`default_start`].  When `max_iter` is exhausted the best
/// estimate so far is returned with `converged = false`.
pub fn min_eigenvalue(q: &SparseMatrix, x0: Option<&[f64]>, eps: f64, max_iter: usize) -> Result<EigEstimate> {
    if !q.is_square() {
        return Err(Error::NotSquare { nrows: q.nrows(), ncols: q.ncols() });
    }
    let n = q.ncols();
    if n == 0 {
        return Err(Error::Empty("eigenvalue of a 0×0 matrix".into()));
    }
    let mut x = match x0 {
        Some(v) if v.len() != n => {
            return Err(Error::DimensionMismatch(format!("x0 has length {}, expected {n}", v.len())))
        }
        Some(v) => v.to_vec(),
        None => default_start(n),
    };
    let nrm = norm2(&x);
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(Error::InvalidProblem("starting vector must be nonzero and finite".into()));
    }
    x.iter_mut().for_each(|v| *v /= nrm);

    let mut qx = q.mul_vec(&x);
    let mut lambda = dot(&x, &qx);
    let mut history = vec![lambda];
    // Conjugate direction and its image, if any.
    let mut p: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;

    loop {
        let mut w: Vec<f64> = qx.iter().zip(&x).map(|(a, b)| a - lambda * b).collect();
        let wn = norm2(&w);
        if wn <= eps || iterations >= max_iter {
            return Ok(EigEstimate {
                lambda_lb: lambda - wn,
                rayleigh: lambda,
                eigvec: x,
                iterations,
                residual_norm: wn,
                converged: wn <= eps,
                history,
            });
        }
        iterations += 1;
        w.iter_mut().for_each(|v| *v /= wn);
        let qw = q.mul_vec(&w);

        // Basis [x, ŵ, p̂]; p̂ is made orthogonal to x and ŵ for conditioning
        // (the spanned subspace is unchanged).
        let mut basis: Vec<(Vec<f64>, Vec<f64>)> = vec![(x.clone(), qx.clone()), (w, qw)];
        if let Some((mut pv, mut qp)) = p.take() {
            for (b, qb) in basis.iter() {
                let c = dot(b, &pv);
                axpy(-c, b, &mut pv);
                axpy(-c, qb, &mut qp);
            }
            let pn = norm2(&pv);
            if pn > 1e-14 {
                pv.iter_mut().for_each(|v| *v /= pn);
                qp.iter_mut().for_each(|v| *v /= pn);
                basis.push((pv, qp));
            }
        }

        let (mut new_x, mut new_qx, mut new_p) = ritz_step(&basis)?;
        let mut new_lambda = rayleigh_of(&mut new_x, &mut new_qx, new_p.as_mut());
        if new_lambda > lambda && basis.len() == 3 {
            // Rounding made the three-term step non-monotone; retry without p.
            basis.pop();
            let (a, b, c) = ritz_step(&basis)?;
            new_x = a;
            new_qx = b;
            new_p = c;
            new_lambda = rayleigh_of(&mut new_x, &mut new_qx, new_p.as_mut());
        }
        if new_lambda > lambda {
            // No further descent is numerically possible: report the current
            // iterate (its bound is still valid) as unconverged.
            return Ok(EigEstimate {
                lambda_lb: lambda - wn,
                rayleigh: lambda,
                eigvec: x,
                iterations,
                residual_norm: wn,
                converged: false,
                history,
            });
        }
        x = new_x;
        qx = new_qx;
        lambda = new_lambda;
        p = new_p;
        history.push(lambda);
    }
}

type RitzOut = (Vec<f64>, Vec<f64>, Option<(Vec<f64>, Vec<f64>)>);

/// Rayleigh–Ritz step on the given basis (vectors paired with their images).
/// Columns are normalized; if the Gram matrix is too ill-conditioned the last
/// column is dropped and the step repeated.
fn ritz_step(basis: &[(Vec<f64>, Vec<f64>)]) -> Result<RitzOut> {
    let mut k = basis.len();
    loop {
        let cols: Vec<(Vec<f64>, Vec<f64>)> = basis[..k]
            .iter()
            .map(|(v, qv)| {
                let s = norm2(v);
                (v.iter().map(|a| a / s).collect(), qv.iter().map(|a| a / s).collect())
            })
            .collect();
        let mut am = vec![vec![0.0; k]; k];
        let mut bm = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                am[i][j] = 0.5 * (dot(&cols[i].0, &cols[j].1) + dot(&cols[j].0, &cols[i].1));
                bm[i][j] = dot(&cols[i].0, &cols[j].0);
            }
        }
        let (bvals, _) = jacobi_eig(&bm);
        let cond = bvals[k - 1] / bvals[0];
        let well_posed = bvals[0] > 0.0 && cond <= GRAM_CONDITION_LIMIT;
        if !well_posed && k > 1 {
            k -= 1;
            continue;
        }
        let (_, vecs) = small_generalized_symmetric_eig(&am, &bm)?;
        let y = &vecs[0];
        let n = cols[0].0.len();
        let mut x = vec![0.0; n];
        let mut qx = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut qp = vec![0.0; n];
        for (i, (v, qv)) in cols.iter().enumerate() {
            axpy(y[i], v, &mut x);
            axpy(y[i], qv, &mut qx);
            if i > 0 {
                axpy(y[i], v, &mut p);
                axpy(y[i], qv, &mut qp);
            }
        }
        let p = if k > 1 && norm2(&p) > 0.0 { Some((p, qp)) } else { None };
        return Ok((x, qx, p));
    }
}

/// Normalizes `x` (scaling `qx` and `p` consistently) and returns `xᵀQx`.
fn rayleigh_of(x: &mut [f64], qx: &mut [f64], p: Option<&mut (Vec<f64>, Vec<f64>)>) -> f64 {
    let s = norm2(x);
    x.iter_mut().for_each(|v| *v /= s);
    qx.iter_mut().for_each(|v| *v /= s);
    if let Some((pv, qp)) = p {
        pv.iter_mut().for_each(|v| *v /= s);
        qp.iter_mut().for_each(|v| *v /= s);
    }
    dot(x, qx)
}

//! Up-looking `L D Lᵀ` factorization of symmetric positive definite and
//! quasidefinite matrices, with sparse rank-1 modifications and row/column
//! addition and deletion.
//!
//! The factor is kept as one sorted row list per column so that updates can
//! grow the pattern. Entries that become numerically zero are kept as explicit
//! zeros; the pattern never shrinks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sparse::ordering::{invert_permutation, is_permutation};
use crate::sparse::SparseMatrix;

/// Pivots smaller than this multiple of `‖K‖∞` are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Default)]
struct FactorColumn {
    rows: Vec<usize>,
    vals: Vec<f64>,
}

impl FactorColumn {
    fn position(&self, row: usize) -> std::result::Result<usize, usize> {
        self.rows.binary_search(&row)
    }
}

/// `P K Pᵀ = L D Lᵀ` with `L` unit lower triangular and `D` diagonal.
///
/// All indices taken by the public methods are in the original (unpermuted)
/// numbering; the permutation is applied internally.
///
/// After any method returns an error the factors are in an unspecified state
/// and must be recomputed.
#[derive(Debug, Clone)]
pub struct LdlFactors {
    perm: Vec<usize>,
    iperm: Vec<usize>,
    cols: Vec<FactorColumn>,
    /// For every row, the columns holding a structural entry in that row.
    row_pattern: Vec<Vec<usize>>,
    d: Vec<f64>,
    pivot_tol: f64,
    work: Vec<f64>,
}

impl LdlFactors {
    /// Factorizes the symmetric (upper-stored) matrix `k` under permutation `perm`.
    pub fn factorize(k: &SparseMatrix, perm: &[usize]) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::NotSquare {
                nrows: k.nrows(),
                ncols: k.ncols(),
            });
        }
        if !k.is_symmetric() {
            return Err(Error::InvalidStructure(
                "LDLᵀ factorization expects upper-triangular symmetric storage".into(),
            ));
        }
        let n = k.nrows();
        if !is_permutation(perm, n) {
            return Err(Error::InvalidStructure(format!(
                "ordering is not a permutation of 0..{n}"
            )));
        }
        let iperm = invert_permutation(perm);
        let trip: Vec<(usize, usize, f64)> = k
            .triplets()
            .into_iter()
            .map(|(i, j, v)| {
                let (a, b) = (iperm[i], iperm[j]);
                (a.min(b), a.max(b), v)
            })
            .collect();
        let c = SparseMatrix::from_triplets(n, n, &trip, true)?;
        let norm = k.norm_inf();
        let pivot_tol = PIVOT_TOLERANCE * norm;

        // Elimination tree and column counts.
        const NONE: usize = usize::MAX;
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for col in 0..n {
            flag[col] = col;
            for (row, _) in c.col(col) {
                let mut i = row;
                while i < col && flag[i] != col {
                    if parent[i] == NONE {
                        parent[i] = col;
                    }
                    lnz[i] += 1;
                    flag[i] = col;
                    i = parent[i];
                }
            }
        }

        let mut cols: Vec<FactorColumn> = lnz
            .iter()
            .map(|&cnt| FactorColumn {
                rows: Vec::with_capacity(cnt),
                vals: Vec::with_capacity(cnt),
            })
            .collect();
        let mut row_pattern: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        let mut stack = vec![0usize; n];
        flag.iter_mut().for_each(|f| *f = NONE);

        for kk in 0..n {
            let mut top = n;
            flag[kk] = kk;
            for (row, v) in c.col(kk) {
                y[row] += v;
                let mut i = row;
                let mut len = 0;
                while flag[i] != kk {
                    stack[len] = i;
                    len += 1;
                    flag[i] = kk;
                    i = parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = stack[len];
                }
            }
            let mut dk = y[kk];
            y[kk] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let col = &cols[i];
                for (&r, &l) in col.rows.iter().zip(&col.vals) {
                    y[r] -= l * yi;
                }
                let lki = yi / d[i];
                dk -= lki * yi;
                cols[i].rows.push(kk);
                cols[i].vals.push(lki);
                row_pattern[kk].push(i);
            }
            if !(dk.abs() > pivot_tol) {
                return Err(Error::ZeroPivot {
                    index: kk,
                    value: dk,
                });
            }
            d[kk] = dk;
        }

        Ok(Self {
            perm: perm.to_vec(),
            iperm,
            cols,
            row_pattern,
            d,
            pivot_tol,
            work: vec![0.0; n],
        })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Ordering used: position `k` holds original index `perm[k]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Diagonal of `D` in permuted order.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Structural nonzeros of the strictly lower part of `L`.
    pub fn nnz_l(&self) -> usize {
        self.cols.iter().map(|c| c.rows.len()).sum()
    }

    /// Strictly lower triangle of `L` (permuted coordinates; unit diagonal implicit).
    pub fn l_matrix(&self) -> SparseMatrix {
        let n = self.dim();
        let mut colptr = vec![0usize; n + 1];
        let mut rowidx = Vec::with_capacity(self.nnz_l());
        let mut values = Vec::with_capacity(self.nnz_l());
        for (j, col) in self.cols.iter().enumerate() {
            rowidx.extend_from_slice(&col.rows);
            values.extend_from_slice(&col.vals);
            colptr[j + 1] = rowidx.len();
        }
        SparseMatrix::new(n, n, colptr, rowidx, values, false)
            .expect("factor columns are sorted and in range")
    }

    /// Solves `K x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, factor has dimension {n}",
                b.len()
            )));
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for (j, col) in self.cols.iter().enumerate() {
            let yj = y[j];
            if yj != 0.0 {
                for (&r, &l) in col.rows.iter().zip(&col.vals) {
                    y[r] -= l * yj;
                }
            }
        }
        for (yj, dj) in y.iter_mut().zip(&self.d) {
            *yj /= dj;
        }
        for (j, col) in self.cols.iter().enumerate().rev() {
            let mut acc = y[j];
            for (&r, &l) in col.rows.iter().zip(&col.vals) {
                acc -= l * y[r];
            }
            y[j] = acc;
        }
        for (k, &p) in self.perm.iter().enumerate() {
            b[p] = y[k];
        }
        Ok(())
    }

    /// Replaces the factors of `K` by those of `K + sign · w wᵀ`.
    ///
    /// `w` is given as sparse `(index, value)` pairs in original numbering.
    pub fn rank1_update(&mut self, w: &[(usize, f64)], sign: f64) -> Result<()> {
        let n = self.dim();
        let mut entries = Vec::with_capacity(w.len());
        for &(i, v) in w {
            if i >= n {
                return Err(Error::DimensionMismatch(format!(
                    "update vector index {i} out of range {n}"
                )));
            }
            entries.push((self.iperm[i], v));
        }
        self.update_permuted(&entries, sign)
    }

    /// Rank-1 modification with `w` in permuted coordinates.
    fn update_permuted(&mut self, w: &[(usize, f64)], sigma: f64) -> Result<()> {
        let mut frontier = BTreeSet::new();
        for &(i, v) in w {
            if v != 0.0 {
                self.work[i] += v;
                frontier.insert(i);
            }
        }
        let mut alpha = sigma;
        while let Some(j) = frontier.pop_first() {
            let p = self.work[j];
            self.work[j] = 0.0;
            if p == 0.0 {
                continue;
            }
            let d_old = self.d[j];
            let d_new = d_old + alpha * p * p;
            if !(d_new.abs() > self.pivot_tol) {
                for i in frontier {
                    self.work[i] = 0.0;
                }
                return Err(Error::ZeroPivot {
                    index: j,
                    value: d_new,
                });
            }
            let beta = p * alpha / d_new;
            alpha *= d_old / d_new;
            self.d[j] = d_new;

            // New column pattern is the union of the old one and the pending entries of w.
            let col = std::mem::take(&mut self.cols[j]);
            let mut merged = FactorColumn {
                rows: Vec::with_capacity(col.rows.len() + frontier.len()),
                vals: Vec::with_capacity(col.rows.len() + frontier.len()),
            };
            let mut pending = frontier.iter().copied().peekable();
            let mut existing = col.rows.iter().copied().zip(col.vals.iter().copied()).peekable();
            loop {
                let next = match (existing.peek(), pending.peek()) {
                    (Some(&(r, l)), Some(&f)) if r <= f => {
                        existing.next();
                        if r == f {
                            pending.next();
                        }
                        (r, l)
                    }
                    (_, Some(&f)) => {
                        pending.next();
                        self.row_pattern[f].push(j);
                        (f, 0.0)
                    }
                    (Some(&(r, l)), None) => {
                        existing.next();
                        (r, l)
                    }
                    (None, None) => break,
                };
                let (r, l) = next;
                self.work[r] -= p * l;
                merged.rows.push(r);
                merged.vals.push(l + beta * self.work[r]);
            }
            for &r in &merged.rows {
                frontier.insert(r);
            }
            self.cols[j] = merged;
        }
        Ok(())
    }

    /// Replaces row and column `index` (currently zero apart from a placeholder
    /// diagonal) by the given off-diagonal entries and diagonal value.
    ///
    /// `entries` holds `(original index, value)` pairs of the new column, excluding the diagonal.
    pub fn row_add(&mut self, index: usize, entries: &[(usize, f64)], diag: f64) -> Result<()> {
        let n = self.dim();
        if index >= n {
            return Err(Error::DimensionMismatch(format!(
                "row index {index} out of range {n}"
            )));
        }
        let b = self.iperm[index];
        debug_assert!(self.is_placeholder(b), "row_add on a row that is not a placeholder");

        let mut upper: Vec<(usize, f64)> = Vec::new();
        let mut lower: Vec<(usize, f64)> = Vec::new();
        for &(i, v) in entries {
            if i >= n {
                return Err(Error::DimensionMismatch(format!(
                    "column entry {i} out of range {n}"
                )));
            }
            let pos = self.iperm[i];
            if pos < b {
                upper.push((pos, v));
            } else if pos > b {
                lower.push((pos, v));
            }
        }

        // Solve L_αα x = c̄_αβ restricted to the reach of c̄_αβ; then l̄_αβ = D⁻¹ x.
        let mut frontier: BTreeSet<usize> = BTreeSet::new();
        for &(pos, v) in &upper {
            self.work[pos] += v;
            frontier.insert(pos);
        }
        let mut reach: Vec<(usize, f64)> = Vec::new();
        while let Some(j) = frontier.pop_first() {
            let xj = self.work[j];
            self.work[j] = 0.0;
            reach.push((j, xj));
            let col = &self.cols[j];
            for (&r, &l) in col.rows.iter().zip(&col.vals) {
                if r >= b {
                    break;
                }
                self.work[r] -= l * xj;
                frontier.insert(r);
            }
        }

        // d̄_ββ = c̄_ββ − l̄ᵀ D l̄ = c̄_ββ − Σ x_j² / d_j.
        let mut dbar = diag;
        for &(j, xj) in &reach {
            dbar -= xj * xj / self.d[j];
        }
        if !(dbar.abs() > self.pivot_tol) {
            return Err(Error::ZeroPivot {
                index: b,
                value: dbar,
            });
        }

        // l̄_γβ = (c̄_γβ − L_γα x) / d̄_ββ over the structural union of the contributing columns.
        let mut gamma_rows: BTreeSet<usize> = BTreeSet::new();
        for &(pos, v) in &lower {
            self.work[pos] += v;
            gamma_rows.insert(pos);
        }
        for &(j, xj) in &reach {
            let col = &self.cols[j];
            let start = match col.position(b + 1) {
                Ok(p) | Err(p) => p,
            };
            for (&r, &l) in col.rows[start..].iter().zip(&col.vals[start..]) {
                self.work[r] -= l * xj;
                gamma_rows.insert(r);
            }
        }
        let mut new_col = FactorColumn::default();
        for r in gamma_rows {
            new_col.rows.push(r);
            new_col.vals.push(self.work[r] / dbar);
            self.work[r] = 0.0;
        }

        // Row β of L.
        for &(j, xj) in &reach {
            let value = xj / self.d[j];
            let col = &mut self.cols[j];
            match col.position(b) {
                Ok(p) => col.vals[p] = value,
                Err(p) => {
                    col.rows.insert(p, b);
                    col.vals.insert(p, value);
                    self.row_pattern[b].push(j);
                }
            }
        }
        for &r in &new_col.rows {
            if self.cols[b].position(r).is_err() {
                self.row_pattern[r].push(b);
            }
        }
        // Keep any old structural zeros of column β so the row patterns stay exact.
        let old = std::mem::take(&mut self.cols[b]);
        let mut merged = new_col;
        for r in old.rows {
            if let Err(p) = merged.position(r) {
                merged.rows.insert(p, r);
                merged.vals.insert(p, 0.0);
            }
        }
        self.d[b] = dbar;

        let scale = dbar.abs().sqrt();
        let w: Vec<(usize, f64)> = merged
            .rows
            .iter()
            .zip(&merged.vals)
            .map(|(&r, &l)| (r, l * scale))
            .collect();
        self.cols[b] = merged;
        self.update_permuted(&w, -dbar.signum())
    }

    /// Zeroes row and column `index` and sets its diagonal to `diag`.
    pub fn row_delete(&mut self, index: usize, diag: f64) -> Result<()> {
        let n = self.dim();
        if index >= n {
            return Err(Error::DimensionMismatch(format!(
                "row index {index} out of range {n}"
            )));
        }
        if diag == 0.0 {
            return Err(Error::ZeroPivot {
                index: self.iperm[index],
                value: diag,
            });
        }
        let b = self.iperm[index];
        for &j in &self.row_pattern[b] {
            let col = &mut self.cols[j];
            if let Ok(p) = col.position(b) {
                col.vals[p] = 0.0;
            }
        }
        let d_old = self.d[b];
        let scale = d_old.abs().sqrt();
        let col = &mut self.cols[b];
        let w: Vec<(usize, f64)> = col
            .rows
            .iter()
            .zip(&col.vals)
            .filter(|(_, &l)| l != 0.0)
            .map(|(&r, &l)| (r, l * scale))
            .collect();
        col.vals.iter_mut().for_each(|v| *v = 0.0);
        self.d[b] = diag;
        self.update_permuted(&w, d_old.signum())
    }

    fn is_placeholder(&self, b: usize) -> bool {
        self.cols[b].vals.iter().all(|&v| v == 0.0)
            && self.row_pattern[b].iter().all(|&j| {
                let col = &self.cols[j];
                col.position(b).map_or(true, |p| col.vals[p] == 0.0)
            })
    }

    /// Dense `L D Lᵀ` in permuted coordinates.
    pub fn reconstruct_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![vec![0.0; n]; n];
        for (j, col) in self.cols.iter().enumerate() {
            let dj = self.d[j];
            let mut idx: Vec<(usize, f64)> = vec![(j, 1.0)];
            idx.extend(col.rows.iter().copied().zip(col.vals.iter().copied()));
            for &(r, lr) in &idx {
                for &(s, ls) in &idx {
                    out[r][s] += lr * dj * ls;
                }
            }
        }
        out
    }

    /// `‖L D Lᵀ − P K Pᵀ‖∞` (maximum absolute row sum).
    pub fn reconstruction_residual(&self, k: &SparseMatrix) -> f64 {
        let n = self.dim();
        let mut r = self.reconstruct_dense();
        for (i, j, v) in k.triplets() {
            let (a, b) = (self.iperm[i], self.iperm[j]);
            r[a][b] -= v;
            if k.is_symmetric() && a != b {
                r[b][a] -= v;
            }
        }
        (0..n)
            .map(|i| r[i].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_perm(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn identity_factors() {
        let f = LdlFactors::factorize(&SparseMatrix::identity(3), &identity_perm(3)).unwrap();
        assert_eq!(f.d(), &[1.0, 1.0, 1.0]);
        assert_eq!(f.l_matrix().nnz(), 0);
        assert_eq!(f.solve(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_spd() {
        let k = SparseMatrix::from_dense_symmetric(&[vec![4.0, 2.0], vec![2.0, 3.0]]);
        let f = LdlFactors::factorize(&k, &identity_perm(2)).unwrap();
        assert_eq!(f.d(), &[4.0, 2.0]);
        assert_eq!(f.l_matrix().get(1, 0), 0.5);
        let x = f.solve(&[8.0, 7.0]).unwrap();
        assert!((x[0] - 1.25).abs() < 1e-15 && (x[1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_quasidefinite() {
        let k = SparseMatrix::from_dense_symmetric(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        let f = LdlFactors::factorize(&k, &identity_perm(2)).unwrap();
        assert_eq!(f.d(), &[1.0, -2.0]);
        assert_eq!(f.l_matrix().get(1, 0), 1.0);
        assert_eq!(f.solve(&[0.0, 2.0]).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let k = SparseMatrix::from_dense_symmetric(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(
            LdlFactors::factorize(&k, &identity_perm(2)),
            Err(Error::ZeroPivot { index: 1, .. })
        ));
    }

    #[test]
    fn solve_rejects_wrong_length() {
        let f = LdlFactors::factorize(&SparseMatrix::identity(3), &identity_perm(3)).unwrap();
        assert!(matches!(f.solve(&[1.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn zero_update_is_a_no_op() {
        let k = SparseMatrix::from_dense_symmetric(&[vec![4.0, 2.0], vec![2.0, 3.0]]);
        let mut f = LdlFactors::factorize(&k, &identity_perm(2)).unwrap();
        let before = f.clone();
        f.rank1_update(&[(0, 0.0), (1, 0.0)], 1.0).unwrap();
        assert_eq!(f.d(), before.d());
        assert_eq!(f.l_matrix(), before.l_matrix());
    }

    #[test]
    fn update_identity() {
        let mut f = LdlFactors::factorize(&SparseMatrix::identity(2), &identity_perm(2)).unwrap();
        f.rank1_update(&[(0, 1.0)], 1.0).unwrap();
        assert_eq!(f.d(), &[2.0, 1.0]);
    }

    #[test]
    fn downdate_to_singular_fails() {
        let mut f = LdlFactors::factorize(&SparseMatrix::identity(2), &identity_perm(2)).unwrap();
        assert!(matches!(
            f.rank1_update(&[(1, 1.0)], -1.0),
            Err(Error::ZeroPivot { .. })
        ));
    }

    #[test]
    fn row_add_matches_refactorization() {
        let start = SparseMatrix::from_dense_symmetric(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ]);
        let target = SparseMatrix::from_dense_symmetric(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, -1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ]);
        let mut f = LdlFactors::factorize(&start, &identity_perm(3)).unwrap();
        f.row_add(1, &[(0, 1.0)], -1.0).unwrap();
        let fresh = LdlFactors::factorize(&target, &identity_perm(3)).unwrap();
        for (a, b) in f.d().iter().zip(fresh.d()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(f.reconstruction_residual(&target) < 1e-14);

        // Deleting it again restores the placeholder matrix.
        f.row_delete(1, -1.0).unwrap();
        assert!(f.reconstruction_residual(&start) < 1e-14);
    }

    #[test]
    fn row_add_with_placeholder_column_is_a_no_op() {
        let start = SparseMatrix::diagonal(&[2.0, 1.0, 3.0]);
        let mut f = LdlFactors::factorize(&start, &identity_perm(3)).unwrap();
        f.row_add(1, &[], 1.0).unwrap();
        assert_eq!(f.d(), &[2.0, 1.0, 3.0]);
        assert!(f.reconstruction_residual(&start) == 0.0);
    }

    #[test]
    fn row_delete_rejects_zero_diagonal() {
        let mut f = LdlFactors::factorize(&SparseMatrix::identity(2), &identity_perm(2)).unwrap();
        assert!(f.row_delete(0, 0.0).is_err());
    }

    #[test]
    fn row_delete_on_placeholder_only_changes_diagonal() {
        let mut f =
            LdlFactors::factorize(&SparseMatrix::diagonal(&[1.0, 2.0]), &identity_perm(2)).unwrap();
        f.row_delete(1, -5.0).unwrap();
        assert_eq!(f.d(), &[1.0, -5.0]);
    }

    #[test]
    fn permuted_factorization_solves_original_system() {
        let k = SparseMatrix::from_dense_symmetric(&[
            vec![4.0, 1.0, 0.0, 1.0],
            vec![1.0, 5.0, 2.0, 0.0],
            vec![0.0, 2.0, -3.0, 0.0],
            vec![1.0, 0.0, 0.0, -2.0],
        ]);
        let f = LdlFactors::factorize(&k, &[2, 0, 3, 1]).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = f.solve(&b).unwrap();
        let kx = k.mul_vec(&x);
        for (u, v) in kx.iter().zip(&b) {
            assert!((u - v).abs() < 1e-13);
        }
        assert!(f.reconstruction_residual(&k) < 1e-13);
    }
}

use crate::error::{Error, Result};

/// Compressed sparse column matrix.
///
/// When `symmetric` is set only the upper triangle (`row <= col`) is stored and
/// every operation treats the matrix as its full symmetric expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSC arrays, validating the structural invariants.
    pub fn new(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowidx: Vec<usize>,
        values: Vec<f64>,
        symmetric: bool,
    ) -> Result<Self> {
        if colptr.len() != ncols + 1 {
            return Err(Error::InvalidStructure(format!(
                "colptr has length {}, expected {}",
                colptr.len(),
                ncols + 1
            )));
        }
        if colptr[0] != 0 || colptr[ncols] != values.len() || rowidx.len() != values.len() {
            return Err(Error::InvalidStructure(
                "colptr endpoints do not match the value array".into(),
            ));
        }
        if symmetric && nrows != ncols {
            return Err(Error::NotSquare { nrows, ncols });
        }
        for j in 0..ncols {
            if colptr[j] > colptr[j + 1] {
                return Err(Error::InvalidStructure(format!(
                    "colptr decreases at column {j}"
                )));
            }
            let rows = &rowidx[colptr[j]..colptr[j + 1]];
            for (k, &i) in rows.iter().enumerate() {
                if i >= nrows {
                    return Err(Error::InvalidStructure(format!(
                        "row index {i} out of range in column {j}"
                    )));
                }
                if k > 0 && rows[k - 1] >= i {
                    return Err(Error::InvalidStructure(format!(
                        "row indices not strictly increasing in column {j}"
                    )));
                }
                if symmetric && i > j {
                    return Err(Error::InvalidStructure(format!(
                        "symmetric matrix stores lower entry ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            colptr,
            rowidx,
            values,
            symmetric,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    ///
    /// For symmetric matrices, entries below the diagonal are moved to their
    /// mirrored upper position, so callers should pass one triangle only.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
        symmetric: bool,
    ) -> Result<Self> {
        if symmetric && nrows != ncols {
            return Err(Error::NotSquare { nrows, ncols });
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidStructure(format!(
                    "triplet ({i},{j}) outside {nrows}x{ncols}"
                )));
            }
            let (i, j) = if symmetric && i > j { (j, i) } else { (i, j) };
            entries.push((i, j, v));
        }
        entries.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));

        let mut colptr = vec![0usize; ncols + 1];
        let mut rowidx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            rowidx.push(i);
            values.push(v);
            colptr[j + 1] += 1;
            last = Some((i, j));
        }
        for j in 0..ncols {
            colptr[j + 1] += colptr[j];
        }
        Ok(Self {
            nrows,
            ncols,
            colptr,
            rowidx,
            values,
            symmetric,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize, symmetric: bool) -> Self {
        Self {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowidx: Vec::new(),
            values: Vec::new(),
            symmetric,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    /// Symmetric diagonal matrix.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            colptr: (0..=n).collect(),
            rowidx: (0..n).collect(),
            values: diag.to_vec(),
            symmetric: true,
        }
    }

    /// Builds a general (non-symmetric storage) matrix from a dense row-major array,
    /// keeping only nonzero entries.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &trip, false).expect("dense input is well formed")
    }

    /// Builds a symmetric (upper-stored) matrix from a dense array, reading the upper triangle.
    pub fn from_dense_symmetric(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate().skip(i) {
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, n, &trip, true).expect("dense input is well formed")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowidx(&self) -> &[usize] {
        &self.rowidx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Stored entries of column `j` as `(row, value)` pairs.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.colptr[j]..self.colptr[j + 1];
        self.rowidx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// All stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for j in 0..self.ncols {
            out.extend(self.col(j).map(|(i, v)| (i, j, v)));
        }
        out
    }

    /// Value at `(i, j)`, honoring symmetric storage.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if self.symmetric && i > j { (j, i) } else { (i, j) };
        let rows = &self.rowidx[self.colptr[j]..self.colptr[j + 1]];
        match rows.binary_search(&i) {
            Ok(k) => self.values[self.colptr[j] + k],
            Err(_) => 0.0,
        }
    }

    /// Returns `y = M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_acc(x, &mut y);
        y
    }

    /// Accumulates `y += M x`.
    pub fn mul_vec_acc(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "mul_vec: x has wrong length");
        assert_eq!(y.len(), self.nrows, "mul_vec: y has wrong length");
        for j in 0..self.ncols {
            let xj = x[j];
            for p in self.colptr[j]..self.colptr[j + 1] {
                let i = self.rowidx[p];
                let v = self.values[p];
                y[i] += v * xj;
                if self.symmetric && i != j {
                    y[j] += v * x[i];
                }
            }
        }
    }

    /// Returns `y = Mᵀ x`.
    pub fn tmul_vec(&self, x: &[f64]) -> Vec<f64> {
        if self.symmetric {
            return self.mul_vec(x);
        }
        assert_eq!(x.len(), self.nrows, "tmul_vec: x has wrong length");
        (0..self.ncols)
            .map(|j| self.col(j).map(|(i, v)| v * x[i]).sum())
            .collect()
    }

    /// `xᵀ M x` for square matrices.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mx = self.mul_vec(x);
        mx.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> Self {
        if self.symmetric {
            return self.clone();
        }
        let trip: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &trip, false).expect("transpose is well formed")
    }

    /// Expands symmetric storage into a general matrix holding both triangles.
    pub fn to_general(&self) -> Self {
        if !self.symmetric {
            return self.clone();
        }
        let mut trip = Vec::with_capacity(2 * self.nnz());
        for (i, j, v) in self.triplets() {
            trip.push((i, j, v));
            if i != j {
                trip.push((j, i, v));
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &trip, false).expect("expansion is well formed")
    }

    /// Dense row-major copy (symmetric storage is mirrored).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            out[i][j] += v;
            if self.symmetric && i != j {
                out[j][i] += v;
            }
        }
        out
    }

    /// Maximum absolute row sum of the full matrix.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0; self.nrows];
        for (i, j, v) in self.triplets() {
            sums[i] += v.abs();
            if self.symmetric && i != j {
                sums[j] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ∞-norm of every row of the full matrix.
    pub fn row_inf_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.nrows];
        for (i, j, v) in self.triplets() {
            out[i] = out[i].max(v.abs());
            if self.symmetric {
                out[j] = out[j].max(v.abs());
            }
        }
        out
    }

    /// ∞-norm of every column of the full matrix.
    pub fn col_inf_norms(&self) -> Vec<f64> {
        if self.symmetric {
            return self.row_inf_norms();
        }
        (0..self.ncols)
            .map(|j| self.col(j).fold(0.0f64, |m, (_, v)| m.max(v.abs())))
            .collect()
    }

    /// Number of stored nonzeros in every row (general storage).
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.nrows];
        for &i in &self.rowidx {
            counts[i] += 1;
        }
        counts
    }

    /// Returns `diag(left) · M · diag(right)`.
    ///
    /// For symmetric matrices `left` and `right` must coincide for the result
    /// to remain symmetric; the caller is responsible for that.
    pub fn scale(&self, left: &[f64], right: &[f64]) -> Self {
        assert_eq!(left.len(), self.nrows);
        assert_eq!(right.len(), self.ncols);
        let mut out = self.clone();
        for j in 0..self.ncols {
            for p in self.colptr[j]..self.colptr[j + 1] {
                out.values[p] = left[self.rowidx[p]] * self.values[p] * right[j];
            }
        }
        out
    }

    /// Multiplies every stored value by `s`.
    pub fn scaled_by(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Whether `other` has exactly the same storage pattern.
    pub fn same_pattern(&self, other: &Self) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.symmetric == other.symmetric
            && self.colptr == other.colptr
            && self.rowidx == other.rowidx
    }

    /// Rows of a general matrix as sparse `(col, value)` lists.
    pub fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.nrows];
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                out[i].push((j, v));
                if self.symmetric && i != j {
                    out[j].push((i, v));
                }
            }
        }
        if self.symmetric {
            out.iter_mut().for_each(|r| r.sort_by_key(|e| e.0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = SparseMatrix::from_triplets(3, 2, &[(2, 0, 1.0), (0, 0, 2.0), (2, 0, 3.0)], false)
            .unwrap();
        assert_eq!(m.colptr(), &[0, 2, 2]);
        assert_eq!(m.rowidx(), &[0, 2]);
        assert_eq!(m.values(), &[2.0, 4.0]);
    }

    #[test]
    fn symmetric_mul_uses_both_triangles() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 4.0), (1, 0, 2.0), (1, 1, 3.0)], true)
            .unwrap();
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![6.0, 5.0]);
        assert_eq!(m.norm_inf(), 6.0);
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(SparseMatrix::new(2, 1, vec![0, 2], vec![1, 0], vec![1.0, 1.0], false).is_err());
        assert!(SparseMatrix::new(2, 2, vec![0, 1, 1], vec![1], vec![1.0], true).is_err());
        assert!(SparseMatrix::new(2, 1, vec![0, 1], vec![5], vec![1.0], false).is_err());
    }

    #[test]
    fn transpose_and_tmul_agree() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.0, -3.0, 4.0]]);
        let x = [1.0, 2.0];
        assert_eq!(a.tmul_vec(&x), a.transpose().mul_vec(&x));
        assert_eq!(a.row_inf_norms(), vec![2.0, 4.0]);
        assert_eq!(a.col_inf_norms(), vec![1.0, 3.0, 4.0]);
    }
}

//! Compressed sparse column storage, fill-reducing ordering and the updatable
//! `L D Lᵀ` factorization.

mod ldl;
mod matrix;
mod mtx;
mod ordering;

pub use ldl::{LdlFactors, PIVOT_TOLERANCE};
pub use matrix::SparseMatrix;
pub use mtx::{read_matrix_market, write_matrix_market};
pub use ordering::{compute_ordering, invert_permutation, is_permutation};

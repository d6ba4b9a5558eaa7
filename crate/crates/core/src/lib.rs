//! Sparse proximal augmented Lagrangian solver for convex and nonconvex
//! quadratic programs
//!
//! ```text
//!     minimize    ½ xᵀQx + qᵀx
//!     subject to  ℓ ≤ Ax ≤ u
//! ```
//!
//! Inner subproblems are minimized by a semismooth Newton method with an
//! exact linesearch; Newton systems are solved with an updatable sparse
//! `L D Lᵀ` factorization of either the KKT or the Schur complement matrix.
//! Nonconvex problems are regularized using a lower bound on the smallest
//! eigenvalue of `Q`. Primal and dual infeasibility are certified.

pub mod bench;
pub mod eigen;
pub mod error;
pub mod io;
pub mod linesearch;
pub mod newton;
pub mod problem;
pub mod scaling;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use solver::{solve, LinsysChoice, QpProblem, Settings, SolveInfo, SolveResult, Solver, Status};
pub use sparse::{LdlFactors, SparseMatrix};

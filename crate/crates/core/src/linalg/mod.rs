//! Dense and triangular real linear algebra.
//!
//! Everything the filters need and nothing more: Cholesky factorization,
//! Householder lower-triangularization of rectangular pre-arrays, triangular
//! solves and inverses, and a 1-norm condition number. All routines are pure.

mod cholesky;
mod condition;
mod householder;
mod matrix;
mod triangular;

use thiserror::Error;

pub use cholesky::{cholesky_lower, PIVOT_FLOOR_EPS, SYMMETRY_TOLERANCE};
pub use condition::condition_estimate;
pub use householder::lower_triangularize;
pub use matrix::Matrix;
pub use triangular::{triangular_inverse, triangular_solve, triangular_solve_vec, LowerTriangular};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is not symmetric (relative asymmetry {relative_asymmetry:e})")]
    NotSymmetric { relative_asymmetry: f64 },
    #[error("input contains NaN or infinite entries")]
    NonFiniteInput,
    #[error("triangular factor is singular (diagonal entry {index} is zero or subnormal)")]
    SingularFactor { index: usize },
    #[error("matrix of shape {shape:?} is not square")]
    NotSquare { shape: (usize, usize) },
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("entry ({row}, {col}) above the diagonal is nonzero")]
    NotLowerTriangular { row: usize, col: usize },
    #[error("diagonal entry {index} is negative")]
    NegativeDiagonal { index: usize },
}

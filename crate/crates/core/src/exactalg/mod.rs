//! Exact scalars (rationals and prime fields) and dense linear algebra over them.

mod field;
mod matrix;

pub use field::{FieldCtx, FieldError, Scalar};
pub use matrix::{
    column_span_complement, kernel_basis, rank, rref, solve, DenseMatrix, LinAlgError, Rref,
    Solution,
};

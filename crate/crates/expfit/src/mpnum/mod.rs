//! Arbitrary-precision numeric substrate: scalars, vectors, matrices,
//! polynomials, and the dense kernels (LU, Jacobi SVD, Aberth roots,
//! matrix exponential, Gauss–Legendre rules) every other module consumes.
//!
//! Every value is immutable after construction and operations inherit the
//! maximum operand precision, so independent solves can run concurrently
//! without any shared precision state.

pub mod linalg;
pub mod matexp;
pub mod poly;
pub mod quad;
pub mod real;
pub mod roots;
pub mod vec;

pub use linalg::{
    jacobi_symmetric_eig, lu_factor, lu_factor_floor, nearest_eigenvalue, solve_least_squares,
    solve_square,
    LeastSquares, LuFactors,
};
pub use matexp::matrix_exp;
pub use poly::Poly;
pub use quad::{gauss_legendre, integrate_panel};
pub use real::{decimal_digits, ComplexVal, Real};
pub use roots::poly_roots;
pub use vec::{ComplexVec, RealMatrix, RealVec};

use thiserror::Error;

/// Errors from the numeric kernels.
#[derive(Debug, Error)]
pub enum MpError {
    #[error("matrix is singular at working precision")]
    SingularMatrix,
    #[error("iteration did not converge: {what}")]
    NoConvergence { what: &'static str },
    #[error("invalid input: {what}")]
    InvalidInput { what: &'static str },
    #[error("shape mismatch: {what}")]
    ShapeMismatch { what: &'static str },
}

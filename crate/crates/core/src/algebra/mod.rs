//! Exact scalars, polynomials in one variable and dense linear algebra.
//!
//! Everything is exact. The matrix routines are generic over [`Scalar`]
//! (fraction-free determinant) and [`Field`] (rank, kernel, solve).

mod matrix;
mod poly;
mod scalar;

pub use matrix::{det_exact, det_poly, kernel_basis, solve_linear, Matrix, RowEchelon};
pub use poly::UniPoly;
pub use scalar::{
    cint, cmul, cnum, creal, fmt_rat, i_unit, parse_rat, rat, rat_int, CNum, CNumJson, Field,
    Rat, Scalar,
};

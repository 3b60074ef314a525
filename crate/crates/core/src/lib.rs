//! Exact symbolic engine for codimension-two real submanifolds of C^{n+1}
//! near a non-degenerate CR singular point.
//!
//! A manifold `w = q + p + iE` is held as a truncated jet. The crate tests
//! formal non-minimality, computes the order-by-order normal form, runs the
//! formal flattening driver, certifies rigidity of the normal form by exact
//! kernel computation and checks the structured binomial determinants.

pub mod algebra;
pub mod cli;
pub mod crfields;
pub mod detlab;
pub mod error;
pub mod flatten;
pub mod leading;
pub mod manifold;
pub mod series;

pub use algebra::{CNum, Matrix, Rat, UniPoly};
pub use series::{HoloCorrection, Jet, MultiIndex, Valuation};
pub use error::{Error, Result};

/// Rational matrix.
pub type QMatrix = Matrix<Rat>;
/// Complex-rational matrix.
pub type CMatrix = Matrix<CNum>;
/// Matrix over the polynomial ring in xi.
pub type PolyMatrix = Matrix<UniPoly>;

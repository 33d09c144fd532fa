//! Exact symbolic engine for reducing differential operators by a
//! projectable group action: invariant sections, kinematic bundles,
//! invariant jets and the reduced operator on the quotient.
//!
//! Expressions live in [`RatFunc`], a normalized quotient of sparse
//! polynomials over the integers in symbols, algebraic generators such as
//! `r = sqrt(x^2 + y^2 + z^2)` and unknown functions. Numeric checks
//! evaluate the same expressions in any [`Scalar`].

pub mod atom;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jets;
pub mod kinematic;
pub mod linalg;
pub mod operators;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod reduce;
pub mod scalar;

pub use error::{Error, ExprError, Result};
pub use linalg::{Field, Matrix};
pub use ratfunc::RatFunc;
pub use scalar::Scalar;

/// Exact rationals, the coefficient field of every constant matrix.
pub type Rational = num_rational::BigRational;
/// Matrices of expressions: Jacobians, isotropy representations, metrics.
pub type SymbolicMatrix = Matrix<RatFunc>;
/// Matrices of exact constants.
pub type RationalMatrix = Matrix<Rational>;
/// Double-precision matrices for numeric checks.
pub type Matrix64 = Matrix<f64>;
/// Single-precision matrices.
pub type Matrix32 = Matrix<f32>;

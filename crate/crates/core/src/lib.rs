//! Nonzero solutions of the quadratic matrix system
//!
//! ```text
//! S = Sᵀ,   S ⊙ 1 = 0,   S J = 0,   S ⊙ S + S² = θ S + D
//! ```
//!
//! from strongly regular graphs, group rings of finite abelian groups,
//! multiplicative characters of finite fields and numerical search, together
//! with the equivalent fixed-point equation `R² + R# = θR` for diagonal
//! curvature tensors.
//!
//! Everything numeric is generic over [`Scalar`]: exact [`Rational`]s, `f64`
//! and `f32`.

pub mod catalog;
pub mod characters;
pub mod curvature;
pub mod cyclotomic;
pub mod error;
pub mod finite_field;
pub mod graphs;
pub mod group_ring;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use matrix::{verify_basic, SolutionReport, SymSolutionMatrix, Violation};
pub use scalar::{Arithmetic, Rational, Scalar};

pub type RationalSolution = SymSolutionMatrix<Rational>;
pub type FloatSolution = SymSolutionMatrix<f64>;
pub type RationalReport = SolutionReport<Rational>;
pub type FloatReport = SolutionReport<f64>;
pub type RationalTensor = curvature::DiagCurvature<Rational>;
pub type FloatTensor = curvature::DiagCurvature<f64>;
pub type RationalGroupFunction = group_ring::GroupFunction<Rational>;
pub type FloatGroupFunction = group_ring::GroupFunction<f64>;

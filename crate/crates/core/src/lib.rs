//! Solver and verification laboratory for degenerate/singular fully
//! nonlinear parabolic equations `u_t = |Du|^γ F(D²u) + f`.
//!
//! The crate marches regularized Dirichlet problems on parabolic cylinders
//! with an explicit monotone-capable finite-difference scheme, runs the
//! `ε → 0` approximation cascade, and measures the regularity structure of
//! the solutions: maximum and comparison principles, boundary barriers,
//! gradient bounds, interior Hölder exponents of `Du`, intrinsic-cylinder
//! oscillation decay, and the time modulus with exponent `(1+α)/(2−αγ)`.
//!
//! All numerics are generic over the scalar type through [`Real`];
//! concrete `f64` aliases live at the crate root.

// `!(x > y)` rejects NaN where `x <= y` would accept it; grid loops index
// several parallel arrays by design.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod estimates;
pub mod geometry;
pub mod operators;
pub mod regularity;
pub mod scalar;
pub mod scheme;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::{real, to_f64, Real};

/// `f64` instantiations of the core types, the precision the CLI and the
/// quantitative checks run at.
pub type Grid64 = geometry::Grid<f64>;
pub type Field64 = geometry::SpaceTimeField<f64>;
pub type Cylinder64 = geometry::Cylinder<f64>;
pub type Operator64 = operators::EllipticOperator<f64>;
pub type Profile64 = operators::DegeneracyProfile<f64>;
pub type Matrix64 = operators::SymmetricMatrix<f64>;
pub type Problem64 = solver::DirichletProblem<f64>;

/// `f32` instantiations, for quick smoke runs.
pub type Grid32 = geometry::Grid<f32>;
pub type Field32 = geometry::SpaceTimeField<f32>;

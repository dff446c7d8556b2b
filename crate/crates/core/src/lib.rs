//! Eigenstructure of the (α,q)-Bernstein operator `T_{n,q,α}`.
//!
//! Everything is generic over [`Scalar`], implemented for exact rationals
//! ([`Rational`], the default) and `f64`. The modules build on each other:
//!
//! - [`scalar`], [`poly`]: numbers and dense polynomials
//! - [`qcalc`]: q-integers, q-binomials, q-Stirling numbers, q-differences
//! - [`bernstein`]: the operator, its basis and its monomial images
//! - [`eigen`]: eigenvalues, monic eigenvectors, eigenbasis utilities
//! - [`asymptotics`]: `n → ∞` limits and convergence tables
//! - [`verify`]: the exact oracle suite behind `qbern verify`

pub mod asymptotics;
pub mod bernstein;
pub mod eigen;
pub mod error;
pub mod poly;
pub mod qcalc;
pub mod scalar;
pub mod verify;

pub use bernstein::{MonomialImage, OperatorParams};
pub use eigen::{EigenSolver, EigenSystem};
pub use error::{Error, Result};
pub use poly::Polynomial;
pub use qcalc::QParam;
pub use scalar::{Mode, Scalar, Tolerance};

/// Exact scalar.
pub type Rational = num_rational::BigRational;

pub type ExactPolynomial = Polynomial<Rational>;
pub type FloatPolynomial = Polynomial<f64>;
pub type ExactParams = OperatorParams<Rational>;
pub type FloatParams = OperatorParams<f64>;
pub type ExactEigenSystem = EigenSystem<Rational>;
pub type FloatEigenSystem = EigenSystem<f64>;

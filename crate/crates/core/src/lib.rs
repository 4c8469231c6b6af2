//! Exact rational calculus for the extended monotone Fock space of a
//! monotone Lévy noise: mixed moments, orthogonal-polynomial projections
//! and the Meixner-class recursions, all over `BigRational`.

pub mod error;
pub mod fock;
pub mod jacobi;
pub mod meixner;
pub mod piecewise;
pub mod poly;
pub mod random;
pub mod rational;
pub mod simplex;
pub mod suite;

pub use error::{Error, Result};
pub use fock::FockVector;
pub use jacobi::{JacobiData, NormSequence};
pub use piecewise::PiecewisePolynomial;
pub use poly::Polynomial;
pub use rational::Rational;
pub use simplex::{Composition, RankTerm, StratifiedFunction, TensorSum};

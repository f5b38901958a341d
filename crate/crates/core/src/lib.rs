//! Numerical toolkit for E-sums of Banach algebras, their amenability
//! constants and a James-type construction over finite directed systems.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at this level fix `f64`.

pub mod algebra;
pub mod derivations;
pub mod error;
pub mod esum;
pub mod jsum;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type LatticeNorm = lattice::LatticeNormSpec<f64>;
pub type Orlicz = lattice::OrliczFunction<f64>;
pub type Mat = linalg::Matrix<f64>;
pub type Algebra = algebra::FiniteAlgebra<f64>;
pub type ESum = esum::ESumAlgebra<f64>;
pub type System = jsum::JSystem<f64>;
pub type Problem = tensor::DiagonalProblem<f64>;

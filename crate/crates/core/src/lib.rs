//! Symmetric free polynomials in two noncommuting variables, their
//! factorisation through `w -> (u, v^2, v u v)`, noncommutative Newton-Girard
//! formulae, and all matrix square roots lying in the algebra of a matrix.

pub mod domains;
pub mod error;
pub mod funcalc;
pub mod girard;
pub mod linalg;
pub mod parse;
pub mod ratexpr;
pub mod sqrtlib;
pub mod symbasis;
pub mod text;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use ratexpr::{Assignment, RatExpr};
pub use words::{Chart, FreePoly, MatrixTuple, Word};

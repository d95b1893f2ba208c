//! Exact construction of free affine actions on linear Λ-trees.
//!
//! The crate builds the affine embedding `γ̄ : UT(n,ℚ) → UT(m+1,ℚ)` from the
//! graded left-symmetric structure on `𝔲𝔱(n)`, its extension `φ̄` to upper
//! triangular groups with positive diagonal, lexicographic wreath product
//! actions, and a seeded harness that checks the algebraic identities behind
//! them with exact arithmetic.

pub mod affine;
pub mod error;
pub mod expsum;
pub mod golden;
pub mod harness;
pub mod hyperbolic;
pub mod integerize;
pub mod lsa;
pub mod matrix;
pub mod order;
pub mod sample;
pub mod scalar;
pub mod tstar;
pub mod wreath;

pub use error::{Error, Result};
pub use expsum::ExpSum;
pub use matrix::TriMat;
pub use scalar::{Rat, Scalar, Sign};

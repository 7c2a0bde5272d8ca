//! Numerical spectral analysis of block Jacobi operators.
//!
//! A block Jacobi operator acts on `C^d`-valued sequences by
//! `(J u)_n = A_{n-1}^* u_{n-1} + B_n u_n + A_n u_{n+1}` with invertible `A_n` and Hermitian `B_n`.
//! The crate provides the matrix orthogonal polynomials and transfer matrices of `J`, its matrix
//! Weyl function and boundary values, atomic spectral matrix measures, and subordinacy-type
//! diagnostics built on interpolated seminorms.

pub mod blockcore;
pub mod cli;
pub mod error;
pub mod measure;
pub mod seminorms;
pub mod solutions;
pub mod subordinacy;
pub mod transfer;
pub mod weyl;

pub use error::{Error, Result};

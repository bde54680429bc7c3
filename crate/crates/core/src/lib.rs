//! Numerical laboratory for zeros of random sparse Laurent polynomials.

// Links the system OpenBLAS/LAPACK used by the eigensolvers.
extern crate openblas_src;

pub mod error;
pub mod polytope;

pub use error::{Error, Result};
pub mod linalg;
pub mod numeric;
pub mod basis;
pub mod ensembles;
pub mod solver;
pub mod extremal;
pub mod measures;

//! Numerical library for convex best dominants of exact differential
//! subordinations: branch-aware complex kernels, target catalog, averaging
//! operator, dominant/majorant builders, sharp hypergeometric lower bounds,
//! and grid-based geometric verification.

pub mod averaging;
pub mod bounds;
pub mod complex;
pub mod deriv;
pub mod dominant;
pub mod error;
pub mod grid;
pub mod quad;
pub mod target;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

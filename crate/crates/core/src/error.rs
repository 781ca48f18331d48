//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of the underlying theorem is violated; every violation
    /// found is listed.
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    /// A value on a continuation path hit zero, so the fractional power
    /// cannot be tracked past it.
    #[error("branch collapse at path index {index}{}", ray_suffix(.ray))]
    BranchCollapse { ray: Option<usize>, index: usize },

    /// Adaptive quadrature hit the subdivision limit.
    #[error("quadrature did not converge: achieved error estimate {achieved:.3e}, requested {requested:.3e}")]
    QuadNonConvergence { achieved: f64, requested: f64 },

    /// A series hit its term cap before the termination criterion.
    #[error("series did not converge after {terms} terms (last |term| = {last_term:.3e}, partial sum = {partial:.12e})")]
    SeriesNonConvergence {
        terms: usize,
        last_term: f64,
        partial: f64,
    },

    /// Argument of tan within the rejection distance of an odd multiple of pi/2.
    #[error("tan argument {arg} within {dist:.3e} of a pole")]
    NearPole { arg: Complex64, dist: f64 },

    /// A denominator or power base vanished where the operator is undefined.
    #[error("singular input: {0}")]
    SingularInput(String),

    /// The query point sits too close to the curve for a reliable winding count.
    #[error("winding indeterminate: point within {dist:.3e} of curve (tolerance {tol:.3e})")]
    IndeterminateWinding { dist: f64, tol: f64 },

    /// Parameter combination outside what the evaluation methods cover.
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    /// Radial integration could not proceed without shrinking the step below
    /// the minimum.
    #[error("stiffness: step underflow on ray {ray} at r = {r:.6}")]
    Stiffness { ray: usize, r: f64 },

    /// The derivative of a supposedly univalent map vanished on the grid.
    #[error("derivative vanishes near z = {z}: univalence suspect")]
    VanishingDerivative { z: Complex64 },

    /// Value out of the argument range an evaluation can represent.
    #[error("range error: {0}")]
    Range(String),

    #[error("i/o error: {0}")]
    Io(String),
}

fn ray_suffix(ray: &Option<usize>) -> String {
    match ray {
        Some(r) => format!(" on ray {r}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a ray index to a branch-collapse raised inside per-ray work.
    pub fn on_ray(self, ray: usize) -> Self {
        match self {
            Error::BranchCollapse { index, .. } => Error::BranchCollapse {
                ray: Some(ray),
                index,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

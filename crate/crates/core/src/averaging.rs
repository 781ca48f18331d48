//! The averaging operator that produces the convex kernel of every dominant:
//! Q(z) = (1/(n·z^{1/n})) ∫₀^z h(t)·t^{1/n − 1} dt, computed after the exact
//! substitution t = uⁿz, which removes both the t^{1/n−1} singularity and the
//! z^{1/n} prefactor:
//!
//!   Q(z)   = ∫₀¹ h(uⁿz) du
//!   Q′(z)  = ∫₀¹ h′(uⁿz)·uⁿ du
//!   Q″(z)  = ∫₀¹ h″(uⁿz)·u²ⁿ du
//!
//! Derivatives are taken under the integral sign, never by differencing
//! through the quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::quad_unit;
use crate::target::AnalyticTarget;

pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

/// Averaging-operator evaluator for one target and one n.
#[derive(Debug, Clone)]
pub struct DiskAverage {
    target: AnalyticTarget,
    n: u32,
    tol: f64,
}

impl DiskAverage {
    pub fn new(target: AnalyticTarget, n: u32, tol: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain(format!("n = {n} must be >= 1")));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tol = {tol} must be positive")));
        }
        Ok(DiskAverage { target, n, tol })
    }

    pub fn with_default_tol(target: AnalyticTarget, n: u32) -> Result<Self> {
        Self::new(target, n, DEFAULT_QUAD_TOL)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn target(&self) -> &AnalyticTarget {
        &self.target
    }

    fn check_interior(&self, z: Complex64) -> Result<()> {
        if z.norm() < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "averaging operator is defined on |z| < 1, got |z| = {}",
                z.norm()
            )))
        }
    }

    /// Q(z); Q(0) = h(0).
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        if z.norm() == 0.0 {
            return Ok(self.target.center());
        }
        let n = self.n as i32;
        quad_unit(|u| Ok(self.target.eval(u.powi(n) * z)), self.tol)
    }

    /// Q′(z).
    pub fn d1(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        let n = self.n as i32;
        quad_unit(
            |u| Ok(self.target.d1(u.powi(n) * z) * u.powi(n)),
            self.tol,
        )
    }

    /// Q″(z).
    pub fn d2(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        let n = self.n as i32;
        quad_unit(
            |u| Ok(self.target.d2(u.powi(n) * z) * u.powi(2 * n)),
            self.tol,
        )
    }
}

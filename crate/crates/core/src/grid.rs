//! Disk sampling lattices, closed boundary curves, and winding-number
//! containment tests.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::complex::arg_principal;
use crate::error::{Error, Result};

/// Radial × angular sample lattice on |z| ≤ r_max, organized per ray so that
/// branch tracking can walk each ray outward from the center.
#[derive(Debug, Clone)]
pub struct DiskGrid {
    r_levels: Vec<f64>,
    n_theta: usize,
    r_max: f64,
}

impl DiskGrid {
    pub fn new(r_levels: Vec<f64>, n_theta: usize) -> Result<Self> {
        let mut violations = Vec::new();
        if r_levels.is_empty() {
            violations.push("grid needs at least one radial level".to_string());
        }
        if n_theta < 4 {
            violations.push(format!("angular count {n_theta} < 4"));
        }
        let mut prev = 0.0;
        for &r in &r_levels {
            if !(r > prev) {
                violations.push(format!("radial levels must be strictly ascending and positive (saw {r} after {prev})"));
                break;
            }
            prev = r;
        }
        let r_max = r_levels.last().copied().unwrap_or(0.0);
        if !(r_max < 1.0) {
            violations.push(format!("r_max = {r_max} must be < 1"));
        }
        if violations.is_empty() {
            Ok(DiskGrid {
                r_levels,
                n_theta,
                r_max,
            })
        } else {
            Err(Error::Validation(violations))
        }
    }

    /// Uniform lattice: radii r_max·(i+1)/n_r, angles 2πj/n_theta.
    pub fn uniform(n_r: usize, n_theta: usize, r_max: f64) -> Result<Self> {
        if n_r == 0 {
            return Err(Error::Validation(vec!["n_r must be positive".into()]));
        }
        let r_levels = (1..=n_r).map(|i| r_max * i as f64 / n_r as f64).collect();
        Self::new(r_levels, n_theta)
    }

    pub fn r_levels(&self) -> &[f64] {
        &self.r_levels
    }

    pub fn n_r(&self) -> usize {
        self.r_levels.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn theta(&self, ray: usize) -> f64 {
        2.0 * PI * ray as f64 / self.n_theta as f64
    }

    pub fn point(&self, ray: usize, level: usize) -> Complex64 {
        Complex64::from_polar(self.r_levels[level], self.theta(ray))
    }

    /// All points of one ray, ascending in modulus.
    pub fn ray(&self, ray: usize) -> Vec<Complex64> {
        let theta = self.theta(ray);
        self.r_levels
            .iter()
            .map(|&r| Complex64::from_polar(r, theta))
            .collect()
    }
}

/// Closed ordered boundary samples (image of a circle under a map).
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    samples: Vec<Complex64>,
}

impl BoundaryCurve {
    /// `samples` must contain the closure point (first ≈ last) and at least
    /// 256 distinct samples.
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 257 {
            return Err(Error::Validation(vec![format!(
                "boundary curve needs ≥ 256 samples plus closure, got {}",
                samples.len()
            )]));
        }
        let curve = BoundaryCurve { samples };
        let tol = 1e-8 * (1.0 + curve.diameter());
        let gap = (curve.samples[0] - curve.samples[curve.samples.len() - 1]).norm();
        if gap > tol {
            return Err(Error::Validation(vec![format!(
                "boundary curve does not close: endpoint gap {gap:.3e} > {tol:.3e}"
            )]));
        }
        Ok(curve)
    }

    /// Sample `f` along |z| = r at `n` uniform angles, appending the closure
    /// point.
    pub fn from_map<F>(r: f64, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let mut samples = Vec::with_capacity(n + 1);
        for k in 0..n {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
            samples.push(f(z)?);
        }
        samples.push(samples[0]);
        Self::new(samples)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Bounding-box diagonal; proxy for the curve diameter used to scale the
    /// winding proximity tolerance.
    pub fn diameter(&self) -> f64 {
        let mut re = (f64::INFINITY, f64::NEG_INFINITY);
        let mut im = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.samples {
            re = (re.0.min(s.re), re.1.max(s.re));
            im = (im.0.min(s.im), im.1.max(s.im));
        }
        ((re.1 - re.0).powi(2) + (im.1 - im.0).powi(2)).sqrt()
    }
}

/// Signed winding number of the closed curve around `w`: summed argument
/// increments of (sample − w), each forced into (−π, π), divided by 2π.
pub fn winding_number(curve: &BoundaryCurve, w: Complex64) -> Result<i32> {
    let tol = 1e-6 * curve.diameter();
    let samples = curve.samples();
    let mut min_dist = f64::INFINITY;
    let mut total = 0.0;
    let mut prev_arg = arg_principal(samples[0] - w);
    min_dist = min_dist.min((samples[0] - w).norm());
    for &s in &samples[1..] {
        let d = (s - w).norm();
        min_dist = min_dist.min(d);
        let a = arg_principal(s - w);
        let mut delta = a - prev_arg;
        if delta > PI {
            delta -= 2.0 * PI;
        } else if delta <= -PI {
            delta += 2.0 * PI;
        }
        total += delta;
        prev_arg = a;
    }
    if min_dist < tol {
        return Err(Error::IndeterminateWinding {
            dist: min_dist,
            tol,
        });
    }
    Ok((total / (2.0 * PI)).round() as i32)
}

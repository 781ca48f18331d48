//! Branch-aware complex elementary functions.
//!
//! The principal branch convention is Im Log ∈ (−π, π] everywhere; the only
//! place a value may leave the principal branch is [`continuous_pow_along_path`],
//! which unwraps arguments along an ordered sequence of points.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Argument in (−π, π]. `atan2` returns −π for negative real values reached
/// from below (im = −0.0); fold that onto +π so the convention is exact.
pub fn arg_principal(w: Complex64) -> f64 {
    let a = w.im.atan2(w.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

fn check_finite(w: Complex64, what: &str) -> Result<()> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} is not finite: {w}")))
    }
}

/// Principal power w^s = exp(s·Log w) with Im Log ∈ (−π, π].
///
/// w = 0 with s > 0 returns 0; w = 0 with s ≤ 0 is a domain error.
pub fn principal_pow(w: Complex64, s: f64) -> Result<Complex64> {
    check_finite(w, "power base")?;
    let r = w.norm();
    if r == 0.0 {
        return if s > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::Domain(format!("0^{s} with non-positive exponent")))
        };
    }
    Ok(Complex64::from_polar(r.powf(s), s * arg_principal(w)))
}

/// Result of tracking a fractional power along an ordered path.
#[derive(Debug, Clone)]
pub struct TrackedPow {
    pub values: Vec<Complex64>,
    /// True if the unwrapped argument left (−π, π] anywhere, i.e. the result
    /// deviates from the pointwise principal branch.
    pub left_principal_branch: bool,
}

/// Track w_i^s along an ordered sequence, unwrapping arguments so consecutive
/// argument differences stay in (−π, π). The first output equals the principal
/// power of the first value, which must match `anchor` up to tolerance.
pub fn track_pow(values: &[Complex64], s: f64, anchor: Complex64) -> Result<TrackedPow> {
    if values.is_empty() {
        return Err(Error::Domain("empty path for power tracking".into()));
    }
    for (i, &v) in values.iter().enumerate() {
        check_finite(v, "path value")?;
        if v.norm() == 0.0 {
            return Err(Error::BranchCollapse { ray: None, index: i });
        }
    }
    let first = principal_pow(values[0], s)?;
    let tol = 1e-8 * (1.0 + anchor.norm());
    if (first - anchor).norm() > tol {
        return Err(Error::Domain(format!(
            "anchor {anchor} does not match principal power {first} of first path value"
        )));
    }

    let mut out = Vec::with_capacity(values.len());
    let mut departed = false;
    let mut arg = arg_principal(values[0]);
    out.push(first);
    for &v in &values[1..] {
        let raw = arg_principal(v);
        let mut wrapped = arg.rem_euclid(2.0 * PI);
        if wrapped > PI {
            wrapped -= 2.0 * PI;
        }
        // increment forced into (−π, π]
        let mut delta = raw - wrapped;
        if delta > PI {
            delta -= 2.0 * PI;
        } else if delta <= -PI {
            delta += 2.0 * PI;
        }
        arg += delta;
        if arg > PI || arg <= -PI {
            departed = true;
        }
        out.push(Complex64::from_polar(v.norm().powf(s), s * arg));
    }
    Ok(TrackedPow {
        values: out,
        left_principal_branch: departed,
    })
}

/// Branch-continuous powers along an ordered path (values only).
pub fn continuous_pow_along_path(
    values: &[Complex64],
    s: f64,
    anchor: Complex64,
) -> Result<Vec<Complex64>> {
    track_pow(values, s, anchor).map(|t| t.values)
}

/// Principal-branch complex arctangent, (1/2i)·Log((1+iw)/(1−iw)).
pub fn arctan_c(w: Complex64) -> Result<Complex64> {
    check_finite(w, "arctan argument")?;
    let i = Complex64::new(0.0, 1.0);
    let tol = 1e-14 * (1.0 + w.norm());
    if (w - i).norm() < tol || (w + i).norm() < tol {
        return Err(Error::SingularInput(format!("arctan pole at w = {w}")));
    }
    let ratio = (Complex64::new(1.0, 0.0) + i * w) / (Complex64::new(1.0, 0.0) - i * w);
    let log = Complex64::new(ratio.norm().ln(), arg_principal(ratio));
    Ok(log / (2.0 * i))
}

/// Principal square root, shorthand for `principal_pow(w, 1/2)`.
pub fn principal_sqrt(w: Complex64) -> Complex64 {
    if w.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(w.norm().sqrt(), 0.5 * arg_principal(w))
}

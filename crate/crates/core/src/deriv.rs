//! Central-difference derivatives with one Richardson extrapolation level.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Step for first derivatives. Truncation after Richardson is O(h⁴) ≈ 1e−20,
/// roundoff ≈ ε/h ≈ 1e−11.
fn step_first(z: Complex64) -> f64 {
    1e-5 * z.norm().max(1.0)
}

/// Step for second derivatives. Second differences cancel to O(h²·f″) in
/// magnitude, so roundoff grows like ε/h²; h = 1e−3 balances it at ~1e−10
/// against O(h⁴) ≈ 1e−12 truncation. (1e−5 would leave ~1e−6 of roundoff.)
fn step_second(z: Complex64) -> f64 {
    1e-3 * z.norm().max(1.0)
}

/// Derivative of analytic `f` at `z` by central differences along the real
/// direction, Richardson-extrapolated once. `order` is 1 or 2.
pub fn num_deriv<F>(mut f: F, z: Complex64, order: u8) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    match order {
        1 => {
            let h = step_first(z);
            let d_h = central1(&mut f, z, h)?;
            let d_h2 = central1(&mut f, z, h / 2.0)?;
            Ok((4.0 * d_h2 - d_h) / 3.0)
        }
        2 => {
            let h = step_second(z);
            let d_h = central2(&mut f, z, h)?;
            let d_h2 = central2(&mut f, z, h / 2.0)?;
            Ok((4.0 * d_h2 - d_h) / 3.0)
        }
        _ => Err(Error::Domain(format!("derivative order {order} not supported"))),
    }
}

fn central1<F>(f: &mut F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let step = Complex64::new(h, 0.0);
    Ok((f(z + step)? - f(z - step)?) / (2.0 * h))
}

fn central2<F>(f: &mut F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let step = Complex64::new(h, 0.0);
    Ok((f(z + step)? - 2.0 * f(z)? + f(z - step)?) / (h * h))
}

//! Adaptive composite Gauss–Legendre quadrature on [0, 1].

use num_complex::Complex64;
use std::sync::LazyLock;

use crate::error::{Error, Result};

const PANEL_ORDER: usize = 15;
const MAX_DEPTH: u32 = 40;

/// Nodes and weights of the 15-point rule on [−1, 1], found by Newton
/// iteration on P₁₅. Computed once; accurate to machine precision.
static GL15: LazyLock<[(f64, f64); PANEL_ORDER]> = LazyLock::new(|| {
    let n = PANEL_ORDER;
    let mut out = [(0.0f64, 0.0f64); PANEL_ORDER];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
    }
    out
});

fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in GL15.iter() {
        acc += f(mid + half * x)? * w;
    }
    Ok(acc * half)
}

struct Adaptive<'f, F> {
    f: &'f mut F,
    worst: f64,
    /// Roundoff floor: panel disagreement at this level is noise, not signal,
    /// so halving tolerances below it would recurse to the depth cap for free.
    floor: f64,
}

impl<F> Adaptive<'_, F>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let mid = 0.5 * (a + b);
        let left = panel(self.f, a, mid)?;
        let right = panel(self.f, mid, b)?;
        let err = (left + right - whole).norm();
        if err <= tol.max(self.floor) {
            self.worst = self.worst.max(err);
            return Ok(left + right);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::QuadNonConvergence {
                achieved: err,
                requested: tol,
            });
        }
        let half_tol = 0.5 * tol;
        Ok(self.refine(a, mid, left, half_tol, depth + 1)?
            + self.refine(mid, b, right, half_tol, depth + 1)?)
    }
}

/// ∫₀¹ f(u) du with absolute error ≤ `tol`, estimated by bisection agreement
/// of 15-point panels.
pub fn quad_unit<F>(mut f: F, tol: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    quad_unit_with_estimate(&mut f, tol).map(|(v, _)| v)
}

/// Like [`quad_unit`] but also returns the worst accepted panel error estimate.
pub fn quad_unit_with_estimate<F>(f: &mut F, tol: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance {tol} must be positive")));
    }
    let whole = panel(f, 0.0, 1.0)?;
    let floor = 1e-15 * (1.0 + whole.norm());
    let mut state = Adaptive { f, worst: 0.0, floor };
    let value = state.refine(0.0, 1.0, whole, tol, 0)?;
    Ok((value, state.worst))
}

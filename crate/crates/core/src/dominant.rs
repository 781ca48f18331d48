//! Construction of the best dominant q and the majorant H for both operator
//! families, evaluation of the operators themselves, and the exactness /
//! defining-equation residuals.
//!
//! Fractional powers are tracked per ray from the center outward; the anchor
//! at z = 0 is fixed by the required center value, so radial continuation
//! reproduces the analytic branch even where pointwise principal evaluation
//! would jump across a cut. Rays are independent and evaluated in parallel.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

use crate::averaging::{DiskAverage, DEFAULT_QUAD_TOL};
use crate::complex::{principal_pow, principal_sqrt, track_pow};
use crate::deriv::num_deriv;
use crate::error::{Error, Result};
use crate::grid::{BoundaryCurve, DiskGrid};
use crate::target::{AnalyticTarget, OperatorKind, ParamSet};

/// Minimum modulus below which a power base counts as collapsed.
const BASE_COLLAPSE_TOL: f64 = 1e-12;
/// Rejection distance from odd multiples of π/2 for tan arguments.
const TAN_POLE_TOL: f64 = 1e-6;

fn c_one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Required center value p(0) for the subordination chain.
///
/// ψ₁: ((β(1−α)a)^{1/(1−α)} − γ)/β;  ψ₂: (√(γ/β)·tan(√(γβ)a))^{1/(1−α)},
/// principal branches, a = h(0).
pub fn dominant_center(params: &ParamSet, target: &AnalyticTarget) -> Result<Complex64> {
    let a = target.center();
    let e = 1.0 / (1.0 - params.alpha);
    match params.operator {
        OperatorKind::Psi1 => {
            let base = params.beta * (1.0 - params.alpha) * a;
            if base.norm() < BASE_COLLAPSE_TOL {
                return Err(Error::Domain(
                    "beta*(1-alpha)*h(0) vanishes; center value undefined".into(),
                ));
            }
            Ok((principal_pow(base, e)? - params.gamma) / params.beta)
        }
        OperatorKind::Psi2 => {
            let s_ratio = principal_sqrt(params.gamma / params.beta);
            let s_prod = principal_sqrt(params.gamma * params.beta);
            let u = s_prod * a;
            check_tan_argument(u)?;
            let base = s_ratio * u.tan();
            if base.norm() < BASE_COLLAPSE_TOL {
                return Err(Error::Domain(
                    "sqrt(gamma/beta)*tan(sqrt(gamma*beta)*h(0)) vanishes; center value undefined"
                        .into(),
                ));
            }
            principal_pow(base, e)
        }
    }
}

fn check_tan_argument(u: Complex64) -> Result<()> {
    let k = ((u.re - PI / 2.0) / PI).round();
    let pole = PI / 2.0 + k * PI;
    let dist = (u - Complex64::new(pole, 0.0)).norm();
    if dist < TAN_POLE_TOL {
        Err(Error::NearPole { arg: u, dist })
    } else {
        Ok(())
    }
}

/// Per-grid-point complex values with the center value; the shape shared by
/// dominant fields and manufactured solutions.
#[derive(Debug, Clone)]
pub struct GridValues {
    pub grid: DiskGrid,
    pub center: Complex64,
    /// Indexed [ray][radial level].
    pub vals: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone)]
struct RayData {
    q: Vec<Complex64>,
    dq: Vec<Complex64>,
    ddq: Vec<Complex64>,
    left_principal: bool,
}

/// Branch-continuous values of a dominant (or majorant) and its first two
/// derivatives on a disk grid.
#[derive(Debug, Clone)]
pub struct DominantField {
    params: ParamSet,
    target: AnalyticTarget,
    grid: DiskGrid,
    center: Complex64,
    rays: Vec<RayData>,
}

impl DominantField {
    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn target(&self) -> &AnalyticTarget {
        &self.target
    }

    pub fn grid(&self) -> &DiskGrid {
        &self.grid
    }

    /// Required center value p(0); the r → 0 limit of the field.
    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn value(&self, ray: usize, level: usize) -> Complex64 {
        self.rays[ray].q[level]
    }

    pub fn d1(&self, ray: usize, level: usize) -> Complex64 {
        self.rays[ray].dq[level]
    }

    pub fn d2(&self, ray: usize, level: usize) -> Complex64 {
        self.rays[ray].ddq[level]
    }

    /// True if branch tracking left the principal branch anywhere on the ray.
    pub fn branch_flag(&self, ray: usize) -> bool {
        self.rays[ray].left_principal
    }

    pub fn flagged_rays(&self) -> usize {
        self.rays.iter().filter(|r| r.left_principal).count()
    }

    pub fn grid_values(&self) -> GridValues {
        GridValues {
            grid: self.grid.clone(),
            center: self.center,
            vals: self.rays.iter().map(|r| r.q.clone()).collect(),
        }
    }

    /// Worst-case distance between the center value and the polynomial
    /// extrapolation of the four innermost samples of each ray to r = 0.
    pub fn center_extrapolation_error(&self) -> f64 {
        let m = self.grid.n_r().min(4);
        let xs: Vec<f64> = self.grid.r_levels()[..m].to_vec();
        let mut worst: f64 = 0.0;
        for ray in &self.rays {
            let extrap = neville_at_zero(&xs, &ray.q[..m]);
            worst = worst.max((extrap - self.center).norm());
        }
        worst
    }

    /// Synthetic field from explicit closures; used for detector controls and
    /// diagnostics, not by the builders.
    pub fn from_closures<F, G, H2>(
        params: ParamSet,
        target: AnalyticTarget,
        grid: DiskGrid,
        f: F,
        d1: G,
        d2: H2,
    ) -> Self
    where
        F: Fn(Complex64) -> Complex64,
        G: Fn(Complex64) -> Complex64,
        H2: Fn(Complex64) -> Complex64,
    {
        let center = f(Complex64::new(0.0, 0.0));
        let rays = (0..grid.n_theta())
            .map(|j| {
                let pts = grid.ray(j);
                RayData {
                    q: pts.iter().map(|&z| f(z)).collect(),
                    dq: pts.iter().map(|&z| d1(z)).collect(),
                    ddq: pts.iter().map(|&z| d2(z)).collect(),
                    left_principal: false,
                }
            })
            .collect();
        DominantField {
            params,
            target,
            grid,
            center,
            rays,
        }
    }

    /// CSV dump with header `r,theta,re_q,im_q,re_dq,im_dq,re_ddq,im_ddq`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,theta,re_q,im_q,re_dq,im_dq,re_ddq,im_ddq")?;
        for (j, ray) in self.rays.iter().enumerate() {
            let theta = self.grid.theta(j);
            for (i, &r) in self.grid.r_levels().iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r,
                    theta,
                    ray.q[i].re,
                    ray.q[i].im,
                    ray.dq[i].re,
                    ray.dq[i].im,
                    ray.ddq[i].re,
                    ray.ddq[i].im
                )?;
            }
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> FieldDiagnostics {
        FieldDiagnostics {
            operator: self.params.operator.to_string(),
            target: self.target.label().to_string(),
            alpha: self.params.alpha,
            beta_re: self.params.beta.re,
            beta_im: self.params.beta.im,
            gamma_re: self.params.gamma.re,
            gamma_im: self.params.gamma.im,
            n: self.params.n,
            rings: self.grid.n_r(),
            thetas: self.grid.n_theta(),
            r_max: self.grid.r_max(),
            center_re: self.center.re,
            center_im: self.center.im,
            center_extrapolation_error: self.center_extrapolation_error(),
            rays_flagged: self.flagged_rays(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldDiagnostics {
    pub operator: String,
    pub target: String,
    pub alpha: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub n: u32,
    pub rings: usize,
    pub thetas: usize,
    pub r_max: f64,
    pub center_re: f64,
    pub center_im: f64,
    pub center_extrapolation_error: f64,
    pub rays_flagged: usize,
}

fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let n = xs.len();
    let mut p: Vec<Complex64> = ys.to_vec();
    for level in 1..n {
        for i in 0..(n - level) {
            p[i] = ((-xs[i + level]) * p[i] + xs[i] * p[i + 1]) / (xs[i] - xs[i + level]);
        }
    }
    p[0]
}

/// Which curve feeds the power: the averaged target (dominant) or the target
/// itself (majorant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Averaged,
    Direct,
}

/// Best dominant q on the grid (averaged source).
pub fn build_dominant(
    params: &ParamSet,
    target: &AnalyticTarget,
    grid: &DiskGrid,
) -> Result<DominantField> {
    build_field(params, target, grid, Source::Averaged)
}

/// Majorant H on the grid (direct source).
pub fn build_majorant(
    params: &ParamSet,
    target: &AnalyticTarget,
    grid: &DiskGrid,
) -> Result<DominantField> {
    build_field(params, target, grid, Source::Direct)
}

fn build_field(
    params: &ParamSet,
    target: &AnalyticTarget,
    grid: &DiskGrid,
    source: Source,
) -> Result<DominantField> {
    params.validate_with_target(target, grid.r_max())?;
    let center = dominant_center(params, target)?;
    let avg = DiskAverage::new(target.clone(), params.n, DEFAULT_QUAD_TOL)?;

    let rays: Result<Vec<RayData>> = (0..grid.n_theta())
        .into_par_iter()
        .map(|j| build_ray(params, target, &avg, grid, j, source).map_err(|e| e.on_ray(j)))
        .collect();

    Ok(DominantField {
        params: *params,
        target: target.clone(),
        grid: grid.clone(),
        center,
        rays: rays?,
    })
}

fn source_triple(
    target: &AnalyticTarget,
    avg: &DiskAverage,
    source: Source,
    z: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    match source {
        Source::Averaged => Ok((avg.value(z)?, avg.d1(z)?, avg.d2(z)?)),
        Source::Direct => Ok((target.eval(z), target.d1(z), target.d2(z))),
    }
}

fn build_ray(
    params: &ParamSet,
    target: &AnalyticTarget,
    avg: &DiskAverage,
    grid: &DiskGrid,
    ray: usize,
    source: Source,
) -> Result<RayData> {
    let pts = grid.ray(ray);
    let mut f = Vec::with_capacity(pts.len());
    let mut f1 = Vec::with_capacity(pts.len());
    let mut f2 = Vec::with_capacity(pts.len());
    for &z in &pts {
        let (v, d1, d2) = source_triple(target, avg, source, z)?;
        f.push(v);
        f1.push(d1);
        f2.push(d2);
    }
    let a = target.center();
    let e = 1.0 / (1.0 - params.alpha);
    let alpha = params.alpha;
    let beta = params.beta;
    let gamma = params.gamma;

    match params.operator {
        OperatorKind::Psi1 => {
            let scale = beta * (1.0 - alpha);
            // path starts at the center base value so the anchor pins the branch
            let mut path = Vec::with_capacity(pts.len() + 1);
            path.push(scale * a);
            for (idx, &fv) in f.iter().enumerate() {
                let w = scale * fv;
                if w.norm() < BASE_COLLAPSE_TOL {
                    return Err(Error::BranchCollapse {
                        ray: None,
                        index: idx,
                    });
                }
                path.push(w);
            }
            let anchor = principal_pow(path[0], e)?;
            let tracked = track_pow(&path, e, anchor)?;
            let mut q = Vec::with_capacity(pts.len());
            let mut dq = Vec::with_capacity(pts.len());
            let mut ddq = Vec::with_capacity(pts.len());
            for i in 0..pts.len() {
                let w = path[i + 1];
                let s = tracked.values[i + 1];
                let ratio = s / w; // W^{1/(1−α) − 1}, branch-consistent
                q.push((s - gamma) / beta);
                dq.push(ratio * f1[i]);
                ddq.push(ratio * (alpha * beta * f1[i] * f1[i] / w + f2[i]));
            }
            Ok(RayData {
                q,
                dq,
                ddq,
                left_principal: tracked.left_principal_branch,
            })
        }
        OperatorKind::Psi2 => {
            let s_ratio = principal_sqrt(gamma / beta);
            let s_prod = principal_sqrt(gamma * beta);
            let c2 = s_ratio * s_prod;
            let mut path = Vec::with_capacity(pts.len() + 1);
            let mut tans = Vec::with_capacity(pts.len());
            let u0 = s_prod * a;
            check_tan_argument(u0)?;
            path.push(s_ratio * u0.tan());
            for (idx, &fv) in f.iter().enumerate() {
                let u = s_prod * fv;
                check_tan_argument(u)?;
                let t = u.tan();
                let v = s_ratio * t;
                if v.norm() < BASE_COLLAPSE_TOL {
                    return Err(Error::BranchCollapse {
                        ray: None,
                        index: idx,
                    });
                }
                tans.push(t);
                path.push(v);
            }
            let anchor = principal_pow(path[0], e)?;
            let tracked = track_pow(&path, e, anchor)?;
            let mut q = Vec::with_capacity(pts.len());
            let mut dq = Vec::with_capacity(pts.len());
            let mut ddq = Vec::with_capacity(pts.len());
            for i in 0..pts.len() {
                let v = path[i + 1];
                let s = tracked.values[i + 1];
                let t = tans[i];
                let sec2 = c_one() + t * t;
                let v1 = c2 * sec2 * f1[i];
                let v2 = c2 * sec2 * (2.0 * s_prod * t * f1[i] * f1[i] + f2[i]);
                q.push(s);
                dq.push(e * (s / v) * v1);
                ddq.push(e * ((alpha * e) * (s / (v * v)) * v1 * v1 + (s / v) * v2));
            }
            Ok(RayData {
                q,
                dq,
                ddq,
                left_principal: tracked.left_principal_branch,
            })
        }
    }
}

/// Dominant values around the circle |z| = r, branch-tracked radially from
/// the center and then around the circle. Returns n+1 samples (closure point
/// included).
pub fn dominant_circle(
    params: &ParamSet,
    target: &AnalyticTarget,
    r: f64,
    n_samples: usize,
) -> Result<Vec<Complex64>> {
    let avg = DiskAverage::new(target.clone(), params.n, DEFAULT_QUAD_TOL)?;
    circle_values(params, target, r, n_samples, move |z| avg.value(z))
}

/// Majorant values around the circle |z| = r.
pub fn majorant_circle(
    params: &ParamSet,
    target: &AnalyticTarget,
    r: f64,
    n_samples: usize,
) -> Result<Vec<Complex64>> {
    let t = target.clone();
    circle_values(params, target, r, n_samples, move |z| Ok(t.eval(z)))
}

fn circle_values<F>(
    params: &ParamSet,
    target: &AnalyticTarget,
    r: f64,
    n_samples: usize,
    mut source: F,
) -> Result<Vec<Complex64>>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    const RADIAL_STEPS: usize = 64;
    let a = target.center();
    let e = 1.0 / (1.0 - params.alpha);
    let beta = params.beta;
    let gamma = params.gamma;

    // source values along the radial lead-in and then around the circle
    let mut zs = Vec::with_capacity(RADIAL_STEPS + n_samples + 1);
    for k in 1..=RADIAL_STEPS {
        zs.push(Complex64::new(r * k as f64 / RADIAL_STEPS as f64, 0.0));
    }
    for k in 0..=n_samples {
        zs.push(Complex64::from_polar(r, 2.0 * PI * k as f64 / n_samples as f64));
    }

    let mut path = Vec::with_capacity(zs.len() + 1);
    match params.operator {
        OperatorKind::Psi1 => {
            let scale = beta * (1.0 - alpha_of(params));
            path.push(scale * a);
            for (idx, &z) in zs.iter().enumerate() {
                let w = scale * source(z)?;
                if w.norm() < BASE_COLLAPSE_TOL {
                    return Err(Error::BranchCollapse {
                        ray: None,
                        index: idx,
                    });
                }
                path.push(w);
            }
        }
        OperatorKind::Psi2 => {
            let s_ratio = principal_sqrt(gamma / beta);
            let s_prod = principal_sqrt(gamma * beta);
            let u0 = s_prod * a;
            check_tan_argument(u0)?;
            path.push(s_ratio * u0.tan());
            for (idx, &z) in zs.iter().enumerate() {
                let u = s_prod * source(z)?;
                check_tan_argument(u)?;
                let v = s_ratio * u.tan();
                if v.norm() < BASE_COLLAPSE_TOL {
                    return Err(Error::BranchCollapse {
                        ray: None,
                        index: idx,
                    });
                }
                path.push(v);
            }
        }
    }
    let anchor = principal_pow(path[0], e)?;
    let tracked = track_pow(&path, e, anchor)?;
    let circle = &tracked.values[1 + RADIAL_STEPS..];
    let out: Vec<Complex64> = match params.operator {
        OperatorKind::Psi1 => circle.iter().map(|&s| (s - gamma) / beta).collect(),
        OperatorKind::Psi2 => circle.to_vec(),
    };
    Ok(out)
}

fn alpha_of(params: &ParamSet) -> f64 {
    params.alpha
}

/// Closed boundary curve of the dominant image at |z| = r.
pub fn dominant_boundary(
    params: &ParamSet,
    target: &AnalyticTarget,
    r: f64,
    n_samples: usize,
) -> Result<BoundaryCurve> {
    BoundaryCurve::new(dominant_circle(params, target, r, n_samples)?)
}

/// Closed boundary curve of the majorant image at |z| = r.
pub fn majorant_boundary(
    params: &ParamSet,
    target: &AnalyticTarget,
    r: f64,
    n_samples: usize,
) -> Result<BoundaryCurve> {
    BoundaryCurve::new(majorant_circle(params, target, r, n_samples)?)
}

/// One operator evaluation ψ(p, z·p′).
#[derive(Debug, Clone, Copy)]
pub struct PsiValue {
    pub value: Complex64,
    pub operator: OperatorKind,
}

/// ψ₁(p, zp) = (βp+γ)^{1−α}/(β(1−α)) + zp·(βp+γ)^{−α}, principal powers.
pub fn eval_psi1(p: Complex64, zp: Complex64, params: &ParamSet) -> Result<PsiValue> {
    let bpg = params.beta * p + params.gamma;
    if bpg.norm() < 1e-12 * (1.0 + p.norm()) {
        return Err(Error::SingularInput(format!(
            "beta*p + gamma vanishes at p = {p}"
        )));
    }
    let one_m_a = 1.0 - params.alpha;
    let value = principal_pow(bpg, one_m_a)? / (params.beta * one_m_a)
        + zp * principal_pow(bpg, -params.alpha)?;
    Ok(PsiValue {
        value,
        operator: OperatorKind::Psi1,
    })
}

/// ψ₂(p, zp) = (1/√(γβ))·arctan(√(β/γ)·p^{1−α})
///           + ((1−α)/(βp^{2(1−α)}+γ))·zp·p^{−α}, principal branches.
pub fn eval_psi2(p: Complex64, zp: Complex64, params: &ParamSet) -> Result<PsiValue> {
    if (params.gamma * params.beta).norm() == 0.0 {
        return Err(Error::SingularInput("psi2 needs gamma*beta != 0".into()));
    }
    if p.norm() < 1e-12 {
        return Err(Error::SingularInput("psi2 needs p != 0".into()));
    }
    let one_m_a = 1.0 - params.alpha;
    let s_gb = principal_sqrt(params.gamma * params.beta);
    let s_bg = principal_sqrt(params.beta / params.gamma);
    let first = crate::complex::arctan_c(s_bg * principal_pow(p, one_m_a)?)? / s_gb;
    let denom = params.beta * principal_pow(p, 2.0 * one_m_a)? + params.gamma;
    if denom.norm() < 1e-12 * (1.0 + p.norm()) {
        return Err(Error::SingularInput(format!(
            "beta*p^(2(1-alpha)) + gamma vanishes at p = {p}"
        )));
    }
    let second = (one_m_a / denom) * zp * principal_pow(p, -params.alpha)?;
    Ok(PsiValue {
        value: first + second,
        operator: OperatorKind::Psi2,
    })
}

pub fn eval_operator(p: Complex64, zp: Complex64, params: &ParamSet) -> Result<PsiValue> {
    match params.operator {
        OperatorKind::Psi1 => eval_psi1(p, zp, params),
        OperatorKind::Psi2 => eval_psi2(p, zp, params),
    }
}

/// Outcome of an exactness scan over samples.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExactnessScan {
    pub max_residual: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Max over samples of |∂M̃/∂p − ∂N/∂z|, both partials by central
/// differences. For both operators the two partials agree identically, so
/// the residual is a differencing-noise measurement.
pub fn exactness_residual(
    operator: OperatorKind,
    params: &ParamSet,
    samples: &[(Complex64, Complex64)],
) -> Result<ExactnessScan> {
    exactness_residual_scaled(operator, params, samples, 1.0)
}

/// Exactness scan with N replaced by n_scale·N; n_scale ≠ 1 turns the scan
/// into a detector-liveness control.
pub fn exactness_residual_scaled(
    operator: OperatorKind,
    params: &ParamSet,
    samples: &[(Complex64, Complex64)],
    n_scale: f64,
) -> Result<ExactnessScan> {
    let mut max_residual: f64 = 0.0;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    for &(z, p) in samples {
        let dm_dp = num_deriv(|pp| m_tilde(operator, params, pp), p, 1);
        let dn_dz = num_deriv(|zz| n_coef(operator, params, zz, p).map(|v| v * n_scale), z, 1);
        match (dm_dp, dn_dz) {
            (Ok(m), Ok(n)) => {
                max_residual = max_residual.max((m - n).norm());
                evaluated += 1;
            }
            _ => skipped += 1,
        }
    }
    if evaluated == 0 {
        return Err(Error::Domain(
            "exactness scan: every sample left the operator domain".into(),
        ));
    }
    Ok(ExactnessScan {
        max_residual,
        evaluated,
        skipped,
    })
}

fn m_tilde(operator: OperatorKind, params: &ParamSet, p: Complex64) -> Result<Complex64> {
    let one_m_a = 1.0 - params.alpha;
    match operator {
        OperatorKind::Psi1 => {
            let bpg = params.beta * p + params.gamma;
            if bpg.norm() < BASE_COLLAPSE_TOL {
                return Err(Error::SingularInput("beta*p + gamma vanished".into()));
            }
            Ok(principal_pow(bpg, one_m_a)? / (params.beta * one_m_a))
        }
        OperatorKind::Psi2 => {
            let s_gb = principal_sqrt(params.gamma * params.beta);
            let s_bg = principal_sqrt(params.beta / params.gamma);
            Ok(crate::complex::arctan_c(s_bg * principal_pow(p, one_m_a)?)? / s_gb)
        }
    }
}

fn n_coef(
    operator: OperatorKind,
    params: &ParamSet,
    z: Complex64,
    p: Complex64,
) -> Result<Complex64> {
    let one_m_a = 1.0 - params.alpha;
    match operator {
        OperatorKind::Psi1 => {
            let bpg = params.beta * p + params.gamma;
            if bpg.norm() < BASE_COLLAPSE_TOL {
                return Err(Error::SingularInput("beta*p + gamma vanished".into()));
            }
            Ok(z * principal_pow(bpg, -params.alpha)?)
        }
        OperatorKind::Psi2 => {
            let denom = params.beta * principal_pow(p, 2.0 * one_m_a)? + params.gamma;
            if denom.norm() < BASE_COLLAPSE_TOL {
                return Err(Error::SingularInput("psi2 denominator vanished".into()));
            }
            Ok(one_m_a * z * principal_pow(p, -params.alpha)? / denom)
        }
    }
}

/// Deterministic admissible samples (z in |z| ≤ 0.9, p near 1 in the right
/// half-plane) for exactness scans.
pub fn default_exactness_samples(seed: u64, count: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rz = 0.9 * rng.gen::<f64>().sqrt();
            let tz = 2.0 * PI * rng.gen::<f64>();
            let rp = 0.7 * rng.gen::<f64>().sqrt();
            let tp = 2.0 * PI * rng.gen::<f64>();
            (
                Complex64::from_polar(rz, tz),
                Complex64::new(1.0, 0.0) + Complex64::from_polar(rp, tp),
            )
        })
        .collect()
}

/// Max over the grid of |ψ(q(z), n·z·q′(z)) − h(z)|: the defining equation
/// of the dominant.
pub fn ode_residual(field: &DominantField) -> Result<f64> {
    let params = field.params();
    let grid = field.grid();
    let n = params.n as f64;
    let worst = (0..grid.n_theta())
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let mut w: f64 = 0.0;
            for i in 0..grid.n_r() {
                let z = grid.point(j, i);
                let psi = eval_operator(field.value(j, i), n * z * field.d1(j, i), params)?;
                w = w.max((psi.value - field.target().eval(z)).norm());
            }
            Ok(w)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::{make_exp, make_janowski, make_shifted_halfplane};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "{a} vs {b} (diff {:.3e})",
            (a - b).norm()
        );
    }

    fn psi1_params(alpha: f64, beta: Complex64, gamma: Complex64, n: u32) -> ParamSet {
        ParamSet::new(OperatorKind::Psi1, alpha, beta, gamma, n).unwrap()
    }

    fn psi2_params(alpha: f64, beta: Complex64, gamma: Complex64, n: u32) -> ParamSet {
        ParamSet::new(OperatorKind::Psi2, alpha, beta, gamma, n).unwrap()
    }

    #[test]
    fn center_values() {
        // formula collapses to a for alpha = 0, beta = 1, gamma = 0
        let p = psi1_params(0.0, c(1.0, 0.0), c(0.0, 0.0), 1);
        let t = make_janowski(1.0, -1.0).unwrap();
        assert_close(dominant_center(&p, &t).unwrap(), c(1.0, 0.0), 1e-15);

        // 2((2/3)^{3/4} − 1), frozen from direct evaluation
        let p = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let t = make_exp(c(1.0, 0.0)).unwrap();
        assert_close(
            dominant_center(&p, &t).unwrap(),
            c(-0.5244241070662379, 0.0),
            1e-14,
        );

        // ((1/2)·tan(1/2))^{3/5}, frozen from direct evaluation
        let p = psi2_params(-2.0 / 3.0, c(1.0, 0.0), c(0.25, 0.0), 1);
        let t = make_shifted_halfplane(2.0, 0.0).unwrap();
        assert_close(
            dominant_center(&p, &t).unwrap(),
            c(0.4590308885357672, 0.0),
            1e-14,
        );
    }

    #[test]
    fn dominant_reduces_to_average_for_trivial_exponent() {
        let params = psi1_params(0.0, c(1.0, 0.0), c(0.0, 0.0), 1);
        let target = make_janowski(1.0, -1.0).unwrap();
        let grid = DiskGrid::uniform(8, 16, 0.9).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        let avg = DiskAverage::with_default_tol(target, 1).unwrap();
        for j in 0..grid.n_theta() {
            for i in 0..grid.n_r() {
                let z = grid.point(j, i);
                assert_close(field.value(j, i), avg.value(z).unwrap(), 1e-11);
            }
        }
        assert_eq!(field.flagged_rays(), 0);
    }

    #[test]
    fn dominant_matches_exp_closed_form() {
        // q(z) = 2((2(e^z−1)/(3z))^{3/4} − 1)
        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        let grid = DiskGrid::uniform(8, 24, 0.95).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        for j in 0..grid.n_theta() {
            for i in 0..grid.n_r() {
                let z = grid.point(j, i);
                let base = 2.0 * (z.exp() - c_one()) / (3.0 * z);
                let oracle = 2.0 * (principal_pow(base, 0.75).unwrap() - c_one());
                assert_close(field.value(j, i), oracle, 1e-9);
            }
        }
        // spot value at z close to 1 on the real axis, frozen from mpmath
        let z_spot = c(0.95, 0.0);
        let base = 2.0 * (z_spot.exp() - c_one()) / (3.0 * z_spot);
        let oracle = 2.0 * (principal_pow(base, 0.75).unwrap() - c_one());
        assert_close(field.value(0, 7), oracle, 1e-10);
    }

    #[test]
    fn majorant_matches_exp_closed_form() {
        // H(z) = 2((2e^z/3)^{3/4} − 1); H(0.5) frozen from mpmath
        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        let grid = DiskGrid::new(vec![0.25, 0.5, 0.75], 8).unwrap();
        let field = build_majorant(&params, &target, &grid).unwrap();
        assert_close(field.value(0, 1), c(0.14695025583621015, 0.0), 1e-12);
        // only three radial levels here, so the extrapolation is coarse
        assert!(field.center_extrapolation_error() < 0.05);
    }

    #[test]
    fn dominant_psi2_matches_tan_closed_form() {
        // q(z) = (tan(−1/2 − (2/z)·ln((2−z)/2))/2)^{3/5}
        let params = psi2_params(-2.0 / 3.0, c(1.0, 0.0), c(0.25, 0.0), 1);
        let target = make_shifted_halfplane(2.0, 0.0).unwrap();
        let grid = DiskGrid::uniform(8, 24, 0.95).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        let two = c(2.0, 0.0);
        for j in 0..grid.n_theta() {
            for i in 0..grid.n_r() {
                let z = grid.point(j, i);
                let q_avg = -c_one() - (4.0 / z) * ((two - z) / two).ln();
                let oracle = principal_pow(0.5 * (0.5 * q_avg).tan(), 0.6).unwrap();
                assert_close(field.value(j, i), oracle, 1e-9);
            }
        }
        // spot value at z = 0.5, frozen from mpmath
        let spot = field.value(0, 3); // r = 0.5 with n_r = 8, r_max = 0.95? level 3 is 0.475
        let z = grid.point(0, 3);
        let q_avg = -c_one() - (4.0 / z) * ((two - z) / two).ln();
        assert_close(
            spot,
            principal_pow(0.5 * (0.5 * q_avg).tan(), 0.6).unwrap(),
            1e-10,
        );
    }

    #[test]
    fn psi2_small_product_limit() {
        // for tiny γβ the tan route must agree with the small-angle form (γ̃Q)^{1/(1−α)}
        let params = psi2_params(-2.0 / 3.0, c(1.0, 0.0), c(1e-8, 0.0), 1);
        let target = make_shifted_halfplane(2.0, 0.0).unwrap();
        let grid = DiskGrid::new(vec![0.3, 0.6, 0.9], 8).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        let avg = DiskAverage::with_default_tol(target, 1).unwrap();
        for j in 0..grid.n_theta() {
            for i in 0..grid.n_r() {
                let z = grid.point(j, i);
                let small = principal_pow(c(1e-8, 0.0) * avg.value(z).unwrap(), 0.6).unwrap();
                assert_close(field.value(j, i), small, 1e-6);
            }
        }
    }

    #[test]
    fn center_extrapolation_hits_center() {
        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        // the 1e−6 extrapolation contract assumes production-size radial
        // resolution (the four innermost radii small)
        let grid = DiskGrid::uniform(64, 8, 0.95).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        assert!(
            field.center_extrapolation_error() < 1e-6,
            "extrapolation error {:.3e}",
            field.center_extrapolation_error()
        );
    }

    #[test]
    fn psi1_reductions() {
        // alpha = 0, beta = 1, gamma = 0: ψ₁ = p + zp
        let p0 = psi1_params(0.0, c(1.0, 0.0), c(0.0, 0.0), 1);
        let (p, zp) = (c(1.3, -0.4), c(0.2, 0.7));
        assert_close(eval_psi1(p, zp, &p0).unwrap().value, p + zp, 1e-14);

        // alpha = −1, beta = 1, gamma = 0: 2·ψ₁ = p² + 2·zp·p
        let pm = psi1_params(-1.0, c(1.0, 0.0), c(0.0, 0.0), 1);
        let v = eval_psi1(p, zp, &pm).unwrap().value;
        assert_close(2.0 * v, p * p + 2.0 * zp * p, 1e-13);
    }

    #[test]
    fn psi1_spot_value() {
        // (3/2)^{4/3} / ((1/2)(4/3)), frozen from direct evaluation
        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let v = eval_psi1(c(1.0, 0.0), c(0.0, 0.0), &params).unwrap().value;
        assert_close(v, c(2.5756070457449967, 0.0), 1e-13);
    }

    #[test]
    fn psi2_spot_and_linearity() {
        // 2·arctan(2·p^{5/3}) at p = 1, zp = 0
        let params = psi2_params(-2.0 / 3.0, c(1.0, 0.0), c(0.25, 0.0), 1);
        let v = eval_psi2(c(1.0, 0.0), c(0.0, 0.0), &params).unwrap().value;
        assert_close(v, c(2.214297435588181, 0.0), 1e-13);

        // affine in the second argument
        let p = c(0.9, 0.3);
        let s = c(0.1, -0.2);
        let v0 = eval_psi2(p, c(0.0, 0.0), &params).unwrap().value;
        let v1 = eval_psi2(p, s, &params).unwrap().value;
        let v2 = eval_psi2(p, 2.0 * s, &params).unwrap().value;
        assert_close(v2 - v1, v1 - v0, 1e-12);
    }

    #[test]
    fn psi_rejects_singular_input() {
        let params = psi1_params(-0.5, c(1.0, 0.0), c(0.5, 0.0), 1);
        assert!(eval_psi1(c(-0.5, 0.0), c(0.1, 0.0), &params).is_err());
        let params2 = psi2_params(-0.5, c(1.0, 0.0), c(0.25, 0.0), 1);
        assert!(eval_psi2(c(0.0, 0.0), c(0.1, 0.0), &params2).is_err());
    }

    #[test]
    fn exactness_identities_hold() {
        let samples = default_exactness_samples(7, 100);
        let p1 = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let scan = exactness_residual(OperatorKind::Psi1, &p1, &samples).unwrap();
        assert!(scan.max_residual < 1e-7, "psi1 residual {:.3e}", scan.max_residual);
        assert_eq!(scan.skipped, 0);

        let p2 = psi2_params(-2.0 / 3.0, c(1.0, 0.0), c(0.25, 0.0), 1);
        let scan = exactness_residual(OperatorKind::Psi2, &p2, &samples).unwrap();
        assert!(scan.max_residual < 1e-7, "psi2 residual {:.3e}", scan.max_residual);
    }

    #[test]
    fn exactness_detector_is_live() {
        // with N doubled the residual must be |(βp+γ)^{−α}| ≈ O(1)
        let samples = default_exactness_samples(11, 50);
        let p1 = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let scan = exactness_residual_scaled(OperatorKind::Psi1, &p1, &samples, 2.0).unwrap();
        assert!(scan.max_residual > 0.1, "control residual {:.3e}", scan.max_residual);
    }

    #[test]
    fn ode_residual_small_for_built_dominants() {
        let grid = DiskGrid::uniform(8, 16, 0.9).unwrap();

        let params = psi1_params(0.0, c(1.0, 0.0), c(0.0, 0.0), 1);
        let target = make_janowski(1.0, -1.0).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        assert!(ode_residual(&field).unwrap() < 1e-6);

        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        assert!(ode_residual(&field).unwrap() < 1e-6);

        // n-scaling: ψ(q, n·z·q′) = h for n = 2
        let params = psi1_params(0.0, c(1.0, 0.0), c(0.0, 0.0), 2);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        assert!(ode_residual(&field).unwrap() < 1e-6);
    }

    #[test]
    fn chain_rule_consistency_with_numeric_derivative() {
        // away from cuts the field equals the pointwise principal formula, so
        // its derivative can be cross-checked by differencing that formula
        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        let grid = DiskGrid::uniform(6, 8, 0.9).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        let avg = DiskAverage::with_default_tol(target, 1).unwrap();
        let scale = c(0.5, 0.0) * (1.0 + 1.0 / 3.0);
        let pointwise = |z: Complex64| -> Result<Complex64> {
            Ok((principal_pow(scale * avg.value(z)?, 0.75)? - c(1.0, 0.0)) / c(0.5, 0.0))
        };
        for j in [0usize, 3, 5] {
            for i in [1usize, 3, 4] {
                let z = grid.point(j, i);
                let nd = num_deriv(pointwise, z, 1).unwrap();
                assert_close(field.d1(j, i), nd, 1e-6);
            }
        }
    }

    #[test]
    fn boundary_curves_close() {
        let params = psi1_params(-1.0 / 3.0, c(0.5, 0.0), c(1.0, 0.0), 1);
        let target = make_exp(c(1.0, 0.0)).unwrap();
        let qb = dominant_boundary(&params, &target, 0.999, 512).unwrap();
        assert_eq!(qb.samples().len(), 513);
        let hb = majorant_boundary(&params, &target, 0.999, 512).unwrap();
        assert!(hb.diameter() > qb.diameter());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let params = psi1_params(0.0, c(1.0, 0.0), c(0.0, 0.0), 1);
        let target = make_janowski(1.0, -1.0).unwrap();
        let grid = DiskGrid::uniform(3, 4, 0.9).unwrap();
        let field = build_dominant(&params, &target, &grid).unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "r,theta,re_q,im_q,re_dq,im_dq,re_ddq,im_ddq"
        );
        assert_eq!(lines.count(), 12);
    }
}

//! Hypergeometric evaluation and the sharp lower-bound constants for the
//! four target families, plus the univalence-application constant η.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::complex::{principal_pow, principal_sqrt};
use crate::error::{Error, Result};
use crate::quad::quad_unit;
use crate::target::{
    make_exp, make_janowski, make_sector, make_sqrt, AnalyticTarget, OperatorKind,
};

const SERIES_CAP: usize = 1_000_000;
const SERIES_REL_TOL: f64 = 1e-15;
const EULER_QUAD_TOL: f64 = 1e-12;
/// Below this distance from |x| = 1 the Gauss series is replaced by the
/// Euler integral representation.
const SERIES_EDGE: f64 = 1e-6;

/// Lanczos approximation, g = 7 with 9 coefficients; relative error ~1e−13
/// for the real arguments used here.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x (poles at non-positive integers return an error).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma pole at x = {x}")));
    }
    if x < 0.5 {
        // reflection Γ(x)Γ(1−x) = π/sin(πx)
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &coef) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += coef / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc)
}

/// ln Γ(x) for x > 0; keeps Γ-ratio prefactors finite where Γ itself
/// overflows (x ≳ 171).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let y = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &coef) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += coef / (y + i as f64);
    }
    let t = y + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (y + 0.5) * t.ln() - t + acc.ln())
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Gauss series Σ (a)ₖ(b)ₖ/((c)ₖ k!) xᵏ; returns (sum, terms used).
fn hyp2f1_series(a: f64, b: f64, c: f64, x: f64) -> Result<(f64, usize)> {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term == 0.0 || term.abs() < SERIES_REL_TOL * sum.abs() {
            return Ok((sum, k + 1));
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: SERIES_CAP,
        last_term: term.abs(),
        partial: sum,
    })
}

/// Euler integral representation, valid for c > b > 0:
/// Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−xt)^{−a} dt.
/// For b < 1 the substitution t = v^{1/b} removes the endpoint singularity.
fn hyp2f1_euler(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if !(c > b && b > 0.0) {
        return Err(Error::UnsupportedParameters(format!(
            "Euler representation needs c > b > 0, got b = {b}, c = {c}"
        )));
    }
    if x == 1.0 && c - a - b <= 0.0 {
        return Err(Error::Domain(format!(
            "2F1 divergent at x = 1 when c - a - b = {} <= 0",
            c - a - b
        )));
    }
    let prefactor = (ln_gamma(c)? - ln_gamma(b)? - ln_gamma(c - b)?).exp();
    let cb1 = c - b - 1.0;
    let integral = if b < 1.0 && cb1 >= 0.0 {
        let inv_b = 1.0 / b;
        quad_unit(
            |v| {
                let t = v.powf(inv_b);
                Ok(Complex64::new(
                    inv_b * (1.0 - t).powf(cb1) * (1.0 - x * t).powf(-a),
                    0.0,
                ))
            },
            EULER_QUAD_TOL,
        )?
    } else {
        quad_unit(
            |t| {
                Ok(Complex64::new(
                    t.powf(b - 1.0) * (1.0 - t).powf(cb1) * (1.0 - x * t).powf(-a),
                    0.0,
                ))
            },
            EULER_QUAD_TOL,
        )?
    };
    Ok(prefactor * integral.re)
}

/// Gauss hypergeometric ₂F₁(a, b; c; x) for real parameters and x ∈ [−1, 1].
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!(
            "2F1 undefined for non-positive integer c = {c}"
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("2F1 argument x = {x} outside [-1, 1]")));
    }
    if x.abs() < 1.0 - SERIES_EDGE {
        hyp2f1_series(a, b, c, x).map(|(v, _)| v)
    } else {
        hyp2f1_euler(a, b, c, x)
    }
}

/// Confluent hypergeometric ₁F₁(a; b; x).
pub fn hyp1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!(
            "1F1 undefined for non-positive integer b = {b}"
        )));
    }
    if x.abs() > 700.0 {
        return Err(Error::Range(format!("1F1 argument {x} would overflow")));
    }
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        term *= (a + kf) / ((b + kf) * (kf + 1.0)) * x;
        sum += term;
        if term == 0.0 || term.abs() < SERIES_REL_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: SERIES_CAP,
        last_term: term.abs(),
        partial: sum,
    })
}

/// ₁F₁ with a complex argument (needed for complex μ in the exp case).
fn hyp1f1_complex(a: f64, b: f64, x: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!(
            "1F1 undefined for non-positive integer b = {b}"
        )));
    }
    if x.norm() > 700.0 {
        return Err(Error::Range(format!("1F1 argument {x} would overflow")));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        term = term * x * ((a + kf) / ((b + kf) * (kf + 1.0)));
        sum += term;
        if term.norm() < SERIES_REL_TOL * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: SERIES_CAP,
        last_term: term.norm(),
        partial: sum.re,
    })
}

/// The four target families with closed-form bound constants.
#[derive(Debug, Clone, Copy)]
pub enum BoundCase {
    /// h = (1+Az)/(1+Bz), −1 ≤ B < A ≤ 1.
    Janowski { a_coef: f64, b_coef: f64 },
    /// h = e^{μz}, |μ| ≤ 1. The minimum-at-−1 argument needs real μ ∈ (0, 1];
    /// other μ still evaluate but are tagged unverified.
    Exp { mu: Complex64 },
    /// h = √(1+κz), κ ∈ [0, 1].
    Sqrt { kappa: f64 },
    /// Sector case: h = ((1+cz)/(1−z))^{ρ'}, c = e^{iρπ}.
    Sector { rho1: f64, rho2: f64 },
}

impl BoundCase {
    pub fn case_id(&self) -> u8 {
        match self {
            BoundCase::Janowski { .. } => 1,
            BoundCase::Exp { .. } => 2,
            BoundCase::Sqrt { .. } => 3,
            BoundCase::Sector { .. } => 4,
        }
    }

    /// The target this case bounds (for sharpness scans).
    pub fn target(&self) -> Result<AnalyticTarget> {
        match *self {
            BoundCase::Janowski { a_coef, b_coef } => make_janowski(a_coef, b_coef),
            BoundCase::Exp { mu } => make_exp(mu),
            BoundCase::Sqrt { kappa } => make_sqrt(kappa),
            BoundCase::Sector { rho1, rho2 } => make_sector(rho1, rho2),
        }
    }
}

/// λ with its convergence metadata.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaValue {
    pub value: f64,
    pub case_id: u8,
    /// Series terms consumed (0 when only integral routes ran).
    pub terms: usize,
    /// |imaginary part| discarded when the defining expression is complex.
    pub im_residue: f64,
    /// Whether the minimum-at-z=−1 argument applies to these parameters.
    pub min_location_verified: bool,
}

/// Generalized binomial (ρ' choose k) by the recursive product; stable for
/// ρ' ∈ (0, 1], k ≤ 500.
fn generalized_binomial(rho_p: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (rho_p - j as f64) / (j as f64 + 1.0);
    }
    acc
}

/// Partial sums of the sector-case series
/// Σₖ (ρ' choose k)(−c)ᵏ·₂F₁(ρ', 1/n+k, 1+1/n+k; −1)/(1+nk).
pub fn sector_lambda_partial_sums(
    rho1: f64,
    rho2: f64,
    n: u32,
    k_max: usize,
) -> Result<Vec<Complex64>> {
    let rho = (rho1 - rho2) / (rho1 + rho2);
    let rho_p = 0.5 * (rho1 + rho2);
    let c = Complex64::from_polar(1.0, rho * PI);
    let inv_n = 1.0 / n as f64;
    let mut sums = Vec::with_capacity(k_max + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=k_max {
        let binom = generalized_binomial(rho_p, k);
        let f = hyp2f1(rho_p, inv_n + k as f64, 1.0 + inv_n + k as f64, -1.0)?;
        let term = binom * principal_pow(-c, k as f64)? * f / (1.0 + (n as f64) * k as f64);
        acc += term;
        sums.push(acc);
    }
    Ok(sums)
}

const SECTOR_TERM_TOL: f64 = 1e-12;
const SECTOR_TERM_CAP: usize = 500;

fn lambda_sector(rho1: f64, rho2: f64, n: u32) -> Result<LambdaValue> {
    let rho = (rho1 - rho2) / (rho1 + rho2);
    let rho_p = 0.5 * (rho1 + rho2);
    let c = Complex64::from_polar(1.0, rho * PI);
    let c_is_real = rho1 == rho2;
    let inv_n = 1.0 / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut minus_c_pow = Complex64::new(1.0, 0.0);
    let mut binom = 1.0f64;
    let mut terms = 0usize;
    for k in 0..=SECTOR_TERM_CAP {
        let f = hyp2f1(rho_p, inv_n + k as f64, 1.0 + inv_n + k as f64, -1.0)?;
        let term = binom * minus_c_pow * f / (1.0 + (n as f64) * k as f64);
        acc += term;
        terms = k + 1;
        if k > 0 && term.norm() <= SECTOR_TERM_TOL {
            break;
        }
        if k == SECTOR_TERM_CAP {
            return Err(Error::SeriesNonConvergence {
                terms,
                last_term: term.norm(),
                partial: acc.re,
            });
        }
        binom *= (rho_p - k as f64) / (k as f64 + 1.0);
        minus_c_pow *= -c;
    }
    let im_residue = acc.im.abs();
    if c_is_real && im_residue > 1e-9 {
        return Err(Error::Domain(format!(
            "sector series with real c produced imaginary residue {im_residue:.3e}"
        )));
    }
    Ok(LambdaValue {
        value: acc.re,
        case_id: 4,
        terms,
        im_residue,
        min_location_verified: c_is_real,
    })
}

/// The sharp constant λ for a bound case.
pub fn lambda_bound(case: &BoundCase, n: u32) -> Result<LambdaValue> {
    if n < 1 {
        return Err(Error::Domain("n must be a positive integer".into()));
    }
    let inv_n = 1.0 / n as f64;
    match *case {
        BoundCase::Janowski { a_coef, b_coef } => {
            if !(-1.0 <= b_coef && b_coef < a_coef && a_coef <= 1.0) {
                return Err(Error::Validation(vec![format!(
                    "need -1 <= B < A <= 1, got A = {a_coef}, B = {b_coef}"
                )]));
            }
            let first = hyp2f1(1.0, inv_n, 1.0 + inv_n, b_coef)?;
            let second = hyp2f1(1.0, 1.0 + inv_n, 2.0 + inv_n, b_coef)?;
            Ok(LambdaValue {
                value: first - a_coef / (n as f64 + 1.0) * second,
                case_id: 1,
                terms: 0,
                im_residue: 0.0,
                min_location_verified: true,
            })
        }
        BoundCase::Exp { mu } => {
            if mu.norm() > 1.0 {
                return Err(Error::Validation(vec![format!(
                    "need |mu| <= 1, got {}",
                    mu.norm()
                )]));
            }
            let v = hyp1f1_complex(inv_n, inv_n + 1.0, -mu)?;
            Ok(LambdaValue {
                value: v.re,
                case_id: 2,
                terms: 0,
                im_residue: v.im.abs(),
                min_location_verified: mu.im == 0.0 && mu.re > 0.0 && mu.re <= 1.0,
            })
        }
        BoundCase::Sqrt { kappa } => {
            if !(0.0..=1.0).contains(&kappa) {
                return Err(Error::Validation(vec![format!(
                    "need kappa in [0,1], got {kappa}"
                )]));
            }
            Ok(LambdaValue {
                value: hyp2f1(-0.5, inv_n, 1.0 + inv_n, kappa)?,
                case_id: 3,
                terms: 0,
                im_residue: 0.0,
                min_location_verified: true,
            })
        }
        BoundCase::Sector { rho1, rho2 } => {
            if !(rho1 > 0.0 && rho1 <= 1.0 && rho2 > 0.0 && rho2 <= 1.0) {
                return Err(Error::Validation(vec![format!(
                    "need 0 < rho1, rho2 <= 1, got ({rho1}, {rho2})"
                )]));
            }
            lambda_sector(rho1, rho2, n)
        }
    }
}

/// Direct-quadrature oracle for λ: the averaged target at z = −1,
/// ∫₀¹ h(−uⁿ) du.
pub fn averaged_at_minus_one(target: &AnalyticTarget, n: u32) -> Result<Complex64> {
    let ni = n as i32;
    quad_unit(|u| Ok(target.eval(Complex64::new(-u.powi(ni), 0.0))), 1e-12)
}

/// ζ(α, β, γ, λ) = ℜ(((β(1−α)λ)^{1/(1−α)} − γ)/β), β > 0 real.
pub fn zeta_bound(alpha: f64, beta: f64, gamma: Complex64, lambda: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Validation(vec![format!(
            "zeta bound needs real beta > 0, got {beta}"
        )]));
    }
    if !(-1.0..=0.0).contains(&alpha) {
        return Err(Error::Validation(vec![format!("alpha = {alpha} outside [-1, 0]")]));
    }
    let base = Complex64::new(beta * (1.0 - alpha) * lambda, 0.0);
    let powed = principal_pow(base, 1.0 / (1.0 - alpha))?;
    Ok(((powed - gamma) / beta).re)
}

/// ξ(α, β, γ, λ) = ℜ((√(γ/β)·tan(√(γβ)λ))^{1/(1−α)}), β > 0 real, γ ≠ 0.
pub fn xi_bound(alpha: f64, beta: f64, gamma: Complex64, lambda: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Validation(vec![format!(
            "xi bound needs real beta > 0, got {beta}"
        )]));
    }
    if gamma.norm() == 0.0 {
        return Err(Error::Validation(vec!["xi bound needs gamma != 0".into()]));
    }
    if !(-1.0..=0.0).contains(&alpha) {
        return Err(Error::Validation(vec![format!("alpha = {alpha} outside [-1, 0]")]));
    }
    let beta_c = Complex64::new(beta, 0.0);
    let s_prod = principal_sqrt(gamma * beta_c);
    let u = s_prod * lambda;
    if u.norm() >= PI / 2.0 {
        return Err(Error::Domain(format!(
            "|sqrt(gamma*beta)*lambda| = {} >= pi/2",
            u.norm()
        )));
    }
    let k = ((u.re - PI / 2.0) / PI).round();
    let pole_dist = (u - Complex64::new(PI / 2.0 + k * PI, 0.0)).norm();
    if pole_dist < 1e-6 {
        return Err(Error::NearPole { arg: u, dist: pole_dist });
    }
    let s_ratio = principal_sqrt(gamma / beta_c);
    let powed = principal_pow(s_ratio * u.tan(), 1.0 / (1.0 - alpha))?;
    Ok(powed.re)
}

/// η(a) = √(2(1−a)·β(1) + (2a−1)) with β(1) = ∫₀¹ dt/(1+t), for 0 ≤ a < 1.
/// The quadrature value of β(1) is cross-checked against ln 2.
pub fn eta_miller_mocanu(a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Validation(vec![format!("eta needs a in [0,1), got {a}")]));
    }
    let beta1 = quad_unit(|t| Ok(Complex64::new(1.0 / (1.0 + t), 0.0)), 1e-12)?.re;
    if (beta1 - 2.0f64.ln()).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "beta(1) quadrature {beta1} disagrees with ln 2"
        )));
    }
    let radicand = 2.0 * (1.0 - a) * beta1 + (2.0 * a - 1.0);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("negative radicand {radicand}")));
    }
    Ok(radicand.sqrt())
}

/// Machine-readable bound report emitted by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub case_id: u8,
    pub operator: String,
    pub target: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub n: u32,
    pub lambda: f64,
    pub zeta: Option<f64>,
    pub xi: Option<f64>,
    pub series_terms: usize,
    pub im_residue: f64,
    pub min_location_verified: bool,
}

/// λ plus the matching lower bound for one operator family.
pub fn bound_report(
    case: &BoundCase,
    operator: OperatorKind,
    alpha: f64,
    beta: f64,
    gamma: Complex64,
    n: u32,
) -> Result<BoundReport> {
    let lambda = lambda_bound(case, n)?;
    let target = case.target()?;
    let (zeta, xi) = match operator {
        OperatorKind::Psi1 => (Some(zeta_bound(alpha, beta, gamma, lambda.value)?), None),
        OperatorKind::Psi2 => (None, Some(xi_bound(alpha, beta, gamma, lambda.value)?)),
    };
    Ok(BoundReport {
        case_id: lambda.case_id,
        operator: operator.to_string(),
        target: target.label().to_string(),
        alpha,
        beta,
        gamma_re: gamma.re,
        gamma_im: gamma.im,
        n,
        lambda: lambda.value,
        zeta,
        xi,
        series_terms: lambda.terms,
        im_residue: lambda.im_residue,
        min_location_verified: lambda.min_location_verified,
    })
}

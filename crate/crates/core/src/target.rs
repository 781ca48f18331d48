//! Catalog of convex, non-vanishing target functions with analytic
//! derivatives, plus the operator parameter set and its admissibility checks.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::complex::principal_sqrt;
use crate::deriv::num_deriv;
use crate::error::{Error, Result};
use crate::grid::DiskGrid;

type MapFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A convex target h with value, first and second analytic derivatives, and
/// center value h(0).
#[derive(Clone)]
pub struct AnalyticTarget {
    label: String,
    center: Complex64,
    constraint_note: String,
    eval: MapFn,
    d1: MapFn,
    d2: MapFn,
}

impl fmt::Debug for AnalyticTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticTarget")
            .field("label", &self.label)
            .field("center", &self.center)
            .finish()
    }
}

impl AnalyticTarget {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn d1(&self, z: Complex64) -> Complex64 {
        (self.d1)(z)
    }

    pub fn d2(&self, z: Complex64) -> Complex64 {
        (self.d2)(z)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn constraint_note(&self) -> &str {
        &self.constraint_note
    }

    /// User-supplied targets come in through here and must pass the self-test
    /// (center consistency, derivative consistency, non-vanishing, convexity
    /// margin) on the given grid before they can be used downstream.
    pub fn custom(
        label: impl Into<String>,
        eval: MapFn,
        d1: MapFn,
        d2: MapFn,
        constraint_note: impl Into<String>,
        grid: &DiskGrid,
    ) -> Result<Self> {
        let target = AnalyticTarget {
            label: label.into(),
            center: eval(Complex64::new(0.0, 0.0)),
            constraint_note: constraint_note.into(),
            eval,
            d1,
            d2,
        };
        target.self_test(grid)?;
        Ok(target)
    }

    /// Derivative consistency, non-vanishing, and convexity margin on a grid.
    pub fn self_test(&self, grid: &DiskGrid) -> Result<()> {
        let mut violations = Vec::new();
        let c0 = self.eval(Complex64::new(0.0, 0.0));
        if (c0 - self.center).norm() > 0.0 {
            violations.push(format!("center {} != eval(0) = {}", self.center, c0));
        }

        // deterministic spread of ~100 sample points over the grid
        let total = grid.n_r() * grid.n_theta();
        let stride = (total / 100).max(1);
        let mut checked = 0usize;
        let mut min_abs = f64::INFINITY;
        let mut min_margin = f64::INFINITY;
        for idx in (0..total).step_by(stride) {
            let ray = idx % grid.n_theta();
            let level = idx / grid.n_theta();
            let z = grid.point(ray, level);
            let h = self.eval(z);
            min_abs = min_abs.min(h.norm());
            let d1 = self.d1(z);
            let d2 = self.d2(z);
            if d1.norm() > 1e-12 {
                let margin = (Complex64::new(1.0, 0.0) + z * d2 / d1).re;
                min_margin = min_margin.min(margin);
            } else {
                violations.push(format!("derivative vanishes at z = {z}"));
            }
            // differencing steps cannot resolve derivatives right next to a
            // pole on |z| = 1, so consistency sampling stays at |z| ≤ 0.95
            if checked < 100 && z.norm() <= 0.95 {
                let nd1 = num_deriv(|w| Ok(self.eval(w)), z, 1)?;
                if (nd1 - d1).norm() > 1e-7 * (1.0 + d1.norm()) {
                    violations.push(format!(
                        "first derivative inconsistent at z = {z}: analytic {d1}, numeric {nd1}"
                    ));
                }
                let nd2 = num_deriv(|w| Ok(self.eval(w)), z, 2)?;
                if (nd2 - d2).norm() > 1e-6 * (1.0 + d2.norm()) {
                    violations.push(format!(
                        "second derivative inconsistent at z = {z}: analytic {d2}, numeric {nd2}"
                    ));
                }
            }
            checked += 1;
        }
        if min_abs <= 1e-9 {
            violations.push(format!("target vanishes on grid: min |h| = {min_abs:.3e}"));
        }
        if min_margin <= 0.0 {
            violations.push(format!(
                "target not convex on grid: min Re(1 + z h''/h') = {min_margin:.3e}"
            ));
        }
        violations.truncate(8);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }
}

/// h(z) = (1+Az)/(1+Bz) with −1 ≤ B < A ≤ 1.
pub fn make_janowski(a_coef: f64, b_coef: f64) -> Result<AnalyticTarget> {
    if !(-1.0 <= b_coef && b_coef < a_coef && a_coef <= 1.0) {
        return Err(Error::Validation(vec![format!(
            "janowski coefficients must satisfy -1 <= B < A <= 1, got A = {a_coef}, B = {b_coef}"
        )]));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(AnalyticTarget {
        label: format!("janowski({a_coef},{b_coef})"),
        center: one,
        constraint_note: "-1 <= B < A <= 1".into(),
        eval: Arc::new(move |z| (one + a_coef * z) / (one + b_coef * z)),
        d1: Arc::new(move |z| {
            let d = one + b_coef * z;
            (a_coef - b_coef) / (d * d)
        }),
        d2: Arc::new(move |z| {
            let d = one + b_coef * z;
            -2.0 * b_coef * (a_coef - b_coef) / (d * d * d)
        }),
    })
}

/// h(z) = e^{μz} with |μ| ≤ 1.
pub fn make_exp(mu: Complex64) -> Result<AnalyticTarget> {
    if mu.norm() > 1.0 {
        return Err(Error::Validation(vec![format!(
            "exp target needs |mu| <= 1, got |mu| = {}",
            mu.norm()
        )]));
    }
    Ok(AnalyticTarget {
        label: format!("exp({mu})"),
        center: Complex64::new(1.0, 0.0),
        constraint_note: "|mu| <= 1".into(),
        eval: Arc::new(move |z| (mu * z).exp()),
        d1: Arc::new(move |z| mu * (mu * z).exp()),
        d2: Arc::new(move |z| mu * mu * (mu * z).exp()),
    })
}

/// h(z) = √(1+κz) (principal branch) with κ ∈ [0, 1].
pub fn make_sqrt(kappa: f64) -> Result<AnalyticTarget> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Validation(vec![format!(
            "sqrt target needs kappa in [0,1], got {kappa}"
        )]));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(AnalyticTarget {
        label: format!("sqrt({kappa})"),
        center: one,
        constraint_note: "kappa in [0,1]".into(),
        eval: Arc::new(move |z| principal_sqrt(one + kappa * z)),
        d1: Arc::new(move |z| {
            let s = principal_sqrt(one + kappa * z);
            0.5 * kappa / s
        }),
        d2: Arc::new(move |z| {
            let b = one + kappa * z;
            -0.25 * kappa * kappa / (b * principal_sqrt(b))
        }),
    })
}

/// Sector target h(z) = ((1+cz)/(1−z))^{ρ'} with ρ = (ρ₁−ρ₂)/(ρ₁+ρ₂),
/// ρ' = (ρ₁+ρ₂)/2, c = e^{iρπ}, anchored so h(0) = 1.
///
/// Both 1+cz and 1−z stay in the right half-plane on the disk, so the
/// factored principal logs give the analytic continuation from z = 0 in
/// closed form.
pub fn make_sector(rho1: f64, rho2: f64) -> Result<AnalyticTarget> {
    let mut violations = Vec::new();
    if !(rho1 > 0.0 && rho1 <= 1.0) {
        violations.push(format!("sector needs 0 < rho1 <= 1, got {rho1}"));
    }
    if !(rho2 > 0.0 && rho2 <= 1.0) {
        violations.push(format!("sector needs 0 < rho2 <= 1, got {rho2}"));
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let rho = (rho1 - rho2) / (rho1 + rho2);
    let rho_p = 0.5 * (rho1 + rho2);
    let c = Complex64::from_polar(1.0, rho * PI);
    let one = Complex64::new(1.0, 0.0);
    let log_base = move |z: Complex64| (one + c * z).ln() - (one - z).ln();
    let dlog = move |z: Complex64| c / (one + c * z) + one / (one - z);
    Ok(AnalyticTarget {
        label: format!("sector({rho1},{rho2})"),
        center: one,
        constraint_note: "0 < rho1, rho2 <= 1".into(),
        eval: Arc::new(move |z| (rho_p * log_base(z)).exp()),
        d1: Arc::new(move |z| (rho_p * log_base(z)).exp() * rho_p * dlog(z)),
        d2: Arc::new(move |z| {
            let h = (rho_p * log_base(z)).exp();
            let g = dlog(z);
            let gp = one / ((one - z) * (one - z)) - c * c / ((one + c * z) * (one + c * z));
            h * (rho_p * rho_p * g * g + rho_p * gp)
        }),
    })
}

/// h(z) = (x₀+z)/(x₀−z) with x₀ > 1. `_r0` is reserved.
pub fn make_shifted_halfplane(x0: f64, _r0: f64) -> Result<AnalyticTarget> {
    if !(x0 > 1.0) {
        return Err(Error::Validation(vec![format!(
            "shifted half-plane target needs x0 > 1 (else it vanishes or has a pole in the disk), got {x0}"
        )]));
    }
    let x = Complex64::new(x0, 0.0);
    Ok(AnalyticTarget {
        label: format!("halfplane({x0})"),
        center: Complex64::new(1.0, 0.0),
        constraint_note: "x0 > 1".into(),
        eval: Arc::new(move |z| (x + z) / (x - z)),
        d1: Arc::new(move |z| {
            let d = x - z;
            2.0 * x / (d * d)
        }),
        d2: Arc::new(move |z| {
            let d = x - z;
            4.0 * x / (d * d * d)
        }),
    })
}

/// Which of the two subordination operators a parameter set drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Psi1,
    Psi2,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::Psi1 => write!(f, "psi1"),
            OperatorKind::Psi2 => write!(f, "psi2"),
        }
    }
}

/// Operator parameters (α, β, γ, n) with per-operator admissibility.
#[derive(Debug, Clone, Copy)]
pub struct ParamSet {
    pub operator: OperatorKind,
    pub alpha: f64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub n: u32,
}

impl ParamSet {
    pub fn new(
        operator: OperatorKind,
        alpha: f64,
        beta: Complex64,
        gamma: Complex64,
        n: u32,
    ) -> Result<Self> {
        let p = ParamSet {
            operator,
            alpha,
            beta,
            gamma,
            n,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameter-only admissibility. Violations are all collected.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if !(-1.0..=0.0).contains(&self.alpha) {
            violations.push(format!("alpha = {} outside [-1, 0]", self.alpha));
        }
        if self.beta.norm() == 0.0 {
            violations.push("beta must be nonzero".to_string());
        }
        if self.n < 1 {
            violations.push("n must be a positive integer".to_string());
        }
        if self.operator == OperatorKind::Psi2 && self.gamma.norm() == 0.0 {
            violations.push("psi2 requires gamma != 0".to_string());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }

    /// Admissibility against a target: for ψ₂ the hypothesis
    /// |√(γβ)·h(z)| < π/2 is screened by the maximum over |z| = r_check
    /// (enough by the maximum principle).
    pub fn validate_with_target(&self, target: &AnalyticTarget, r_check: f64) -> Result<()> {
        self.validate()?;
        if self.operator == OperatorKind::Psi2 {
            let s = principal_sqrt(self.gamma * self.beta);
            let n_samples = 720;
            let mut max_mod: f64 = 0.0;
            for k in 0..n_samples {
                let z = Complex64::from_polar(r_check, 2.0 * PI * k as f64 / n_samples as f64);
                max_mod = max_mod.max((s * target.eval(z)).norm());
            }
            if max_mod >= PI / 2.0 {
                return Err(Error::Validation(vec![format!(
                    "psi2 hypothesis violated: max |sqrt(gamma*beta)*h| = {max_mod:.6} >= pi/2 on |z| = {r_check} for target {}",
                    target.label()
                )]));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn janowski_values() {
        let h = make_janowski(1.0, -1.0).unwrap();
        assert_close(h.eval(c(0.5, 0.0)), c(3.0, 0.0), 1e-14);
        assert_close(h.eval(c(0.0, 0.0)), c(1.0, 0.0), 0.0);
        assert_close(h.eval(c(0.0, 1.0)), c(0.0, 1.0), 1e-14);
        assert!(make_janowski(-1.0, 1.0).is_err());
        assert!(make_janowski(0.5, 0.5).is_err());
    }

    #[test]
    fn exp_values() {
        let h = make_exp(c(1.0, 0.0)).unwrap();
        assert_close(h.eval(c(0.0, 0.0)), c(1.0, 0.0), 0.0);
        assert_close(h.eval(c(1.0, 0.0)), c(std::f64::consts::E, 0.0), 1e-14);
        let hm = make_exp(c(-1.0, 0.0)).unwrap();
        assert_close(hm.eval(c(1.0, 0.0)), c(1.0 / std::f64::consts::E, 0.0), 1e-14);
        assert!(make_exp(c(1.2, 0.0)).is_err());
    }

    #[test]
    fn sqrt_values() {
        let h = make_sqrt(1.0).unwrap();
        assert_close(h.eval(c(0.0, 0.0)), c(1.0, 0.0), 0.0);
        assert_close(h.eval(c(-0.99, 0.0)), c(0.1, 0.0), 1e-14);
        let h5 = make_sqrt(0.5).unwrap();
        assert_close(h5.eval(c(1.0, 0.0)), c(1.5f64.sqrt(), 0.0), 1e-14);
        assert!(make_sqrt(-0.1).is_err());
        assert!(make_sqrt(1.1).is_err());
    }

    #[test]
    fn sector_reduces_to_halfplane() {
        let h = make_sector(1.0, 1.0).unwrap();
        for z in [c(0.3, 0.2), c(-0.5, 0.1), c(0.0, -0.7)] {
            let expect = (c(1.0, 0.0) + z) / (c(1.0, 0.0) - z);
            assert_close(h.eval(z), expect, 1e-13);
        }
        assert_close(h.eval(c(0.0, 0.0)), c(1.0, 0.0), 1e-15);
        assert!(make_sector(0.0, 1.0).is_err());
        assert!(make_sector(1.0, 1.5).is_err());
    }

    #[test]
    fn sector_matches_step_continuation_oracle() {
        // continue ((1+cz)/(1-z))^{3/4} along [0, 0.5] by small steps and
        // compare against the factored-log evaluation
        let h = make_sector(1.0, 0.5).unwrap();
        let rho_p = 0.75;
        let c_rot = Complex64::from_polar(1.0, PI / 3.0);
        let one = c(1.0, 0.0);
        let base = |z: Complex64| (one + c_rot * z) / (one - z);
        let steps = 2048;
        let path: Vec<Complex64> = (0..=steps)
            .map(|k| base(c(0.5 * k as f64 / steps as f64, 0.0)))
            .collect();
        let tracked =
            crate::complex::continuous_pow_along_path(&path, rho_p, one).unwrap();
        let oracle = *tracked.last().unwrap();
        assert_close(h.eval(c(0.5, 0.0)), oracle, 1e-10);
        // spot value frozen from high-precision evaluation of the same branch
        assert_close(
            h.eval(c(0.5, 0.0)),
            c(2.009947231489715, 0.513448339451671),
            1e-12,
        );
    }

    #[test]
    fn halfplane_values() {
        let h = make_shifted_halfplane(2.0, 0.0).unwrap();
        assert_close(h.eval(c(0.0, 0.0)), c(1.0, 0.0), 0.0);
        assert_close(h.eval(c(1.0, 0.0)), c(3.0, 0.0), 1e-14);
        assert_close(h.eval(c(-1.0, 0.0)), c(1.0 / 3.0, 0.0), 1e-14);
        assert!(make_shifted_halfplane(1.0, 0.0).is_err());
    }

    #[test]
    fn catalog_passes_self_test() {
        let grid = DiskGrid::uniform(16, 64, 0.995).unwrap();
        for target in [
            make_janowski(1.0, -1.0).unwrap(),
            make_janowski(0.5, -0.25).unwrap(),
            make_exp(c(1.0, 0.0)).unwrap(),
            make_exp(c(0.0, 1.0)).unwrap(),
            make_sqrt(1.0).unwrap(),
            make_sector(1.0, 0.5).unwrap(),
            make_sector(0.3, 0.9).unwrap(),
            make_shifted_halfplane(2.0, 0.0).unwrap(),
        ] {
            target
                .self_test(&grid)
                .unwrap_or_else(|e| panic!("{} failed self-test: {e}", target.label()));
        }
    }

    #[test]
    fn custom_target_rejects_bad_derivatives() {
        let grid = DiskGrid::uniform(8, 32, 0.9).unwrap();
        let r = AnalyticTarget::custom(
            "broken",
            Arc::new(|z| (z * Complex64::new(0.5, 0.0)).exp()),
            Arc::new(|z| z.exp()), // wrong d1
            Arc::new(|z| z.exp()),
            "",
            &grid,
        );
        assert!(r.is_err());
    }

    #[test]
    fn custom_target_rejects_nonconvex() {
        // Koebe-like map z ↦ z/(1−z)² + 2 shifted to be non-vanishing; it is
        // univalent but not convex, so the margin check must reject it
        let grid = DiskGrid::uniform(12, 48, 0.95).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let r = AnalyticTarget::custom(
            "koebe",
            Arc::new(move |z| z / ((one - z) * (one - z)) + 2.0 * one),
            Arc::new(move |z| (one + z) / ((one - z) * (one - z) * (one - z))),
            Arc::new(move |z| {
                let d = one - z;
                (2.0 * z + 4.0 * one) / (d * d * d * d)
            }),
            "",
            &grid,
        );
        assert!(r.is_err());
    }

    #[test]
    fn paramset_validation() {
        assert!(ParamSet::new(OperatorKind::Psi1, 0.0, c(1.0, 0.0), c(0.0, 0.0), 1).is_ok());
        assert!(ParamSet::new(OperatorKind::Psi1, 0.5, c(1.0, 0.0), c(0.0, 0.0), 1).is_err());
        assert!(ParamSet::new(OperatorKind::Psi1, 0.0, c(0.0, 0.0), c(0.0, 0.0), 1).is_err());
        assert!(ParamSet::new(OperatorKind::Psi2, 0.0, c(1.0, 0.0), c(0.0, 0.0), 1).is_err());
        // every violation is listed
        match ParamSet::new(OperatorKind::Psi2, 0.7, c(0.0, 0.0), c(0.0, 0.0), 0) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 4),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn psi2_grid_hypothesis() {
        let target = make_shifted_halfplane(2.0, 0.0).unwrap();
        let ok = ParamSet::new(OperatorKind::Psi2, -2.0 / 3.0, c(1.0, 0.0), c(0.25, 0.0), 1)
            .unwrap();
        assert!(ok.validate_with_target(&target, 0.999).is_ok());
        let too_big =
            ParamSet::new(OperatorKind::Psi2, -2.0 / 3.0, c(1.0, 0.0), c(4.0, 0.0), 1).unwrap();
        assert!(too_big.validate_with_target(&target, 0.999).is_err());
    }

    #[test]
    fn derivative_consistency_on_random_points() {
        let targets = [
            make_janowski(1.0, -1.0).unwrap(),
            make_exp(c(1.0, 0.0)).unwrap(),
            make_sqrt(0.7).unwrap(),
            make_sector(1.0, 0.5).unwrap(),
            make_shifted_halfplane(2.0, 0.0).unwrap(),
        ];
        // low-discrepancy spread of 100 points with |z| <= 0.95
        for target in &targets {
            for k in 0..100 {
                let r = 0.95 * ((k as f64 + 0.5) / 100.0).sqrt();
                let theta = 2.0 * PI * ((k as f64 * 0.618_033_988_749_895) % 1.0);
                let z = Complex64::from_polar(r, theta);
                let nd = num_deriv(|w| Ok(target.eval(w)), z, 1).unwrap();
                let ad = target.d1(z);
                assert!(
                    (nd - ad).norm() < 1e-7 * (1.0 + ad.norm()),
                    "{} at {z}: {nd} vs {ad}",
                    target.label()
                );
            }
        }
    }
}

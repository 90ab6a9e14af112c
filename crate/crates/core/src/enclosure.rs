//! Non-convex spectral enclosure in terms of scalar coefficient bounds.
//!
//! For coefficients with `ε_min ≤ ε ≤ ε_max`, `μ_min ≤ μ ≤ μ_max`,
//! `σ_min ≤ σ ≤ σ_max`, the non-real spectrum lies in the horizontal strip
//! `−σ_max/(2ε_min) ≤ Im ω ≤ −σ_min/(2ε_max)` to the outside of the curve
//! `x² − 3y² + 2(σ_max/ε_min)|y| = λ_min/(ε_max μ_max)`; the remaining
//! spectrum lies on the segment `i[−σ_max/ε_min, 0]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for closed-set membership tests.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-8;

/// Scalar bounds on the material coefficients and the two curl-curl spectral
/// quantities of the cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialBounds {
    pub eps_min: f64,
    pub eps_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub lambda_min: f64,
    pub lambda_e_min: f64,
}

impl MaterialBounds {
    /// Validating constructor.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        eps_min: f64,
        eps_max: f64,
        mu_min: f64,
        mu_max: f64,
        sigma_min: f64,
        sigma_max: f64,
        lambda_min: f64,
        lambda_e_min: f64,
    ) -> Result<Self> {
        let b = Self { eps_min, eps_max, mu_min, mu_max, sigma_min, sigma_max, lambda_min, lambda_e_min };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps_min,
            self.eps_max,
            self.mu_min,
            self.mu_max,
            self.sigma_min,
            self.sigma_max,
            self.lambda_min,
            self.lambda_e_min,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("material bounds must be finite".into()));
        }
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.eps_min > 0.0 && self.mu_min > 0.0) {
            return bad("eps_min and mu_min must be positive");
        }
        if self.sigma_min < 0.0 || self.lambda_min < 0.0 {
            return bad("sigma_min and lambda_min must be nonnegative");
        }
        if self.eps_min > self.eps_max {
            return bad("eps_min must not exceed eps_max");
        }
        if self.mu_min > self.mu_max {
            return bad("mu_min must not exceed mu_max");
        }
        if self.sigma_min > self.sigma_max {
            return bad("sigma_min must not exceed sigma_max");
        }
        if self.lambda_min > self.lambda_e_min {
            return bad("lambda_min must not exceed lambda_e_min");
        }
        Ok(())
    }

    /// Bounds for the conductive slab in a guide whose larger side is `l`:
    /// `ε = μ = 1`, `σ ∈ [0, 1]`, `λ_min = λ_e,min = π²/l²`.
    pub fn conductive_guide(l: f64) -> Result<Self> {
        let lam = std::f64::consts::PI.powi(2) / (l * l);
        Self::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, lam, lam)
    }

    /// `q = σ_max/ε_min`, the depth of the imaginary segment.
    pub fn q(&self) -> f64 {
        self.sigma_max / self.eps_min
    }

    fn gap_sq(&self) -> f64 {
        self.lambda_min / (self.eps_max * self.mu_max)
    }

    fn threshold_scale(&self) -> f64 {
        self.sigma_max * self.sigma_max * self.eps_max * self.mu_max / (self.eps_min * self.eps_min)
    }
}

/// Which of the successively stronger non-accumulation statements apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdCase {
    /// `λ_min = 0`: no spectral gap is guaranteed.
    BelowI,
    /// `0 < λ_min ≤ σ_max² ε_max μ_max / (4 ε_min²)`.
    CaseI,
    /// Between the quarter and third thresholds.
    CaseIi,
    /// Above the third threshold: the curve detaches from the imaginary axis.
    CaseIii,
}

impl ThresholdCase {
    pub fn label(self) -> &'static str {
        match self {
            Self::BelowI => "below_i",
            Self::CaseI => "case_i",
            Self::CaseIi => "case_ii",
            Self::CaseIii => "case_iii",
        }
    }
}

/// Membership in the enclosure, with closed sets fattened by `boundary_tol`.
pub fn enclosure_contains(omega: Complex64, b: &MaterialBounds, boundary_tol: f64) -> bool {
    let q = b.q();
    let (x, y) = (omega.re, omega.im);
    if x.abs() <= boundary_tol && y <= boundary_tol && y >= -q - boundary_tol {
        return true;
    }
    if x == 0.0 {
        return false;
    }
    let y_lo = -0.5 * q;
    let y_hi = -0.5 * b.sigma_min / b.eps_max;
    if y < y_lo - boundary_tol || y > y_hi + boundary_tol {
        return false;
    }
    x * x - 3.0 * y * y + 2.0 * q * y.abs() >= b.gap_sq() - boundary_tol
}

/// Radius of the real interval around 0 that is free of spectrum.
pub fn spectral_free_gap(b: &MaterialBounds) -> f64 {
    b.gap_sq().max(0.0).sqrt()
}

pub fn threshold_case(b: &MaterialBounds) -> ThresholdCase {
    let s = b.threshold_scale();
    if b.lambda_min > s / 3.0 {
        ThresholdCase::CaseIii
    } else if b.lambda_min > s / 4.0 {
        ThresholdCase::CaseIi
    } else if b.lambda_min > 0.0 {
        ThresholdCase::CaseI
    } else {
        ThresholdCase::BelowI
    }
}

/// Enclosure for constant coefficients `ε = ε_∞`, `σ = σ_∞`: the segment
/// `i[−σ_∞/ε_∞, 0]` and the line `Im ω = −σ_∞/(2ε_∞)` outside the gap.
pub fn enclosure_constant(
    omega: Complex64,
    eps_inf: f64,
    sigma_inf: f64,
    mu_max: f64,
    lambda_min: f64,
    boundary_tol: f64,
) -> bool {
    let q = sigma_inf / eps_inf;
    let (x, y) = (omega.re, omega.im);
    if x.abs() <= boundary_tol && y <= boundary_tol && y >= -q - boundary_tol {
        return true;
    }
    if x == 0.0 {
        return false;
    }
    (y + 0.5 * q).abs() <= boundary_tol && x * x + 0.25 * q * q >= lambda_min / (eps_inf * mu_max) - boundary_tol
}

/// One sample of the enclosure boundary curve; `branch` is the sign of `Re`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub point: Complex64,
    pub branch: i8,
}

/// Samples of `x(y) = √(λ_min/(ε_max μ_max) + 3y² − 2q|y|)` for `y` in
/// `im_range` intersected with the strip; samples with a negative radicand
/// are omitted. Output is ordered by `y`, `+x` before `−x`.
pub fn enclosure_boundary_samples(
    b: &MaterialBounds,
    im_range: (f64, f64),
    n_samples: usize,
) -> Result<Vec<BoundarySample>> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("n_samples must be at least 2, got {n_samples}")));
    }
    let q = b.q();
    let lo = im_range.0.min(im_range.1).max(-0.5 * q);
    let hi = im_range.0.max(im_range.1).min(-0.5 * b.sigma_min / b.eps_max);
    if !(lo <= hi) {
        return Err(Error::EmptyRange(format!(
            "imaginary range [{}, {}] misses the strip [{}, {}]",
            im_range.0,
            im_range.1,
            -0.5 * q,
            -0.5 * b.sigma_min / b.eps_max
        )));
    }
    let mut out = Vec::with_capacity(2 * n_samples);
    for i in 0..n_samples {
        let y = lo + (hi - lo) * i as f64 / (n_samples - 1) as f64;
        let rad = b.gap_sq() + 3.0 * y * y - 2.0 * q * y.abs();
        if rad < 0.0 {
            continue;
        }
        let x = rad.sqrt();
        out.push(BoundarySample { point: Complex64::new(x, y), branch: 1 });
        out.push(BoundarySample { point: Complex64::new(-x, y), branch: -1 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn example() -> MaterialBounds {
        MaterialBounds::conductive_guide(2.0).unwrap()
    }

    fn fig2(lambda_min: f64) -> MaterialBounds {
        MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, 2.0, lambda_min, lambda_min.max(2.0)).unwrap()
    }

    #[test]
    fn contains_examples() {
        let b = example();
        assert!(enclosure_contains(Complex64::new(0.0, -0.25), &b, 1e-8));
        assert!(!enclosure_contains(Complex64::new(1.0, -0.25), &b, 1e-8));
        assert!(enclosure_contains(Complex64::new(2.0, -0.25), &b, 1e-8));
        assert!(!enclosure_contains(Complex64::new(2.0, -0.6), &b, 1e-8));
        assert!(!enclosure_contains(Complex64::new(0.0, -1.1), &b, 1e-8));
        assert!(enclosure_contains(Complex64::new(0.0, -1.0), &b, 1e-8));
    }

    #[test]
    fn gap_examples() {
        assert!((spectral_free_gap(&example()) - PI / 2.0).abs() < 1e-15);
        let b = MaterialBounds::new(1.0, 4.0, 1.0, 1.0, 0.0, 1.0, 16.0, 16.0).unwrap();
        assert_eq!(spectral_free_gap(&b), 2.0);
        let b = MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(spectral_free_gap(&b), 0.0);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_case(&fig2(0.5)), ThresholdCase::CaseI);
        assert_eq!(threshold_case(&fig2(1.2)), ThresholdCase::CaseIi);
        assert_eq!(threshold_case(&fig2(2.0)), ThresholdCase::CaseIii);
        assert_eq!(threshold_case(&fig2(0.0)), ThresholdCase::BelowI);
        // boundaries belong to the weaker case
        assert_eq!(threshold_case(&fig2(1.0)), ThresholdCase::CaseI);
        assert_eq!(threshold_case(&fig2(4.0 / 3.0)), ThresholdCase::CaseIi);
    }

    #[test]
    fn serialized_names_match_labels() {
        for c in [ThresholdCase::BelowI, ThresholdCase::CaseI, ThresholdCase::CaseIi, ThresholdCase::CaseIii] {
            assert_eq!(serde_json::to_value(c).unwrap(), c.label());
        }
    }

    #[test]
    fn constant_examples() {
        let z = Complex64::new(1.0, -0.5);
        assert!(enclosure_constant(z, 1.0, 1.0, 1.0, 0.0, 1e-8));
        assert!(!enclosure_constant(z, 1.0, 1.0, 1.0, 2.0, 1e-8));
        assert!(!enclosure_constant(Complex64::new(1.0, -0.3), 1.0, 1.0, 1.0, 0.0, 1e-8));
    }

    #[test]
    fn rejects_inconsistent_bounds() {
        assert!(MaterialBounds::new(2.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 2.0, 1.0).is_err());
        assert!(MaterialBounds::new(0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn boundary_samples() {
        let b = example();
        let s = enclosure_boundary_samples(&b, (-0.5, 0.0), 11).unwrap();
        let top = s.iter().find(|p| p.point.im == 0.0 && p.branch == 1).unwrap();
        assert!((top.point.re - PI / 2.0).abs() < 1e-15);
        for pair in s.chunks(2) {
            assert_eq!(pair[0].point.re, -pair[1].point.re);
            assert_eq!(pair[0].branch, -pair[1].branch);
        }
        // case iii: radicand negative at the strip's lower end
        let b3 = fig2(0.05);
        let s3 = enclosure_boundary_samples(&b3, (-1.0, 0.0), 101).unwrap();
        assert!(s3.len() < 202);
        assert!(enclosure_boundary_samples(&b, (1.0, 2.0), 5).is_err());
        assert!(enclosure_boundary_samples(&b, (-1.0, 0.0), 1).is_err());
    }

    #[test]
    fn case_iii_curve_detaches() {
        let b = fig2(2.0);
        let s = enclosure_boundary_samples(&b, (-1.0, 0.0), 401).unwrap();
        assert_eq!(s.len(), 802);
        assert!(s.iter().all(|p| p.point.re.abs() > 0.1));
    }

    #[test]
    fn matches_constant_version_for_equal_bounds() {
        let b = MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0).unwrap();
        for i in 0..200 {
            for j in 0..200 {
                let z = Complex64::new(-3.0 + 6.0 * i as f64 / 199.0, -1.2 + 1.4 * j as f64 / 199.0);
                assert_eq!(
                    enclosure_contains(z, &b, 1e-8),
                    enclosure_constant(z, 1.0, 1.0, 1.0, 2.0, 1e-8),
                    "{z}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn monotone_in_sigma_and_lambda(
            x in -5.0..5.0f64, y in -2.0..0.5f64,
            smax in 0.1..2.0f64, extra in 0.0..1.0f64,
            lam in 0.0..5.0f64, shrink in 0.0..1.0f64,
        ) {
            let z = Complex64::new(x, y);
            let b = MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, smax, lam, lam).unwrap();
            let wider = MaterialBounds { sigma_max: smax + extra, lambda_min: lam * shrink, ..b };
            if enclosure_contains(z, &b, 1e-8) {
                prop_assert!(enclosure_contains(z, &wider, 1e-8));
            }
        }

        #[test]
        fn case_iii_points_stay_off_axis(x in -5.0..5.0f64, y in -1.5..0.5f64, lam in 1.34..6.0f64) {
            let b = fig2(lam);
            prop_assume!(threshold_case(&b) == ThresholdCase::CaseIii && x.abs() > 1e-6);
            let z = Complex64::new(x, y);
            if enclosure_contains(z, &b, 1e-8) {
                prop_assert!(x * x >= lam + 3.0 * y * y - 4.0 * y.abs() - 1e-8);
                prop_assert!(lam + 3.0 * y * y - 4.0 * y.abs() > 0.0);
            }
        }
    }
}

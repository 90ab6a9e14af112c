//! Special functions and per-mode dispersion relations.
//!
//! Every dispersion relation is built from `g(s) = √s · coth √s`, which is
//! even in `√s` and therefore meromorphic in `s` with simple poles at
//! `s = -k²π²`, `k ≥ 1`. Working with `s` rather than `√s` removes the square
//! root branch cut from the slab term entirely.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// A point in the spectral plane (dimensionless angular frequency).
pub type ComplexPoint = Complex64;

/// Below this `|s|` the Taylor series of `g` is used.
pub const SERIES_SWITCH: f64 = 0.25;

/// Radius around each pole `-k²π²` (in the `s`-plane) inside which
/// evaluation is refused.
pub const POLE_EXCLUSION: f64 = 1e-8;

/// Taylor coefficients of `z coth z` in powers of `s = z²`:
/// `2^{2n} B_{2n} / (2n)!`.
const ZCOTHZ_SERIES: [f64; 12] = [
    1.0,
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638_512_875.0,
    4.0 / 18_243_225.0,
    -3617.0 / 162_820_783_125.0,
    87734.0 / 38_979_295_480_125.0,
    -349_222.0 / 1_531_329_465_290_625.0,
    310_732.0 / 13_447_856_940_643_125.0,
];

/// Transverse eigenvalue `π²n2²/L2² + π²n3²/L3²` of a rectangular
/// cross-section.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct ModeConstant(f64);

impl ModeConstant {
    pub fn new(c: f64) -> Result<Self> {
        ensure_positive(c, "mode constant c")?;
        Ok(Self(c))
    }

    pub fn from_indices(n2: u32, n3: u32, l2: f64, l3: f64) -> Result<Self> {
        ensure_positive(l2, "L2")?;
        ensure_positive(l3, "L3")?;
        let a = f64::from(n2) / l2;
        let b = f64::from(n3) / l3;
        Self::new(PI * PI * (a * a + b * b))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Square root with `Re w ≥ 0`; on the cut (`Re w = 0`) the root with
/// `Im w ≥ 0` is returned.
pub fn sqrt_nonneg_re(z: ComplexPoint) -> ComplexPoint {
    let w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        -w
    } else {
        w
    }
}

/// `e^z - 1` without cancellation for small `z`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let (sin_y, cos_y) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * cos_y - 2.0 * half * half,
        z.re.exp() * sin_y,
    )
}

fn check_poles(s: ComplexPoint) -> Result<()> {
    if s.re >= 0.0 {
        return Ok(());
    }
    let k0 = ((-s.re).sqrt() / PI).round().max(1.0) as u64;
    for k in k0.saturating_sub(1).max(1)..=k0 + 1 {
        let pole = -((k * k) as f64) * PI * PI;
        if (s - pole).norm() < POLE_EXCLUSION {
            return Err(Error::PoleProximity { s, k });
        }
    }
    Ok(())
}

fn zcothz_series(s: ComplexPoint) -> ComplexPoint {
    ZCOTHZ_SERIES
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * s + a)
}

fn zcothz_direct(s: ComplexPoint) -> ComplexPoint {
    // Re w ≥ 0 keeps |e^{-2w}| ≤ 1.
    let w = sqrt_nonneg_re(s);
    let e = (-2.0 * w).exp();
    let denom = -expm1(-2.0 * w);
    w * (1.0 + e) / denom
}

/// `g(s) = √s coth √s`, the analytic continuation of `z coth z` with `z² = s`.
pub fn zcothz_of_square(s: ComplexPoint) -> Result<ComplexPoint> {
    ensure_finite(s, "s")?;
    if s.norm() < SERIES_SWITCH {
        return Ok(zcothz_series(s));
    }
    check_poles(s)?;
    Ok(zcothz_direct(s))
}

/// `√s · coth(√s · len) = g(s·len²) / len`.
pub fn scaled_coth_of_square(s: ComplexPoint, len: f64) -> Result<ComplexPoint> {
    ensure_positive(len, "len")?;
    Ok(zcothz_of_square(s * (len * len))? / len)
}

/// `α² = c − ω(ω + i)`, the slab exponent of the conductive guide.
pub fn alpha_sq(omega: ComplexPoint, c: ModeConstant) -> ComplexPoint {
    c.0 - omega * (omega + Complex64::i())
}

/// `β² = c − ω²`, the exponent in the empty part of the guide.
pub fn beta_sq(omega: ComplexPoint, c: ModeConstant) -> ComplexPoint {
    c.0 - omega * omega
}

/// `α̃² = c − (1 + δ)ω²`, the slab exponent of the permittivity guide.
pub fn alpha_tilde_sq(omega: ComplexPoint, c: ModeConstant, delta: f64) -> ComplexPoint {
    c.0 - (1.0 + delta) * omega * omega
}

fn truncation_len(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation length X must exceed 1 (slab occupies (0,1)), got {x}"
        )));
    }
    Ok(x - 1.0)
}

/// Truncated-guide relation `α coth α + β coth(β(X−1))`, meromorphic in ω.
pub fn dispersion_truncated(omega: ComplexPoint, c: ModeConstant, x: f64) -> Result<ComplexPoint> {
    let len = truncation_len(x)?;
    ensure_finite(omega, "omega")?;
    Ok(zcothz_of_square(alpha_sq(omega, c))? + scaled_coth_of_square(beta_sq(omega, c), len)?)
}

/// Half-infinite relation `α coth α + sign·β` with `Re β ≥ 0`.
pub fn dispersion_true(omega: ComplexPoint, c: ModeConstant, sign: i8) -> Result<ComplexPoint> {
    ensure_finite(omega, "omega")?;
    let s = f64::from(sign.signum());
    Ok(zcothz_of_square(alpha_sq(omega, c))? + s * sqrt_nonneg_re(beta_sq(omega, c)))
}

/// Branch-free `(α coth α)² − β²`; its zeros are those of both sign branches.
pub fn dispersion_true_sq(omega: ComplexPoint, c: ModeConstant) -> Result<ComplexPoint> {
    ensure_finite(omega, "omega")?;
    let g = zcothz_of_square(alpha_sq(omega, c))?;
    Ok(g * g - beta_sq(omega, c))
}

/// Permittivity guide, branch-free: `(α̃ coth α̃)² − β²`.
pub fn dispersion_selfadjoint_sq(omega: ComplexPoint, c: ModeConstant, delta: f64) -> Result<ComplexPoint> {
    ensure_finite(omega, "omega")?;
    ensure_positive(delta, "delta")?;
    let g = zcothz_of_square(alpha_tilde_sq(omega, c, delta))?;
    Ok(g * g - beta_sq(omega, c))
}

/// Permittivity guide, one sign branch: `α̃ coth α̃ + sign·β`.
pub fn dispersion_selfadjoint(omega: ComplexPoint, c: ModeConstant, delta: f64, sign: i8) -> Result<ComplexPoint> {
    ensure_finite(omega, "omega")?;
    ensure_positive(delta, "delta")?;
    let s = f64::from(sign.signum());
    Ok(zcothz_of_square(alpha_tilde_sq(omega, c, delta))? + s * sqrt_nonneg_re(beta_sq(omega, c)))
}

/// Truncated permittivity guide: `α̃ coth α̃ + β coth(β(X−1))`.
pub fn dispersion_selfadjoint_truncated(
    omega: ComplexPoint,
    c: ModeConstant,
    delta: f64,
    x: f64,
) -> Result<ComplexPoint> {
    let len = truncation_len(x)?;
    ensure_finite(omega, "omega")?;
    ensure_positive(delta, "delta")?;
    Ok(zcothz_of_square(alpha_tilde_sq(omega, c, delta))?
        + scaled_coth_of_square(beta_sq(omega, c), len)?)
}

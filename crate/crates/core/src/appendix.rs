//! Numerical counterparts of the three explicit computations behind the
//! essential spectrum of the scalar divergence-form pencil and of the
//! limiting Maxwell operator:
//!
//! * the diagonal Dirichlet-to-Neumann combination at `ω = −iν`,
//! * the decay of the Weyl singular sequence at `ω = −i/2`,
//! * the determinant of the Fourier symbol of the Maxwell block operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{ensure_positive, Error, Result};

/// One diagonal entry `κ((1−ν)coth κ − ν)` of the combined DtN map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtNEntry {
    pub kappa: f64,
    pub value: f64,
}

/// `κ((1−ν)coth κ − ν)` for a single transverse frequency.
pub fn dtn_value(nu: f64, kappa: f64) -> f64 {
    kappa * ((1.0 - nu) * coth_minus_one(kappa) + (1.0 - 2.0 * nu))
}

/// Transverse Dirichlet frequencies `κ = π√(n2²/L2² + n3²/L3²)`, `n2, n3 ≥ 1`,
/// the `n_modes` smallest in increasing order (ties by index).
pub fn transverse_frequencies(l2: f64, l3: f64, n_modes: usize) -> Result<Vec<f64>> {
    ensure_positive(l2, "L2")?;
    ensure_positive(l3, "L3")?;
    let n = n_modes as u64;
    let mut all: Vec<(f64, u64, u64)> = (1..=n)
        .flat_map(|n2| (1..=n).map(move |n3| (n2, n3)))
        .map(|(n2, n3)| {
            let c = (n2 as f64 / l2).powi(2) + (n3 as f64 / l3).powi(2);
            (PI * c.sqrt(), n2, n3)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    Ok(all.into_iter().take(n_modes).map(|t| t.0).collect())
}

/// Diagonal entries of `(−iω+1)Λ_L − iωΛ_R` at `ω = −iν` for the first
/// `n_modes` transverse modes, sorted by `κ`.
pub fn dtn_entries(nu: f64, l2: f64, l3: f64, n_modes: usize) -> Result<Vec<DtNEntry>> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter(format!("nu must lie in (0, 1), got {nu}")));
    }
    Ok(transverse_frequencies(l2, l3, n_modes)?
        .into_iter()
        .map(|kappa| DtNEntry { kappa, value: dtn_value(nu, kappa) })
        .collect())
}

/// Shape of the sign sequence of DtN entries along increasing `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    AllPositive,
    /// Every entry is negative: a bounded inverse with no kernel, but of
    /// the wrong sign for a positive inverse.
    AllNegative,
    /// Positive for small `κ`, negative from some index on.
    OneSignChange,
    Other,
}

/// Classify the signs of `entries` (assumed sorted by `κ`). Zero entries and
/// an empty list fall into [`SignPattern::Other`].
pub fn dtn_sign_pattern(entries: &[DtNEntry]) -> SignPattern {
    if entries.is_empty() || entries.iter().any(|e| e.value == 0.0 || e.value.is_nan()) {
        return SignPattern::Other;
    }
    let positive: Vec<bool> = entries.iter().map(|e| e.value > 0.0).collect();
    let changes = positive.windows(2).filter(|w| w[0] != w[1]).count();
    match (changes, positive[0]) {
        (0, true) => SignPattern::AllPositive,
        (0, false) => SignPattern::AllNegative,
        (1, true) => SignPattern::OneSignChange,
        _ => SignPattern::Other,
    }
}

// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point
// Gauss rule at the odd positions.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 2000;

/// Kronrod estimate and |Kronrod − Gauss| on `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let s = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]` to
/// relative accuracy `rel_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    loop {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureFailure { estimate: total });
        }
        if err <= rel_tol * total.abs() || err <= f64::MIN_POSITIVE {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure { estimate: total });
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].2 .1.total_cmp(&parts[j].2 .1)).unwrap_or(0);
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
}

/// `coth κ − 1`, without cancellation for large `κ`.
pub fn coth_minus_one(kappa: f64) -> f64 {
    let e = (-2.0 * kappa).exp();
    2.0 * e / (1.0 - e)
}

/// `‖Δu‖_{L²}` of the Weyl sequence element with transverse frequency `κ`
/// (transverse factor normalised): `2κ²(coth κ − 1)·‖cosh(κx)/sinh κ‖_{L²(0,1)}`.
pub fn weyl_laplacian_norm(kappa: f64) -> Result<f64> {
    ensure_positive(kappa, "kappa")?;
    let e = (-2.0 * kappa).exp();
    let profile = |x: f64| {
        let r = ((kappa * (x - 1.0)).exp() + (-kappa * (x + 1.0)).exp()) / (1.0 - e);
        r * r
    };
    let i = integrate(profile, 0.0, 1.0, 1e-10)?;
    Ok(2.0 * kappa * kappa * coth_minus_one(kappa) * i.sqrt())
}

/// The Weyl ratio `R(κ) = (1/κ₁)·‖Δu‖_{L²} / ‖∇u‖_{L²((1,∞)×…)}`.
///
/// On the exterior piece `u = e^{−κ(x₁−1)}ψ`, so `‖∇u‖²` there is exactly
/// `κ` (half from `∂₁`, half from the transverse gradient).
pub fn weyl_decay_ratio(kappa: f64, kappa1: f64) -> Result<f64> {
    ensure_positive(kappa1, "kappa1")?;
    Ok(weyl_laplacian_norm(kappa)? / (kappa1 * kappa.sqrt()))
}

/// The order bound `κ^{3/2}(coth κ − 1)`.
pub fn weyl_order(kappa: f64) -> f64 {
    kappa.powf(1.5) * coth_minus_one(kappa)
}

/// The 6×6 Fourier symbol of `[[−iω, curl], [curl, iω]]` acting on the
/// sine/cosine expansion with wavenumbers `(ξ, πn2/L2, πn3/L3)`.
///
/// The off-diagonal blocks are `K` and `Kᵀ = −K` with
/// `K = [[0, b, −a], [−b, 0, −ξ], [a, ξ, 0]]`, `a = πn2/L2`, `b = πn3/L3`.
pub fn fourier_symbol(omega: Complex64, xi: f64, n2: u32, n3: u32, l2: f64, l3: f64) -> [[Complex64; 6]; 6] {
    let a = PI * f64::from(n2) / l2;
    let b = PI * f64::from(n3) / l3;
    let k = [[0.0, b, -a], [-b, 0.0, -xi], [a, xi, 0.0]];
    let i = Complex64::i();
    let mut m = [[Complex64::new(0.0, 0.0); 6]; 6];
    for r in 0..3 {
        m[r][r] = -i * omega;
        m[r + 3][r + 3] = i * omega;
        for c in 0..3 {
            m[r][c + 3] = k[r][c].into();
            m[r + 3][c] = k[c][r].into();
        }
    }
    m
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<const N: usize>(mut m: [[Complex64; N]; N]) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..N {
        let p = (col..N).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap_or(col);
        if m[p][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col];
        det *= pivot;
        for r in col + 1..N {
            let factor = m[r][col] / pivot;
            let pivot_row = m[col];
            for (x, p) in m[r].iter_mut().zip(pivot_row).skip(col) {
                *x -= factor * p;
            }
        }
    }
    det
}

/// `(numeric, closed_form)`: the eliminated determinant of [`fourier_symbol`]
/// and `ω²(ξ² + (πn2/L2)² + (πn3/L3)² − ω²)²`.
pub fn fourier_symbol_det(omega: Complex64, xi: f64, n2: u32, n3: u32, l2: f64, l3: f64) -> (Complex64, Complex64) {
    let numeric = determinant(fourier_symbol(omega, xi, n2, n3, l2, l3));
    let c = (PI * f64::from(n2) / l2).powi(2) + (PI * f64::from(n3) / l3).powi(2);
    let w2 = omega * omega;
    let f = xi * xi + c - w2;
    (numeric, w2 * f * f)
}

/// Outcome of one appendix check, serialised as
/// `{check, parameters, pass, detail}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub parameters: serde_json::Value,
    pub pass: bool,
    pub detail: serde_json::Value,
}

/// Input sample for [`fourier_det_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSample {
    pub omega: Complex64,
    pub xi: f64,
    pub n2: u32,
    pub n3: u32,
}

/// Relative discrepancy `|numeric − closed| / (1 + |closed|)`.
pub fn fourier_det_error(s: &SymbolSample, l2: f64, l3: f64) -> f64 {
    let (num, closed) = fourier_symbol_det(s.omega, s.xi, s.n2, s.n3, l2, l3);
    (num - closed).norm() / (1.0 + closed.norm())
}

/// Determinant identity over the supplied samples; passes when every
/// relative discrepancy is below `tol`.
pub fn fourier_det_check(samples: &[SymbolSample], l2: f64, l3: f64, tol: f64) -> CheckReport {
    let worst = samples.iter().map(|s| fourier_det_error(s, l2, l3)).fold(0.0, f64::max);
    CheckReport {
        check: "fourier_symbol_determinant".into(),
        parameters: json!({ "samples": samples.len(), "L2": l2, "L3": l3, "tol": tol }),
        pass: !samples.is_empty() && worst < tol,
        detail: json!({ "max_relative_error": worst }),
    }
}

/// Expected DtN behaviour: all entries positive below `ν = 1/2`; above it,
/// at most finitely many (leading) non-negative entries, i.e. the pattern
/// is [`SignPattern::AllNegative`] or [`SignPattern::OneSignChange`].
pub fn dtn_check(nus: &[f64], l2: f64, l3: f64, n_modes: usize) -> Result<CheckReport> {
    let mut rows = Vec::with_capacity(nus.len());
    let mut pass = !nus.is_empty();
    for &nu in nus {
        let pattern = dtn_sign_pattern(&dtn_entries(nu, l2, l3, n_modes)?);
        let ok = if nu < 0.5 {
            pattern == SignPattern::AllPositive
        } else {
            matches!(pattern, SignPattern::AllNegative | SignPattern::OneSignChange)
        };
        pass &= ok;
        rows.push(json!({ "nu": nu, "pattern": pattern, "ok": ok }));
    }
    Ok(CheckReport {
        check: "dtn_sign_pattern".into(),
        parameters: json!({ "nu": nus, "L2": l2, "L3": l3, "n_modes": n_modes }),
        pass,
        detail: json!({ "patterns": rows }),
    })
}

/// Summary of the Weyl-ratio fit used by [`weyl_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylFit {
    /// `max R(κ)/(κ^{3/2}(coth κ − 1))` over the fitting grid.
    pub constant: f64,
    /// Worst `R/(C·order)` over the verification grid; `≤ 1` when the bound holds.
    pub worst_bound_ratio: f64,
    pub decreasing: bool,
    pub ratio_at_ends: (f64, f64),
}

/// Fit `C` on `fit_grid`, then check `R(κ) ≤ C·κ^{3/2}(coth κ − 1)` and
/// monotone decrease on `verify_grid` (sorted ascending).
pub fn weyl_fit(fit_grid: &[f64], verify_grid: &[f64], kappa1: f64) -> Result<WeylFit> {
    if fit_grid.is_empty() || verify_grid.is_empty() {
        return Err(Error::EmptyRange("Weyl fit needs non-empty grids".into()));
    }
    let mut constant = 0.0_f64;
    for &k in fit_grid {
        constant = constant.max(weyl_decay_ratio(k, kappa1)? / weyl_order(k));
    }
    let values = verify_grid.iter().map(|&k| weyl_decay_ratio(k, kappa1)).collect::<Result<Vec<_>>>()?;
    let worst_bound_ratio = verify_grid
        .iter()
        .zip(&values)
        .map(|(&k, &r)| r / (constant * weyl_order(k)))
        .fold(0.0, f64::max);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let ratio_at_ends = (values[0], values[values.len() - 1]);
    Ok(WeylFit { constant, worst_bound_ratio, decreasing, ratio_at_ends })
}

/// Weyl decay on `κ ∈ [2, 20]`: fitted on `{2, 4, …, 20}`, verified on a
/// step-0.05 grid, with `R(20) < 1e−8` and `R(20)/R(2) < 1e−12`.
pub fn weyl_check(kappa1: f64) -> Result<CheckReport> {
    let fit: Vec<f64> = (1..=10).map(|k| 2.0 * f64::from(k)).collect();
    let verify: Vec<f64> = (0..=360).map(|k| 2.0 + 0.05 * f64::from(k)).collect();
    let w = weyl_fit(&fit, &verify, kappa1)?;
    let (r2, r20) = w.ratio_at_ends;
    // allow rounding in the last place where the fit and verify grids share points
    let pass = w.worst_bound_ratio <= 1.0 + 1e-12 && w.decreasing && r20 < 1e-8 && r20 / r2 < 1e-12;
    Ok(CheckReport {
        check: "weyl_decay".into(),
        parameters: json!({ "kappa1": kappa1, "kappa_range": [2.0, 20.0] }),
        pass,
        detail: serde_json::to_value(&w).unwrap_or_default(),
    })
}

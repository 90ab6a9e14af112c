//! Spectrum sets with exact endpoints.
//!
//! A [`SpectrumSet`] is a finite union of closed real intervals (possibly
//! unbounded), closed intervals on the imaginary axis and isolated points.
//! Endpoints are [`Surd`]s — `r · π^k · √n` with `r` rational and `n`
//! square-free — so values such as `π/2` compare exactly.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Default membership tolerance.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// The real number `coeff · π^pi_pow · √radicand`, `radicand` square-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Surd {
    coeff: Rational64,
    pi_pow: i32,
    radicand: u64,
}

fn square_free_split(n: u64) -> (u64, u64) {
    // n = outside² · inside with inside square-free
    let (mut outside, mut inside, mut rest) = (1u64, 1u64, n);
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        outside *= p.pow(e / 2);
        if e % 2 == 1 {
            inside *= p;
        }
        p += 1;
    }
    (outside, inside * rest)
}

impl Surd {
    pub const ZERO: Surd = Surd { coeff: Rational64::new_raw(0, 1), pi_pow: 0, radicand: 1 };

    pub fn new(coeff: Rational64, pi_pow: i32, radicand: u64) -> Result<Self> {
        if radicand == 0 {
            return Ok(Self::ZERO);
        }
        let (out, inside) = square_free_split(radicand);
        let coeff = coeff * Rational64::from_integer(out as i64);
        if *coeff.numer() == 0 {
            return Ok(Self::ZERO);
        }
        Ok(Self { coeff, pi_pow, radicand: inside })
    }

    pub fn rational(r: Rational64) -> Self {
        Self::new(r, 0, 1).expect("radicand 1 is valid")
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational64::from_integer(n))
    }

    /// `r · π`.
    pub fn pi_times(r: Rational64) -> Self {
        Self::new(r, 1, 1).expect("radicand 1 is valid")
    }

    /// Best rational approximation of a float with denominators up to `1e6`;
    /// fails for values that are not (close to) a short fraction.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let r = Rational64::approximate_float(x)?;
        if *r.denom() > 1_000_000 || (r.numer().abs() as f64) > 1e15 {
            return None;
        }
        let back = *r.numer() as f64 / *r.denom() as f64;
        ((back - x).abs() <= 1e-15 * x.abs().max(1.0)).then(|| Self::rational(r))
    }

    pub fn coeff(&self) -> Rational64 {
        self.coeff
    }
    pub fn pi_pow(&self) -> i32 {
        self.pi_pow
    }
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn value(&self) -> f64 {
        let c = *self.coeff.numer() as f64 / *self.coeff.denom() as f64;
        c * PI.powi(self.pi_pow) * (self.radicand as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        *self.coeff.numer() == 0
    }

    pub fn checked_div(self, other: Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::InvalidParameter("division of surds by zero".into()));
        }
        // 1/(c π^k √n) = (1/(c n)) π^{-k} √n
        let inv = Self {
            coeff: other.coeff.recip() / Rational64::from_integer(other.radicand as i64),
            pi_pow: -other.pi_pow,
            radicand: other.radicand,
        };
        Ok(self * inv)
    }

    /// Exact square root, available when the radicand is 1, the π-power even
    /// and the coefficient nonnegative.
    pub fn sqrt(self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::ZERO);
        }
        if self.radicand != 1 || self.pi_pow % 2 != 0 || self.coeff < Rational64::from_integer(0) {
            return None;
        }
        // √(p/q) = √(p q) / q
        let (p, q) = (*self.coeff.numer(), *self.coeff.denom());
        let pq = u64::try_from(p).ok()?.checked_mul(u64::try_from(q).ok()?)?;
        Self::new(Rational64::new(1, q), self.pi_pow / 2, pq).ok()
    }
}

impl Neg for Surd {
    type Output = Self;

    fn neg(self) -> Self {
        Self { coeff: -self.coeff, ..self }
    }
}

impl Mul for Surd {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        let g = self.radicand.gcd(&other.radicand);
        let coeff = self.coeff * other.coeff * Rational64::from_integer(g as i64);
        let radicand = (self.radicand / g) * (other.radicand / g);
        Self { coeff, pi_pow: self.pi_pow + other.pi_pow, radicand }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            return Some(Ordering::Equal);
        }
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (n, d) = (*self.coeff.numer(), *self.coeff.denom());
        let mut factors = Vec::new();
        match self.pi_pow {
            0 => {}
            1 => factors.push("pi".to_string()),
            k if k > 0 => factors.push(format!("pi^{k}")),
            _ => {}
        }
        if self.radicand != 1 {
            factors.push(format!("sqrt({})", self.radicand));
        }
        let sign = if n < 0 { "-" } else { "" };
        let num = if factors.is_empty() {
            n.abs().to_string()
        } else if n.abs() == 1 {
            factors.join("*")
        } else {
            format!("{}*{}", n.abs(), factors.join("*"))
        };
        let mut den = if d == 1 { String::new() } else { d.to_string() };
        if self.pi_pow < 0 {
            let p = if self.pi_pow == -1 { "pi".to_string() } else { format!("pi^{}", -self.pi_pow) };
            den = if den.is_empty() { p } else { format!("{den}*{p}") };
        }
        if den.is_empty() {
            write!(f, "{sign}{num}")
        } else {
            write!(f, "{sign}{num}/{den}")
        }
    }
}

/// Interval endpoint: an exact surd, an inexact float, or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    NegInf,
    Exact(Surd),
    Float(f64),
    PosInf,
}

impl Endpoint {
    pub fn value(&self) -> f64 {
        match self {
            Self::NegInf => f64::NEG_INFINITY,
            Self::PosInf => f64::INFINITY,
            Self::Exact(s) => s.value(),
            Self::Float(x) => *x,
        }
    }


    /// Prefer an exact representation for floats that are short fractions.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Self::PosInf
        } else if x == f64::NEG_INFINITY {
            Self::NegInf
        } else {
            Surd::from_f64(x).map_or(Self::Float(x), Self::Exact)
        }
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Exact(a), Self::Exact(b)) if a == b => Ordering::Equal,
            _ => self.value().total_cmp(&other.value()),
        }
    }

    fn to_json(self) -> Value {
        match self {
            Self::NegInf => json!("-inf"),
            Self::PosInf => json!("inf"),
            other => json!(other.value()),
        }
    }

    fn symbolic(&self) -> String {
        match self {
            Self::NegInf => "-inf".into(),
            Self::PosInf => "inf".into(),
            Self::Exact(s) => s.to_string(),
            Self::Float(x) => format!("{x:e}"),
        }
    }
}

impl Neg for Endpoint {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            Self::NegInf => Self::PosInf,
            Self::PosInf => Self::NegInf,
            Self::Exact(s) => Self::Exact(-s),
            Self::Float(x) => Self::Float(-x),
        }
    }
}

impl From<Surd> for Endpoint {
    fn from(s: Surd) -> Self {
        Self::Exact(s)
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn new(lo: impl Into<Endpoint>, hi: impl Into<Endpoint>) -> Self {
        let (lo, hi) = (lo.into(), hi.into());
        if lo.cmp_value(&hi) == Ordering::Greater {
            Self { lo: hi, hi: lo }
        } else {
            Self { lo, hi }
        }
    }

    fn distance_1d(&self, t: f64) -> f64 {
        let (lo, hi) = (self.lo.value(), self.hi.value());
        if t < lo {
            lo - t
        } else if t > hi {
            t - hi
        } else {
            0.0
        }
    }

    fn mirrored(&self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }
}

/// A point whose coordinates are exact surds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    pub re: Endpoint,
    pub im: Endpoint,
}

impl ExactPoint {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Finite union of real intervals, imaginary-axis intervals and points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumSet {
    real: Vec<Interval>,
    imag: Vec<Interval>,
    points: Vec<ExactPoint>,
}

fn normalize_intervals(mut v: Vec<Interval>) -> Vec<Interval> {
    v.sort_by(|a, b| a.lo.cmp_value(&b.lo).then(a.hi.cmp_value(&b.hi)));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.lo.cmp_value(&last.hi) != Ordering::Greater => {
                if iv.hi.cmp_value(&last.hi) == Ordering::Greater {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

impl SpectrumSet {
    pub fn new(real: Vec<Interval>, imag: Vec<Interval>, points: Vec<ExactPoint>) -> Self {
        let mut s = Self { real, imag, points };
        s.normalize();
        s
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Sort and merge intervals, sort points and drop duplicate points.
    pub fn normalize(&mut self) {
        self.real = normalize_intervals(std::mem::take(&mut self.real));
        self.imag = normalize_intervals(std::mem::take(&mut self.imag));
        self.points.sort_by(|a, b| {
            a.re.cmp_value(&b.re).then(b.im.cmp_value(&a.im))
        });
        self.points.dedup_by(|a, b| a.re.cmp_value(&b.re) == Ordering::Equal && a.im.cmp_value(&b.im) == Ordering::Equal);
    }

    pub fn real_parts(&self) -> &[Interval] {
        &self.real
    }
    pub fn imag_parts(&self) -> &[Interval] {
        &self.imag
    }
    pub fn points(&self) -> &[ExactPoint] {
        &self.points
    }

    /// Image under `ω ↦ −conj(ω)`.
    pub fn mirrored(&self) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| ExactPoint { re: -p.re, im: p.im })
            .collect();
        Self::new(self.real.iter().map(Interval::mirrored).collect(), self.imag.clone(), points)
    }

    /// Union with another set.
    pub fn union(&self, other: &Self) -> Self {
        let cat = |a: &[Interval], b: &[Interval]| a.iter().chain(b).copied().collect::<Vec<_>>();
        Self::new(
            cat(&self.real, &other.real),
            cat(&self.imag, &other.imag),
            self.points.iter().chain(&other.points).copied().collect(),
        )
    }

    /// Euclidean distance from `omega` to the set (`∞` for the empty set).
    pub fn distance(&self, omega: Complex64) -> f64 {
        let reals = self.real.iter().map(|iv| iv.distance_1d(omega.re).hypot(omega.im));
        let imags = self.imag.iter().map(|iv| iv.distance_1d(omega.im).hypot(omega.re));
        let pts = self.points.iter().map(|p| (p.value() - omega).norm());
        reals.chain(imags).chain(pts).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, omega: Complex64, tol: f64) -> bool {
        self.distance(omega) <= tol
    }

    /// `{"real": [[lo,hi],...], "imag": [[lo,hi],...], "points": [[re,im],...]}`
    /// with `"-inf"`/`"inf"` sentinels, plus a `"symbolic"` mirror with exact
    /// endpoint strings.
    pub fn to_json(&self) -> Value {
        let ivs = |v: &[Interval]| v.iter().map(|i| json!([i.lo.to_json(), i.hi.to_json()])).collect::<Vec<_>>();
        let sym = |v: &[Interval]| v.iter().map(|i| json!([i.lo.symbolic(), i.hi.symbolic()])).collect::<Vec<_>>();
        json!({
            "real": ivs(&self.real),
            "imag": ivs(&self.imag),
            "points": self.points.iter().map(|p| json!([p.re.value(), p.im.value()])).collect::<Vec<_>>(),
            "symbolic": {
                "real": sym(&self.real),
                "imag": sym(&self.imag),
                "points": self.points.iter().map(|p| json!([p.re.symbolic(), p.im.symbolic()])).collect::<Vec<_>>(),
            }
        })
    }

    /// Parse the numeric part of [`to_json`](Self::to_json) output. Finite
    /// endpoints come back as exact values when they are short fractions and
    /// as floats otherwise.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParameter(format!("malformed spectrum set JSON: {what}"));
        let endpoint = |e: &Value| -> Result<Endpoint> {
            match e {
                Value::String(s) if s == "inf" => Ok(Endpoint::PosInf),
                Value::String(s) if s == "-inf" => Ok(Endpoint::NegInf),
                Value::Number(n) => n.as_f64().map(Endpoint::from_f64).ok_or_else(|| bad("number")),
                _ => Err(bad("endpoint")),
            }
        };
        let pairs = |key: &str| -> Result<Vec<(Endpoint, Endpoint)>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok((endpoint(a)?, endpoint(b)?)),
                    _ => Err(bad(key)),
                })
                .collect()
        };
        let real = pairs("real")?.into_iter().map(|(a, b)| Interval::new(a, b)).collect();
        let imag = pairs("imag")?.into_iter().map(|(a, b)| Interval::new(a, b)).collect();
        let points = pairs("points")?.into_iter().map(|(re, im)| ExactPoint { re, im }).collect();
        Ok(Self::new(real, imag, points))
    }
}

fn exact_positive(x: f64, what: &str) -> Result<Endpoint> {
    crate::error::ensure_positive(x, what)?;
    Ok(Endpoint::from_f64(x))
}

/// `π / L` with `L = max{L2, L3}`, exact when `L` is a short fraction.
fn pi_over(l2: f64, l3: f64) -> Result<Endpoint> {
    let l = match (exact_positive(l2, "L2")?, exact_positive(l3, "L3")?) {
        (a, b) if a.cmp_value(&b) == Ordering::Less => b,
        (a, _) => a,
    };
    Ok(match l {
        Endpoint::Exact(s) => Endpoint::Exact(Surd::pi_times(Rational64::from_integer(1)).checked_div(s)?),
        other => Endpoint::Float(PI / other.value()),
    })
}

fn symmetric_rays(r: Endpoint) -> Vec<Interval> {
    vec![Interval::new(Endpoint::NegInf, -r), Interval::new(r, Endpoint::PosInf)]
}

fn point(re: Rational64, im: Rational64) -> ExactPoint {
    ExactPoint { re: Surd::rational(re).into(), im: Surd::rational(im).into() }
}

/// Essential spectrum of the conductive-slab guide:
/// `(−∞, −π/L] ∪ [π/L, ∞) ∪ {0, −i/2, −i}`.
pub fn essential_spectrum_conductive(l2: f64, l3: f64) -> Result<SpectrumSet> {
    let r = pi_over(l2, l3)?;
    let z = Rational64::from_integer(0);
    let points = vec![
        point(z, z),
        point(z, Rational64::new(-1, 2)),
        point(z, Rational64::from_integer(-1)),
    ];
    Ok(SpectrumSet::new(symmetric_rays(r), Vec::new(), points))
}

/// Essential spectrum of the permittivity-slab guide:
/// `(−∞, −π/L] ∪ {0} ∪ [π/L, ∞)`.
pub fn essential_spectrum_selfadjoint(l2: f64, l3: f64) -> Result<SpectrumSet> {
    let r = pi_over(l2, l3)?;
    let z = Rational64::from_integer(0);
    Ok(SpectrumSet::new(symmetric_rays(r), Vec::new(), vec![point(z, z)]))
}

/// The real rays `|ω| ≥ √(λ_e,min/(ε_∞ μ_∞))` that can host pollution;
/// the whole real line when `λ_e,min = 0`.
pub fn pollution_enclosure(eps_inf: f64, mu_inf: f64, lambda_e_min: f64) -> Result<SpectrumSet> {
    crate::error::ensure_positive(eps_inf, "eps_inf")?;
    crate::error::ensure_positive(mu_inf, "mu_inf")?;
    if !(lambda_e_min.is_finite() && lambda_e_min >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda_e_min must be nonnegative, got {lambda_e_min}")));
    }
    let r2 = lambda_e_min / (eps_inf * mu_inf);
    let r = Surd::from_f64(r2)
        .and_then(Surd::sqrt)
        .map_or(Endpoint::Float(r2.sqrt()), Endpoint::Exact);
    Ok(pollution_rays(r))
}

/// [`pollution_enclosure`] for `λ_e,min = π²/L²`, with the exact endpoint
/// `π/(L √(ε_∞ μ_∞))` whenever the inputs are short fractions.
pub fn pollution_enclosure_guide(eps_inf: f64, mu_inf: f64, l: f64) -> Result<SpectrumSet> {
    let em = exact_positive(eps_inf, "eps_inf")?.value() * exact_positive(mu_inf, "mu_inf")?.value();
    let r = pi_over(l, l)?;
    let r = match (r, Surd::from_f64(em).and_then(Surd::sqrt)) {
        (Endpoint::Exact(pl), Some(s)) => Endpoint::Exact(pl.checked_div(s)?),
        (r, _) => Endpoint::Float(r.value() / em.sqrt()),
    };
    Ok(pollution_rays(r))
}

fn pollution_rays(r: Endpoint) -> SpectrumSet {
    if r.value() == 0.0 {
        SpectrumSet::new(vec![Interval::new(Endpoint::NegInf, Endpoint::PosInf)], Vec::new(), Vec::new())
    } else {
        SpectrumSet::new(symmetric_rays(r), Vec::new(), Vec::new())
    }
}

/// Region where isolated eigenvalues are guaranteed to be approximated by
/// truncation: outside the pollution rays and the segment `i[−σ_max/ε_min, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeZone {
    excluded: SpectrumSet,
}

impl SafeZone {
    pub fn excluded(&self) -> &SpectrumSet {
        &self.excluded
    }

    pub fn admits(&self, omega: Complex64, tol: f64) -> bool {
        !self.excluded.contains(omega, tol)
    }
}

pub fn safe_zone(pollution: &SpectrumSet, sigma_max: f64, eps_min: f64) -> Result<SafeZone> {
    crate::error::ensure_positive(eps_min, "eps_min")?;
    let q = sigma_max / eps_min;
    let segment = SpectrumSet::new(
        Vec::new(),
        vec![Interval::new(Endpoint::from_f64(-q), Surd::ZERO)],
        Vec::new(),
    );
    Ok(SafeZone { excluded: pollution.union(&segment) })
}

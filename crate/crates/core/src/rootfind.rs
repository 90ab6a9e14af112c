//! Zeros of meromorphic functions inside a rectangle.
//!
//! The number of zeros minus poles in a cell is obtained by tracking the
//! phase of `f` continuously around the cell boundary. Poles are supplied by
//! the caller, so `Z = winding + Σ pole orders inside`. Cells are bisected
//! until each holds at most one zero (or shrinks below the cluster size), and
//! every candidate is polished by damped Newton iteration with a
//! central-difference derivative.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::ModeConstant;

/// Closed axis-aligned rectangle in the spectral plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchRect {
    re_lo: f64,
    re_hi: f64,
    im_lo: f64,
    im_hi: f64,
}

impl SearchRect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Self> {
        let finite = [re_lo, re_hi, im_lo, im_hi].iter().all(|v| v.is_finite());
        if !finite || re_lo >= re_hi || im_lo >= im_hi {
            return Err(Error::DegenerateRect { re_lo, re_hi, im_lo, im_hi });
        }
        Ok(Self { re_lo, re_hi, im_lo, im_hi })
    }

    pub fn re_lo(&self) -> f64 {
        self.re_lo
    }
    pub fn re_hi(&self) -> f64 {
        self.re_hi
    }
    pub fn im_lo(&self) -> f64 {
        self.im_lo
    }
    pub fn im_hi(&self) -> f64 {
        self.im_hi
    }

    pub fn width(&self) -> f64 {
        self.re_hi - self.re_lo
    }

    pub fn height(&self) -> f64 {
        self.im_hi - self.im_lo
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im >= self.im_lo && z.im <= self.im_hi
    }

    /// Largest `|ω|` over the rectangle.
    pub fn max_modulus(&self) -> f64 {
        let x = self.re_lo.abs().max(self.re_hi.abs());
        let y = self.im_lo.abs().max(self.im_hi.abs());
        x.hypot(y)
    }

    /// Image under `ω ↦ −conj(ω)`.
    pub fn mirrored(&self) -> Self {
        Self { re_lo: -self.re_hi, re_hi: -self.re_lo, im_lo: self.im_lo, im_hi: self.im_hi }
    }

    /// Move every edge outward by `d` (inward when `d < 0`).
    pub fn inflate(&self, d: f64) -> Result<Self> {
        Self::new(self.re_lo - d, self.re_hi + d, self.im_lo - d, self.im_hi + d)
    }

    /// Distance from `z` to the boundary curve.
    fn boundary_distance(&self, z: Complex64) -> f64 {
        let dx = (z.re - self.re_lo).abs().min((z.re - self.re_hi).abs());
        let dy = (z.im - self.im_lo).abs().min((z.im - self.im_hi).abs());
        let inside_x = z.re >= self.re_lo && z.re <= self.re_hi;
        let inside_y = z.im >= self.im_lo && z.im <= self.im_hi;
        match (inside_x, inside_y) {
            (true, true) => dx.min(dy),
            (true, false) => dy,
            (false, true) => dx,
            (false, false) => dx.hypot(dy),
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }

    /// Split perpendicular to the longer side at `fraction` of its length.
    fn split(&self, fraction: f64) -> (Self, Self) {
        if self.width() >= self.height() {
            let x = self.re_lo + fraction * self.width();
            (
                Self { re_hi: x, ..*self },
                Self { re_lo: x, ..*self },
            )
        } else {
            let y = self.im_lo + fraction * self.height();
            (
                Self { im_hi: y, ..*self },
                Self { im_lo: y, ..*self },
            )
        }
    }
}

/// A pole of known order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole {
    pub location: Complex64,
    pub order: u32,
}

/// Poles of the function handed to [`find_roots`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PoleList(Vec<Pole>);

impl PoleList {
    /// Build a list, combining entries closer than `1e-8` (orders add).
    pub fn new(poles: impl IntoIterator<Item = Pole>) -> Self {
        let mut out: Vec<Pole> = Vec::new();
        for p in poles {
            match out.iter_mut().find(|q| (q.location - p.location).norm() < crate::specfun::POLE_EXCLUSION) {
                Some(q) => q.order += p.order,
                None => out.push(p),
            }
        }
        out.sort_by(|a, b| {
            a.location
                .re
                .total_cmp(&b.location.re)
                .then(a.location.im.total_cmp(&b.location.im))
        });
        Self(out)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pole> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same poles with every order multiplied by `k` (e.g. for `f²`).
    pub fn scaled(&self, k: u32) -> Self {
        Self(self.0.iter().map(|p| Pole { order: p.order * k, ..*p }).collect())
    }

    pub fn order_inside(&self, rect: &SearchRect) -> i64 {
        self.0
            .iter()
            .filter(|p| rect.contains(p.location))
            .map(|p| i64::from(p.order))
            .sum()
    }

    fn near_boundary(&self, rect: &SearchRect, dist: f64) -> Option<Complex64> {
        self.0
            .iter()
            .find(|p| rect.boundary_distance(p.location) < dist)
            .map(|p| p.location)
    }
}

/// A located zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Root {
    pub location: Complex64,
    pub multiplicity: u32,
    pub residual: f64,
    /// Which branch `α coth α ± β` vanishes, when the solved function was the
    /// branch-free squared form.
    pub sign_branch: Option<i8>,
    /// Transverse modes `(n2, n3)` contributing this root.
    pub modes: Vec<(u32, u32)>,
    pub mode_constant: Option<f64>,
}

impl Root {
    fn bare(location: Complex64, multiplicity: u32, residual: f64) -> Self {
        Self { location, multiplicity, residual, sign_branch: None, modes: Vec::new(), mode_constant: None }
    }
}

/// Tuning knobs for [`find_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFinderOptions {
    /// Every returned root satisfies `|f(root)| < residual_tol`.
    pub residual_tol: f64,
    /// Cells smaller than this are not split further; roots closer than this
    /// are merged.
    pub cluster_size: f64,
    /// `|f|` below `boundary_clearance × median |f|` on a contour aborts the
    /// count for that contour.
    pub boundary_clearance: f64,
    pub max_newton_iter: usize,
    pub jitter: f64,
    pub max_jitter_attempts: usize,
    pub max_depth: usize,
    /// Initial contour sampling density per unit length.
    pub samples_per_unit: f64,
    pub min_edge_samples: usize,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            cluster_size: 1e-6,
            boundary_clearance: 1e-9,
            max_newton_iter: 100,
            jitter: 1e-6,
            max_jitter_attempts: 5,
            max_depth: 160,
            samples_per_unit: 64.0,
            min_edge_samples: 16,
        }
    }
}

const MAX_EDGE_SAMPLES: usize = 1 << 16;
const PHASE_STEP_LIMIT: f64 = PI / 3.0;
const RELATIVE_STEP_LIMIT: f64 = 0.5;
/// Poles outside a cell but closer than this to its boundary are divided
/// out as well.
const POLE_REMOVAL_REACH: f64 = 0.1;
const MAX_SEGMENT_DEPTH: usize = 60;

struct Contour<'a, F> {
    f: &'a F,
    opts: &'a RootFinderOptions,
}

/// A sample of `h = f · Π (z − p)^m` stored as `(ln|h|, arg h)`, which
/// cannot overflow however many pole factors are removed.
#[derive(Clone, Copy)]
struct LogPolar {
    ln_abs: f64,
    arg: f64,
    /// `ln|f|` alone, for the boundary-clearance test.
    ln_abs_f: f64,
}

impl<F> Contour<'_, F>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match (self.f)(z) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
            _ => Err(Error::BoundaryHit { at: z }),
        }
    }

    fn eval_h(&self, z: Complex64, removed: &[Pole]) -> Result<LogPolar> {
        let v = self.eval(z)?;
        let ln_f = v.norm().ln();
        let mut h = LogPolar { ln_abs: ln_f, arg: v.arg(), ln_abs_f: ln_f };
        for p in removed {
            let d = z - p.location;
            let m = f64::from(p.order);
            h.ln_abs += m * d.norm().ln();
            h.arg += m * d.arg();
        }
        if !h.ln_abs.is_finite() {
            return Err(Error::BoundaryHit { at: z });
        }
        Ok(h)
    }

    /// Winding number of `f · Π_{p ∈ removed} (z − p)^{order}` around `rect`.
    fn winding(&self, rect: &SearchRect, removed: &[Pole]) -> Result<i64> {
        let corners = rect.corners();
        let mut samples: Vec<(Complex64, LogPolar)> = Vec::new();
        for k in 0..4 {
            let a = corners[k];
            let b = corners[(k + 1) % 4];
            let len = (b - a).norm();
            let n = ((len * self.opts.samples_per_unit).ceil() as usize)
                .clamp(self.opts.min_edge_samples, MAX_EDGE_SAMPLES);
            for i in 0..n {
                let z = a + (b - a) * (i as f64 / n as f64);
                samples.push((z, self.eval_h(z, removed)?));
            }
        }
        samples.push(samples[0]);

        let mut logs: Vec<f64> = samples.iter().map(|(_, h)| h.ln_abs_f).collect();
        logs.sort_by(f64::total_cmp);
        let floor = self.opts.boundary_clearance.ln() + logs[logs.len() / 2];
        if let Some((z, _)) = samples.iter().find(|(_, h)| h.ln_abs_f < floor) {
            return Err(Error::BoundaryHit { at: *z });
        }

        let mut total = 0.0;
        for pair in samples.windows(2) {
            total += self.segment(pair[0], pair[1], removed, floor, 0)?;
        }
        let turns = total / (2.0 * PI);
        let rounded = turns.round();
        if (turns - rounded).abs() > 0.25 {
            return Err(Error::BoundaryHit { at: rect.center() });
        }
        Ok(rounded as i64)
    }

    /// Phase increment of `h` along `[z0, z1]`. A segment is accepted when
    /// both halves pass the step tests against its midpoint, which catches a
    /// pair of zeros hiding between two samples that the endpoints alone
    /// would miss.
    fn segment(
        &self,
        (z0, h0): (Complex64, LogPolar),
        (z1, h1): (Complex64, LogPolar),
        removed: &[Pole],
        floor: f64,
        depth: usize,
    ) -> Result<f64> {
        let zm = 0.5 * (z0 + z1);
        let hm = self.eval_h(zm, removed)?;
        if hm.ln_abs_f < floor {
            return Err(Error::BoundaryHit { at: zm });
        }
        if let (Some(a), Some(b)) = (small_step(h0, hm), small_step(hm, h1)) {
            if small_step(h0, h1).is_some() {
                return Ok(a + b);
            }
        }
        if depth >= MAX_SEGMENT_DEPTH || (z1 - z0).norm() <= 1e-15 * (1.0 + z0.norm()) {
            return Err(Error::BoundaryHit { at: z0 });
        }
        Ok(self.segment((z0, h0), (zm, hm), removed, floor, depth + 1)?
            + self.segment((zm, hm), (z1, h1), removed, floor, depth + 1)?)
    }
}

/// Wrapped phase change from `h0` to `h1`, if the step is small in both
/// phase and relative modulus.
fn small_step(h0: LogPolar, h1: LogPolar) -> Option<f64> {
    let d = wrap_phase(h1.arg - h0.arg);
    let rho = Complex64::from_polar((h1.ln_abs - h0.ln_abs).exp(), d);
    let rel = (rho - 1.0).norm() / rho.norm().min(1.0);
    (d.abs() < PHASE_STEP_LIMIT && rel <= RELATIVE_STEP_LIMIT).then_some(d)
}

fn wrap_phase(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// `Z − P` inside `rect` from the continuous phase change of `f` along the
/// positively oriented boundary.
pub fn winding_count<F>(f: &F, rect: &SearchRect) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    winding_count_with(f, rect, &RootFinderOptions::default())
}

pub fn winding_count_with<F>(f: &F, rect: &SearchRect, opts: &RootFinderOptions) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Contour { f, opts }.winding(rect, &[])
}

struct Finder<'a, F> {
    contour: Contour<'a, F>,
    poles: &'a PoleList,
    opts: &'a RootFinderOptions,
}

const SPLIT_FRACTIONS: [f64; 6] = [0.5, 0.573_1, 0.438_3, 0.653_7, 0.367_1, 0.731_1];

impl<F> Finder<'_, F>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    /// Number of zeros in `rect`. Listed poles inside or close to the cell
    /// are divided out before tracking the phase, so a pole grazing the
    /// contour cannot hide its turns between samples.
    fn zero_count(&self, rect: &SearchRect) -> Result<i64> {
        let clearance = 1e-9 * (1.0 + rect.max_modulus());
        if let Some(at) = self.poles.near_boundary(rect, clearance) {
            return Err(Error::BoundaryHit { at });
        }
        let reach = rect.diameter().min(POLE_REMOVAL_REACH);
        let removed: Vec<Pole> = self
            .poles
            .iter()
            .filter(|p| rect.contains(p.location) || rect.boundary_distance(p.location) < reach)
            .copied()
            .collect();
        self.contour.winding(rect, &removed)
    }

    fn solve(&self, cell: SearchRect, count: i64, depth: usize) -> Result<Vec<Root>> {
        match count {
            0 => return Ok(Vec::new()),
            c if c < 0 => {
                return Err(Error::InvalidParameter(format!(
                    "negative zero count {c} in cell around {}; pole list incomplete",
                    cell.center()
                )))
            }
            _ => {}
        }
        let m = count as u32;
        if cell.diameter() < self.opts.cluster_size || depth >= self.opts.max_depth {
            return Ok(vec![self.polish_cluster(&cell, m)?]);
        }
        if m == 1 {
            if let Some(root) = self.polish(&cell, 1) {
                return Ok(vec![root]);
            }
        }
        let mut last_err = None;
        for &fraction in &SPLIT_FRACTIONS {
            let (a, b) = cell.split(fraction);
            let (ca, cb) = rayon::join(|| self.zero_count(&a), || self.zero_count(&b));
            match (ca, cb) {
                (Ok(ca), Ok(cb)) if ca + cb == count => {
                    let (ra, rb) = rayon::join(|| self.solve(a, ca, depth + 1), || self.solve(b, cb, depth + 1));
                    let mut out = ra?;
                    out.extend(rb?);
                    return Ok(out);
                }
                (Err(e), _) | (_, Err(e)) => last_err = Some(e),
                _ => last_err = Some(Error::BoundaryHit { at: cell.center() }),
            }
        }
        Err(last_err.unwrap_or(Error::BoundaryHit { at: cell.center() }))
    }

    fn polish_cluster(&self, cell: &SearchRect, m: u32) -> Result<Root> {
        if let Some(root) = self.polish(cell, m) {
            return Ok(root);
        }
        let center = cell.center();
        let residual = self.contour.eval(center).map(|v| v.norm()).unwrap_or(f64::INFINITY);
        if residual < self.opts.residual_tol {
            Ok(Root::bare(center, m, residual))
        } else {
            Err(Error::NonConvergence { center, residual })
        }
    }

    /// Damped (modified, for `m > 1`) Newton from the centre and four
    /// quarter points; the result must stay inside the cell.
    fn polish(&self, cell: &SearchRect, m: u32) -> Option<Root> {
        let c = cell.center();
        let (qx, qy) = (0.25 * cell.width(), 0.25 * cell.height());
        let starts = [
            c,
            c + Complex64::new(-qx, -qy),
            c + Complex64::new(qx, -qy),
            c + Complex64::new(qx, qy),
            c + Complex64::new(-qx, qy),
        ];
        // A root just outside the cell belongs to a neighbour; accepting it
        // here would double-count it and lose the one inside.
        let margin = 1e-14 * (1.0 + cell.max_modulus());
        let accept = SearchRect {
            re_lo: cell.re_lo - margin,
            re_hi: cell.re_hi + margin,
            im_lo: cell.im_lo - margin,
            im_hi: cell.im_hi + margin,
        };
        starts.iter().find_map(|&z0| {
            let (z, r) = self.newton(z0, cell, m)?;
            (accept.contains(z) && r < self.opts.residual_tol).then(|| Root::bare(z, m, r))
        })
    }

    fn newton(&self, z0: Complex64, cell: &SearchRect, m: u32) -> Option<(Complex64, f64)> {
        let mut z = z0;
        let mut fz = self.contour.eval(z).ok()?;
        let mult = f64::from(m);
        let min_side = cell.width().min(cell.height());
        let mut last_step = cell.diameter();
        for _ in 0..self.opts.max_newton_iter {
            if fz.norm() == 0.0 {
                break;
            }
            let scale = 1.0 + z.norm();
            let h = if m == 1 {
                (1e-6 * scale).min(0.01 * min_side).max(1e-13 * scale)
            } else {
                (0.1 * last_step).clamp(1e-14 * scale, (0.01 * cell.diameter()).max(1e-14 * scale))
            };
            let hz = Complex64::new(h, 0.0);
            let fp = self.contour.eval(z + hz).ok()?;
            let fm = self.contour.eval(z - hz).ok()?;
            let df = (fp - fm) / (2.0 * h);
            if df.norm() == 0.0 || !df.re.is_finite() || !df.im.is_finite() {
                break;
            }
            let step = mult * fz / df;
            let mut t = 1.0;
            let mut improved = None;
            while t > 1e-10 {
                let cand = z - t * step;
                if let Ok(fc) = self.contour.eval(cand) {
                    if fc.norm() < fz.norm() {
                        improved = Some((cand, fc));
                        break;
                    }
                }
                t *= 0.5;
            }
            match improved {
                Some((cand, fc)) => {
                    last_step = (cand - z).norm();
                    z = cand;
                    fz = fc;
                    if last_step <= 4.0 * f64::EPSILON * scale {
                        break;
                    }
                }
                None => break,
            }
        }
        Some((z, fz.norm()))
    }
}

fn merge_roots(mut roots: Vec<Root>, radius: f64) -> Vec<Root> {
    roots.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.iter_mut().find(|q| (q.location - r.location).norm() < radius) {
            Some(q) => {
                if r.residual < q.residual {
                    q.location = r.location;
                    q.residual = r.residual;
                }
                q.multiplicity += r.multiplicity;
            }
            None => out.push(r),
        }
    }
    out
}

/// All zeros of `f` in `rect`, given the complete list of poles of `f`
/// there. Multiplicities are counted by the argument principle.
pub fn find_roots<F>(f: &F, rect: &SearchRect, poles: &PoleList, opts: &RootFinderOptions) -> Result<Vec<Root>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let finder = Finder { contour: Contour { f, opts }, poles, opts };
    let mut attempt_rect = *rect;
    let mut attempt = 0;
    let (rect, total) = loop {
        match finder.zero_count(&attempt_rect) {
            Ok(n) => break (attempt_rect, n),
            Err(Error::BoundaryHit { at }) => {
                attempt += 1;
                if attempt > opts.max_jitter_attempts {
                    return Err(Error::BoundaryHit { at });
                }
                // +1, -1, +2, -2, ... multiples of the jitter, outward first.
                let k = attempt.div_ceil(2) as f64;
                let sign = if attempt % 2 == 1 { 1.0 } else { -1.0 };
                attempt_rect = rect.inflate(sign * k * opts.jitter)?;
            }
            Err(e) => return Err(e),
        }
    };
    let roots = finder.solve(rect, total, 0)?;
    let roots = merge_roots(roots, opts.cluster_size);
    for r in &roots {
        if !(r.residual < opts.residual_tol) {
            return Err(Error::NonConvergence { center: r.location, residual: r.residual });
        }
    }
    Ok(roots)
}

fn push_if_inside(out: &mut Vec<Pole>, rect: &SearchRect, z: Complex64) {
    if rect.contains(z) {
        out.push(Pole { location: z, order: 1 });
    }
}

/// Real pairs `±√v` for `v = base + k² step`, `k = 1, 2, …`, up to `|ω| ≤ r`.
fn real_pole_pairs(out: &mut Vec<Pole>, rect: &SearchRect, base: f64, step: f64, r: f64) {
    for k in 1u64.. {
        let v = base + (k * k) as f64 * step;
        if v > r * r {
            break;
        }
        let w = v.sqrt();
        push_if_inside(out, rect, Complex64::new(w, 0.0));
        push_if_inside(out, rect, Complex64::new(-w, 0.0));
    }
}

/// Simple poles in `rect` of the conductive-guide relation for mode constant
/// `c`: `ω(ω+i) = c + k²π²` from the slab term and, for a truncated guide of
/// length `x`, `ω² = c + k²π²/(x−1)²` from the exterior term.
pub fn dispersion_poles(c: ModeConstant, x: Option<f64>, rect: &SearchRect) -> Result<PoleList> {
    let r = rect.max_modulus() + 1.0;
    let pi2 = PI * PI;
    let mut out = Vec::new();
    for k in 1u64.. {
        let v = c.value() + (k * k) as f64 * pi2 - 0.25;
        if v > r * r {
            break;
        }
        let w = v.sqrt();
        push_if_inside(&mut out, rect, Complex64::new(w, -0.5));
        push_if_inside(&mut out, rect, Complex64::new(-w, -0.5));
    }
    if let Some(x) = x {
        let len = exterior_len(x)?;
        real_pole_pairs(&mut out, rect, c.value(), pi2 / (len * len), r);
    }
    Ok(PoleList::new(out))
}

/// Simple poles in `rect` of the permittivity-guide relation:
/// `(1+δ)ω² = c + k²π²` and, when truncated, `ω² = c + k²π²/(x−1)²`.
pub fn selfadjoint_poles(c: ModeConstant, delta: f64, x: Option<f64>, rect: &SearchRect) -> Result<PoleList> {
    crate::error::ensure_positive(delta, "delta")?;
    let r = rect.max_modulus() + 1.0;
    let pi2 = PI * PI;
    let mut out = Vec::new();
    real_pole_pairs(&mut out, rect, c.value() / (1.0 + delta), pi2 / (1.0 + delta), r);
    if let Some(x) = x {
        let len = exterior_len(x)?;
        real_pole_pairs(&mut out, rect, c.value(), pi2 / (len * len), r);
    }
    Ok(PoleList::new(out))
}

fn exterior_len(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::InvalidParameter(format!("truncation length X must exceed 1, got {x}")));
    }
    Ok(x - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(a: f64, b: f64, c: f64, d: f64) -> SearchRect {
        SearchRect::new(a, b, c, d).unwrap()
    }

    #[test]
    fn rect_rejects_degenerate() {
        assert!(SearchRect::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(SearchRect::new(0.0, 1.0, 2.0, -1.0).is_err());
        assert!(SearchRect::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn winding_examples() {
        let r = rect(-2.0, 2.0, -2.0, 2.0);
        assert_eq!(winding_count(&|z: Complex64| Ok(z * z + 1.0), &r).unwrap(), 2);
        let r = rect(-1.0, 1.0, -1.0, 1.0);
        assert_eq!(winding_count(&|z: Complex64| Ok(1.0 / z), &r).unwrap(), -1);
    }

    #[test]
    fn boundary_zero_is_reported() {
        let r = rect(0.0, 2.0, -1.0, 1.0);
        let err = winding_count(&|z: Complex64| Ok(z - 1.0 + Complex64::new(0.0, 1.0)), &r).unwrap_err();
        assert!(matches!(err, Error::BoundaryHit { .. }));
    }

    #[test]
    fn double_and_simple_root() {
        let f = |z: Complex64| Ok((z - 1.0) * (z - 1.0) * (z + Complex64::i()));
        let roots = find_roots(&f, &rect(-2.0, 2.0, -2.0, 2.0), &PoleList::empty(), &RootFinderOptions::default()).unwrap();
        assert_eq!(roots.len(), 2);
        let minus_i = roots.iter().find(|r| (r.location + Complex64::i()).norm() < 1e-9).unwrap();
        assert_eq!(minus_i.multiplicity, 1);
        let one = roots.iter().find(|r| (r.location - 1.0).norm() < 1e-9).unwrap();
        assert_eq!(one.multiplicity, 2);
    }

    #[test]
    fn poles_are_subtracted() {
        // zeros at ±0.5, simple pole at 0.25i
        let p = Complex64::new(0.0, 0.25);
        let f = move |z: Complex64| Ok((z * z - 0.25) / (z - p));
        let poles = PoleList::new([Pole { location: p, order: 1 }]);
        let r = rect(-1.0, 1.0, -1.0, 1.0);
        assert_eq!(winding_count(&f, &r).unwrap(), 1);
        let roots = find_roots(&f, &r, &poles, &RootFinderOptions::default()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.multiplicity == 1 && r.residual < 1e-10));
    }

    #[test]
    fn jitter_recovers_from_boundary_root() {
        // root exactly on the right edge
        let f = |z: Complex64| Ok(z - 1.0);
        let roots = find_roots(&f, &rect(-1.0, 1.0, -1.0, 1.0), &PoleList::empty(), &RootFinderOptions::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].location - 1.0).norm() < 1e-12);
    }

    #[test]
    fn pole_list_merges_coincident_entries() {
        let z = Complex64::new(1.0, -0.5);
        let l = PoleList::new([Pole { location: z, order: 1 }, Pole { location: z + 1e-12, order: 1 }]);
        assert_eq!(l.len(), 1);
        assert_eq!(l.iter().next().unwrap().order, 2);
        assert_eq!(l.scaled(2).iter().next().unwrap().order, 4);
    }

    #[test]
    fn dispersion_pole_examples() {
        let quarter = ModeConstant::new(PI * PI / 4.0).unwrap();
        let big = rect(-10.0, 10.0, -2.0, 2.0);
        let p = dispersion_poles(quarter, None, &big).unwrap();
        let w = (PI * PI / 4.0 + PI * PI - 0.25).sqrt();
        for z in [Complex64::new(w, -0.5), Complex64::new(-w, -0.5)] {
            assert!(p.iter().any(|q| (q.location - z).norm() < 1e-14), "{z}");
            // root of ω² + iω − (c + π²)
            assert!((z * z + Complex64::i() * z - (PI * PI / 4.0 + PI * PI)).norm() < 1e-12);
        }
        let pi2 = ModeConstant::new(PI * PI).unwrap();
        let strip = rect(-5.0, 5.0, -0.1, 0.1);
        let p = dispersion_poles(pi2, Some(2.0), &strip).unwrap();
        let w = PI * 2.0f64.sqrt();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|q| (q.location.re.abs() - w).abs() < 1e-14 && q.location.im == 0.0));
        let far = rect(100.0, 101.0, 5.0, 6.0);
        assert!(dispersion_poles(quarter, Some(3.0), &far).unwrap().is_empty());
        assert!(dispersion_poles(quarter, Some(1.0), &far).is_err());
    }

    #[test]
    fn listed_poles_cancel_in_winding() {
        let q = ModeConstant::new(PI * PI / 4.0).unwrap();
        let r = rect(0.1, 5.0, -1.0, -0.01);
        let f = |z: Complex64| crate::specfun::dispersion_truncated(z, q, 5.0);
        let poles = dispersion_poles(q, Some(5.0), &r).unwrap();
        assert!(!poles.is_empty());
        let roots = find_roots(&f, &r, &poles, &RootFinderOptions::default()).unwrap();
        let total: u32 = roots.iter().map(|r| r.multiplicity).sum();
        assert_eq!(i64::from(total), winding_count(&f, &r).unwrap() + poles.order_inside(&r));
    }

    #[test]
    fn deterministic() {
        let f = |z: Complex64| Ok((z * z * z - 1.0) * (z - Complex64::new(0.3, 0.2)));
        let r = rect(-2.0, 2.0, -2.0, 2.0);
        let a = find_roots(&f, &r, &PoleList::empty(), &RootFinderOptions::default()).unwrap();
        let b = find_roots(&f, &r, &PoleList::empty(), &RootFinderOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn triple_root_product_form() {
        let r0 = Complex64::new(0.3, -0.7);
        let f = move |z: Complex64| Ok((z - r0).powu(3) * (z + 1.1));
        let roots = find_roots(&f, &rect(-2.0, 2.0, -2.0, 2.0), &PoleList::empty(), &RootFinderOptions::default()).unwrap();
        let t = roots.iter().find(|r| r.multiplicity == 3).unwrap();
        assert!((t.location - r0).norm() < 1e-9, "{}", t.location);
    }
}

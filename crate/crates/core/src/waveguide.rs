//! Eigenvalues of the slab-loaded rectangular waveguide, for the
//! half-infinite guide and its truncations, plus the diagnostics that
//! compare the two.
//!
//! Separating variables in the cross-section `(0, L2) × (0, L3)` reduces the
//! problem to one transcendental equation per mode constant
//! `c = π²n2²/L2² + π²n3²/L3²`. Modes sharing `c` are grouped; each root of a
//! group's equation is an eigenvalue of multiplicity at least the group size.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enclosure::MaterialBounds;
use crate::error::{Error, Result};
use crate::rootfind::{self, find_roots, PoleList, Root, RootFinderOptions, SearchRect};
use crate::specfun::{self, ModeConstant};
use crate::spectra::{self, SpectrumSet};

/// Coefficients inside the slab `0 < x1 < 1`; outside, `ε = μ = 1`, `σ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// `σ = 1` in the slab: a dissipative, non-self-adjoint problem.
    Conductive,
    /// `ε = 1 + δ` in the slab, `σ = 0` everywhere: self-adjoint.
    Permittivity { delta: f64 },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Conductive => "conductive",
            Self::Permittivity { .. } => "permittivity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideModel {
    pub l2: f64,
    pub l3: f64,
    pub variant: Variant,
    /// Length `X > 1` of the truncated guide, if any.
    pub truncation: Option<f64>,
}

impl WaveguideModel {
    pub fn new(l2: f64, l3: f64, variant: Variant) -> Result<Self> {
        crate::error::ensure_positive(l2, "L2")?;
        crate::error::ensure_positive(l3, "L3")?;
        if let Variant::Permittivity { delta } = variant {
            crate::error::ensure_positive(delta, "delta")?;
        }
        Ok(Self { l2, l3, variant, truncation: None })
    }

    /// The same guide cut off at `x1 = x`.
    pub fn truncated(&self, x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation length X must exceed 1 (slab occupies (0,1)), got {x}"
            )));
        }
        Ok(Self { truncation: Some(x), ..*self })
    }

    pub fn untruncated(&self) -> Self {
        Self { truncation: None, ..*self }
    }

    /// `L = max{L2, L3}`.
    pub fn l_max(&self) -> f64 {
        self.l2.max(self.l3)
    }

    /// Coefficient bounds with `λ_min = λ_e,min = π²/L²`.
    pub fn material_bounds(&self) -> MaterialBounds {
        let lam = PI * PI / (self.l_max() * self.l_max());
        let (eps_max, sigma_max) = match self.variant {
            Variant::Conductive => (1.0, 1.0),
            Variant::Permittivity { delta } => (1.0 + delta, 0.0),
        };
        MaterialBounds {
            eps_min: 1.0,
            eps_max,
            mu_min: 1.0,
            mu_max: 1.0,
            sigma_min: 0.0,
            sigma_max,
            lambda_min: lam,
            lambda_e_min: lam,
        }
    }

    pub fn essential_spectrum(&self) -> Result<SpectrumSet> {
        match self.variant {
            Variant::Conductive => spectra::essential_spectrum_conductive(self.l2, self.l3),
            Variant::Permittivity { .. } => spectra::essential_spectrum_selfadjoint(self.l2, self.l3),
        }
    }

    /// Pollution rays of the limit problem at infinity (`ε = μ = 1` there).
    pub fn pollution_set(&self) -> Result<SpectrumSet> {
        spectra::pollution_enclosure_guide(1.0, 1.0, self.l_max())
    }

    /// The segment `i[−σ_max/ε_min, 0]` (empty for the permittivity guide).
    pub fn imaginary_segment(&self) -> SpectrumSet {
        let q = self.material_bounds().q();
        if q == 0.0 {
            return SpectrumSet::empty();
        }
        SpectrumSet::new(
            Vec::new(),
            vec![spectra::Interval::new(spectra::Endpoint::from_f64(-q), spectra::Surd::ZERO)],
            Vec::new(),
        )
    }

    /// Largest mode constant that can contribute roots in `rect`:
    /// `k·max|ω|² + max|ω| + 1` with `k = 1` (conductive) or `1 + δ`
    /// (permittivity). Above it both dispersion terms have positive real
    /// part throughout `rect`. A heuristic; callers may override it.
    pub fn default_c_max(&self, rect: &SearchRect) -> f64 {
        let r = rect.max_modulus();
        let k = match self.variant {
            Variant::Conductive => 1.0,
            Variant::Permittivity { delta } => 1.0 + delta,
        };
        k * r * r + r + 1.0
    }

    /// Dispersion function for mode constant `c`; the branch-free squared
    /// form for the half-infinite guide.
    pub fn dispersion(&self, c: ModeConstant, omega: Complex64) -> Result<Complex64> {
        match (self.variant, self.truncation) {
            (Variant::Conductive, None) => specfun::dispersion_true_sq(omega, c),
            (Variant::Conductive, Some(x)) => specfun::dispersion_truncated(omega, c, x),
            (Variant::Permittivity { delta }, None) => specfun::dispersion_selfadjoint_sq(omega, c, delta),
            (Variant::Permittivity { delta }, Some(x)) => {
                specfun::dispersion_selfadjoint_truncated(omega, c, delta, x)
            }
        }
    }

    /// One sign branch `g(α²) + s·β` of the half-infinite relation.
    pub fn dispersion_branch(&self, c: ModeConstant, omega: Complex64, sign: i8) -> Result<Complex64> {
        match self.variant {
            Variant::Conductive => specfun::dispersion_true(omega, c, sign),
            Variant::Permittivity { delta } => specfun::dispersion_selfadjoint(omega, c, delta, sign),
        }
    }

    /// Poles of [`dispersion`](Self::dispersion) in `rect`, with orders.
    pub fn poles(&self, c: ModeConstant, rect: &SearchRect) -> Result<PoleList> {
        let list = match self.variant {
            Variant::Conductive => rootfind::dispersion_poles(c, self.truncation, rect)?,
            Variant::Permittivity { delta } => rootfind::selfadjoint_poles(c, delta, self.truncation, rect)?,
        };
        // squaring doubles the order of the slab-term poles
        Ok(if self.truncation.is_none() { list.scaled(2) } else { list })
    }
}

/// Transverse modes sharing one mode constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeGroup {
    pub c: ModeConstant,
    pub members: Vec<(u32, u32)>,
}

impl ModeGroup {
    pub fn degeneracy(&self) -> u32 {
        self.members.len() as u32
    }
}

/// All `(n2, n3) ∈ ℕ₀² \ {(0,0)}` with `c ≤ c_max`, grouped by equal `c`
/// (relative tolerance `1e-12`) and sorted by `c`.
pub fn modes_up_to(model: &WaveguideModel, c_max: f64) -> Result<Vec<ModeGroup>> {
    if !c_max.is_finite() {
        return Err(Error::InvalidParameter(format!("c_max must be finite, got {c_max}")));
    }
    let a = (PI / model.l2).powi(2);
    let b = (PI / model.l3).powi(2);
    let mut all = Vec::new();
    let n2_max = (c_max / a).max(0.0).sqrt().floor() as u32;
    for n2 in 0..=n2_max {
        let rest = c_max - a * f64::from(n2 * n2);
        let n3_max = (rest / b).max(0.0).sqrt().floor() as u32;
        for n3 in 0..=n3_max {
            if (n2, n3) == (0, 0) {
                continue;
            }
            let c = ModeConstant::from_indices(n2, n3, model.l2, model.l3)?;
            if c.value() <= c_max {
                all.push((c, (n2, n3)));
            }
        }
    }
    all.sort_by(|x, y| x.0.value().total_cmp(&y.0.value()).then(x.1.cmp(&y.1)));
    let mut groups: Vec<ModeGroup> = Vec::new();
    for (c, m) in all {
        match groups.last_mut() {
            Some(g) if (g.c.value() - c.value()).abs() <= 1e-12 * c.value() => g.members.push(m),
            _ => groups.push(ModeGroup { c, members: vec![m] }),
        }
    }
    Ok(groups)
}

fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
            .then(a.mode_constant.unwrap_or(0.0).total_cmp(&b.mode_constant.unwrap_or(0.0)))
    });
}

/// Merge roots of different groups that coincide within `radius`.
fn merge_across_groups(mut roots: Vec<Root>, radius: f64) -> Vec<Root> {
    sort_roots(&mut roots);
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.iter_mut().find(|q| (q.location - r.location).norm() < radius) {
            Some(q) => {
                q.multiplicity += r.multiplicity;
                q.modes.extend(r.modes);
                q.modes.sort_unstable();
            }
            None => out.push(r),
        }
    }
    out
}

fn group_roots(
    model: &WaveguideModel,
    group: &ModeGroup,
    rect: &SearchRect,
    opts: &RootFinderOptions,
) -> Result<Vec<Root>> {
    let c = group.c;
    let f = |z: Complex64| model.dispersion(c, z);
    let poles = model.poles(c, rect)?;
    let mut roots = find_roots(&f, rect, &poles, opts)?;
    for r in &mut roots {
        r.multiplicity *= group.degeneracy();
        r.modes = group.members.clone();
        r.mode_constant = Some(c.value());
        if model.truncation.is_none() {
            let plus = model.dispersion_branch(c, r.location, 1)?.norm();
            let minus = model.dispersion_branch(c, r.location, -1)?.norm();
            r.sign_branch = Some(if plus <= minus { 1 } else { -1 });
        }
    }
    Ok(roots)
}

fn solve_groups(
    model: &WaveguideModel,
    rect: &SearchRect,
    c_max: Option<f64>,
    opts: &RootFinderOptions,
) -> Result<Vec<Root>> {
    let c_max = c_max.unwrap_or_else(|| model.default_c_max(rect));
    let groups = modes_up_to(model, c_max)?;
    let per_group: Vec<Result<Vec<Root>>> =
        groups.par_iter().map(|g| group_roots(model, g, rect, opts)).collect();
    let mut all = Vec::new();
    for r in per_group {
        all.extend(r?);
    }
    Ok(merge_across_groups(all, opts.cluster_size))
}

/// Eigenvalues of the half-infinite guide in `rect`. Roots of the squared
/// relation are reported with the sign branch that vanishes there.
pub fn eigenvalues_true(
    model: &WaveguideModel,
    rect: &SearchRect,
    c_max: Option<f64>,
    opts: &RootFinderOptions,
) -> Result<Vec<Root>> {
    if model.truncation.is_some() {
        return Err(Error::InvalidParameter("eigenvalues_true needs an untruncated model".into()));
    }
    solve_groups(model, rect, c_max, opts)
}

/// Eigenvalues of the guide truncated at `model.truncation`.
pub fn eigenvalues_truncated(
    model: &WaveguideModel,
    rect: &SearchRect,
    c_max: Option<f64>,
    opts: &RootFinderOptions,
) -> Result<Vec<Root>> {
    if model.truncation.is_none() {
        return Err(Error::InvalidParameter("eigenvalues_truncated needs a truncation length X".into()));
    }
    solve_groups(model, rect, c_max, opts)
}

/// Roots in `rect` together with their mirror images `−conj(ω)` found in
/// the mirrored rectangle.
pub fn with_mirror<G>(rect: &SearchRect, solve: G) -> Result<Vec<Root>>
where
    G: Fn(&SearchRect) -> Result<Vec<Root>>,
{
    let mut out = solve(rect)?;
    out.extend(solve(&rect.mirrored())?);
    sort_roots(&mut out);
    Ok(out)
}

/// A root followed across increasing truncation lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub mode_constant: f64,
    pub modes: Vec<(u32, u32)>,
    /// `(X, location)`, ascending in `X`, consecutive entries of `x_list`.
    pub points: Vec<(f64, Complex64)>,
    /// `|f(limit)|` of the half-infinite relation (squared form) at the last
    /// location.
    pub true_residual: f64,
}

impl Trajectory {
    pub fn limit(&self) -> Complex64 {
        self.points.last().expect("trajectories are nonempty").1
    }

    pub fn last_x(&self) -> f64 {
        self.points.last().expect("trajectories are nonempty").0
    }

    /// Distance between the last two locations (`∞` for a single point).
    pub fn last_step(&self) -> f64 {
        match self.points.as_slice() {
            [.., (_, a), (_, b)] => (b - a).norm(),
            _ => f64::INFINITY,
        }
    }
}

/// Two or more roots at one `X` compete for the same predecessor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguousMatch {
    pub mode_constant: f64,
    pub x: f64,
    pub predecessor: Complex64,
    pub candidates: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub x_list: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub ambiguous: Vec<AmbiguousMatch>,
    pub match_radius: f64,
}

/// Default distance within which roots at consecutive `X` are linked.
pub const DEFAULT_MATCH_RADIUS: f64 = 0.1;

/// Link the roots of each mode group across `x_list` by greedy mutual
/// nearest-neighbour matching within `match_radius`.
pub fn truncation_sweep(
    model: &WaveguideModel,
    x_list: &[f64],
    rect: &SearchRect,
    c_max: Option<f64>,
    match_radius: f64,
    opts: &RootFinderOptions,
) -> Result<Sweep> {
    if x_list.len() < 2 {
        return Err(Error::InvalidParameter("a sweep needs at least two truncation lengths".into()));
    }
    if x_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("truncation lengths must be strictly ascending".into()));
    }
    crate::error::ensure_positive(match_radius, "match_radius")?;
    let base = model.untruncated();
    let c_max = c_max.unwrap_or_else(|| base.default_c_max(rect));
    let groups = modes_up_to(&base, c_max)?;

    // (group, X) solves are independent
    let jobs: Vec<(usize, usize)> =
        (0..groups.len()).flat_map(|g| (0..x_list.len()).map(move |k| (g, k))).collect();
    let solved: Vec<Result<Vec<Root>>> = jobs
        .par_iter()
        .map(|&(g, k)| group_roots(&base.truncated(x_list[k])?, &groups[g], rect, opts))
        .collect();
    let mut per_group: Vec<Vec<Vec<Root>>> = vec![Vec::with_capacity(x_list.len()); groups.len()];
    for ((g, _), r) in jobs.iter().zip(solved) {
        per_group[*g].push(r?);
    }

    let mut trajectories = Vec::new();
    let mut ambiguous = Vec::new();
    for (group, levels) in groups.iter().zip(per_group) {
        link_group(group, x_list, &levels, match_radius, &mut trajectories, &mut ambiguous);
    }
    for t in &mut trajectories {
        t.true_residual = base
            .dispersion(ModeConstant::new(t.mode_constant)?, t.limit())
            .map_or(f64::INFINITY, |v| v.norm());
    }
    Ok(Sweep { x_list: x_list.to_vec(), trajectories, ambiguous, match_radius })
}

fn link_group(
    group: &ModeGroup,
    x_list: &[f64],
    levels: &[Vec<Root>],
    radius: f64,
    trajectories: &mut Vec<Trajectory>,
    ambiguous: &mut Vec<AmbiguousMatch>,
) {
    let start = |x: f64, z: Complex64| Trajectory {
        mode_constant: group.c.value(),
        modes: group.members.clone(),
        points: vec![(x, z)],
        true_residual: f64::NAN,
    };
    // indices into `trajectories` of those alive at the previous level
    let mut alive: Vec<usize> = Vec::new();
    for (k, roots) in levels.iter().enumerate() {
        let x = x_list[k];
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, &t) in alive.iter().enumerate() {
            let prev = trajectories[t].limit();
            let near: Vec<usize> = (0..roots.len()).filter(|&j| (roots[j].location - prev).norm() < radius).collect();
            if near.len() > 1 {
                ambiguous.push(AmbiguousMatch {
                    mode_constant: group.c.value(),
                    x,
                    predecessor: prev,
                    candidates: near.iter().map(|&j| roots[j].location).collect(),
                });
            }
            pairs.extend(near.into_iter().map(|j| ((roots[j].location - prev).norm(), ti, j)));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut taken_t = vec![false; alive.len()];
        let mut taken_r = vec![false; roots.len()];
        let mut next_alive = Vec::new();
        for (_, ti, j) in pairs {
            if taken_t[ti] || taken_r[j] {
                continue;
            }
            taken_t[ti] = true;
            taken_r[j] = true;
            trajectories[alive[ti]].points.push((x, roots[j].location));
            next_alive.push(alive[ti]);
        }
        for (j, r) in roots.iter().enumerate() {
            if !taken_r[j] {
                trajectories.push(start(x, r.location));
                next_alive.push(trajectories.len() - 1);
            }
        }
        next_alive.sort_unstable();
        alive = next_alive;
    }
}

/// Fate of a trajectory's limit point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    ConvergedToEigenvalue,
    InEssential,
    PollutionCandidate,
    Violation,
    /// Absent at the last truncation length, or its limit cannot be
    /// decided from the computed points.
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifiedTrajectory {
    pub mode_constant: f64,
    /// Point that was classified: the last location, or the extrapolated
    /// limit when `extrapolated` is set.
    pub limit: Complex64,
    pub last_step: f64,
    pub extrapolated: bool,
    pub class: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollutionReport {
    pub entries: Vec<ClassifiedTrajectory>,
    pub tol: f64,
    pub converge_tol: f64,
}

impl PollutionReport {
    pub fn count(&self, class: Classification) -> usize {
        self.entries.iter().filter(|e| e.class == class).count()
    }
}

/// Limit of a trajectory whose error behaves like `C/X`, from its last two
/// points: `(X_n z_n − X_{n−1} z_{n−1}) / (X_n − X_{n−1})`.
fn richardson(points: &[(f64, Complex64)]) -> Option<Complex64> {
    match points {
        [.., (xa, za), (xb, zb)] => Some((*xb * zb - *xa * za) / (xb - xa)),
        _ => None,
    }
}

/// Where a trajectory is heading, if that can be decided: its last location
/// when the last step is below `converge_tol`, otherwise the `1/X`
/// extrapolation when the estimates from the last two and the two before
/// that agree within `converge_tol`.
pub fn trajectory_limit(t: &Trajectory, converge_tol: f64) -> Option<(Complex64, bool)> {
    if t.points.len() < 2 {
        return None;
    }
    if t.last_step() <= converge_tol {
        return Some((t.limit(), false));
    }
    let n = t.points.len();
    if n < 3 {
        return None;
    }
    let a = richardson(&t.points[..n - 1])?;
    let b = richardson(&t.points)?;
    ((a - b).norm() <= converge_tol).then_some((b, true))
}

/// Classify each trajectory that reached the last truncation length and
/// whose limit is decided by [`trajectory_limit`]: near a true root, near
/// the essential spectrum, inside the admissible pollution region
/// (`pollution ∪ imag_interval`), or none of these.
#[allow(clippy::too_many_arguments)]
pub fn pollution_report(
    sweep: &Sweep,
    true_roots: &[Root],
    sigma_e: &SpectrumSet,
    pollution: &SpectrumSet,
    imag_interval: &SpectrumSet,
    tol: f64,
    converge_tol: f64,
) -> Result<PollutionReport> {
    if sweep.trajectories.is_empty() {
        return Err(Error::InvalidParameter("pollution report needs a nonempty sweep".into()));
    }
    let last_x = *sweep.x_list.last().expect("sweep has at least two lengths");
    let entries = sweep
        .trajectories
        .iter()
        .map(|t| {
            let decided = (t.last_x() == last_x).then(|| trajectory_limit(t, converge_tol)).flatten();
            let (limit, extrapolated, class) = match decided {
                Some((z, ex)) => (z, ex, classify_point(z, true_roots, sigma_e, pollution, imag_interval, tol)),
                None => (t.limit(), false, Classification::NotConverged),
            };
            ClassifiedTrajectory { mode_constant: t.mode_constant, limit, last_step: t.last_step(), extrapolated, class }
        })
        .collect();
    Ok(PollutionReport { entries, tol, converge_tol })
}

/// Classification of a single limit point.
pub fn classify_point(
    limit: Complex64,
    true_roots: &[Root],
    sigma_e: &SpectrumSet,
    pollution: &SpectrumSet,
    imag_interval: &SpectrumSet,
    tol: f64,
) -> Classification {
    if true_roots.iter().any(|r| (r.location - limit).norm() <= tol) {
        Classification::ConvergedToEigenvalue
    } else if sigma_e.contains(limit, tol) {
        Classification::InEssential
    } else if pollution.contains(limit, tol) || imag_interval.contains(limit, tol) {
        Classification::PollutionCandidate
    } else {
        Classification::Violation
    }
}

/// `max |Im ω + 1/2|` over roots with `re_min ≤ |Re ω| ≤ re_max`.
pub fn branch_asymptote_check(roots: &[Root], re_min: f64, re_max: Option<f64>) -> Result<f64> {
    let hi = re_max.unwrap_or(f64::INFINITY);
    roots
        .iter()
        .filter(|r| r.location.re.abs() >= re_min && r.location.re.abs() <= hi)
        .map(|r| (r.location.im + 0.5).abs())
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
        .ok_or(Error::NoQualifyingRoots { re_min })
}

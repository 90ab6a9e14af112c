//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! quantities and, for failures, the reason. Exits nonzero if any criterion
//! fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use maxspec_core::appendix::{self, determinant, dtn_entries, dtn_sign_pattern, fourier_symbol, fourier_symbol_det};
use maxspec_core::enclosure::enclosure_contains;
use maxspec_core::resolvent::resolvent_bound;
use maxspec_core::rootfind::find_roots;
use maxspec_core::spectra::{essential_spectrum_conductive, essential_spectrum_selfadjoint, Endpoint};
use maxspec_core::waveguide::{
    branch_asymptote_check, eigenvalues_true, eigenvalues_truncated, pollution_report, truncation_sweep, with_mirror,
    DEFAULT_MATCH_RADIUS,
};
use maxspec_core::{
    Classification, Complex64, MaterialBounds, PoleList, RootFinderOptions, SearchRect, SignPattern, Surd, Variant,
    WaveguideModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Id, name and check of one acceptance criterion.
type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    summary: String,
    analysis: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self { pass, summary: summary.into(), analysis: Vec::new() }
    }

    fn note(mut self, line: impl Into<String>) -> Self {
        self.analysis.push(line.into());
        self
    }
}

fn conductive() -> WaveguideModel {
    WaveguideModel::new(1.0, 2.0, Variant::Conductive).unwrap()
}

fn permittivity() -> WaveguideModel {
    WaveguideModel::new(1.0, 2.0, Variant::Permittivity { delta: 10.0 }).unwrap()
}

fn conductive_rect() -> SearchRect {
    SearchRect::new(0.05, 8.0, -0.55, -0.005).unwrap()
}

fn gap_rect() -> SearchRect {
    SearchRect::new(0.01, std::f64::consts::FRAC_PI_2 - 1e-4, -1e-6, 1e-6).unwrap()
}

const SWEEP_X: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

fn a1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_maxspec"))
        .args(["eigs", "--variant", "permittivity", "--delta", "10", "--L2", "1", "--L3", "2"])
        .args(["--re", "0.01", "1.5707", "--im", "-1e-6", "1e-6"])
        .output()
        .expect("run maxspec");
    let elapsed = start.elapsed().as_secs_f64();
    if !out.status.success() {
        return Outcome::new(false, format!("eigs exited with {}", out.status));
    }
    let csv = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<(f64, u32, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap(), f[6].to_string())
        })
        .collect();
    let positive: Vec<&(f64, u32, String)> = rows.iter().filter(|r| r.0 > 0.0).collect();
    let expected = [(1.4622, 1u32), (1.5643, 2u32)];
    let has = |x: f64, m: u32, sign: f64| rows.iter().any(|r| (r.0 - sign * x).abs() <= 5e-4 && r.1 == m);
    let reference_found = expected.iter().all(|&(x, m)| has(x, m, 1.0) && has(x, m, -1.0));
    let exact_set = reference_found && positive.len() == expected.len();
    let pass = exact_set && elapsed < 10.0;
    let listing = positive.iter().map(|r| format!("{:.6}(m{},{})", r.0, r.1, r.2)).collect::<Vec<_>>().join(" ");
    let o = Outcome::new(
        pass,
        format!(
            "{} positive roots in (0, pi/2), reference values 1.4622 (m1) and 1.5643 (m2) present with mirrors: {}, runtime {:.2} s",
            positive.len(),
            if reference_found { "yes" } else { "no" },
            elapsed
        ),
    )
    .note(format!("roots (value, multiplicity, branch): {listing}"));
    if pass {
        o
    } else {
        o.note("the squared relation has zeros on both branches; 1.4622 and 1.5643 are zeros of the '-' branch, which also")
            .note("vanishes at 0.0268, 0.0331, 0.0666, 0.0868 (m2), 0.2362. The truncated guides converge to the '+' branch")
            .note("(decaying exterior field), whose gap roots are 0.7993, 1.1998 (m2), 1.2981, 1.5211, 1.5500. No branch")
            .note("choice yields exactly the two-value set, so the criterion cannot hold as stated.")
    }
}

fn a2() -> Outcome {
    let half = Surd::from_f64(0.5).expect("1/2 is a short fraction").coeff();
    let pi_half = Endpoint::Exact(Surd::pi_times(half));
    let c = essential_spectrum_conductive(1.0, 2.0).unwrap();
    let s = essential_spectrum_selfadjoint(1.0, 2.0).unwrap();
    let rays_ok = |set: &maxspec_core::SpectrumSet| {
        let r = set.real_parts();
        r.len() == 2
            && r[0].lo == Endpoint::NegInf
            && r[0].hi == -pi_half
            && r[1].lo == pi_half
            && r[1].hi == Endpoint::PosInf
            && set.imag_parts().is_empty()
    };
    let show = |v: &[Complex64]| v.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(", ");
    let pts = |set: &maxspec_core::SpectrumSet| set.points().iter().map(|p| p.value()).collect::<Vec<_>>();
    let want_c = [Complex64::new(0.0, 0.0), Complex64::new(0.0, -0.5), Complex64::new(0.0, -1.0)];
    let pc = pts(&c);
    let ps = pts(&s);
    let points_ok = pc.len() == 3
        && want_c.iter().all(|w| pc.contains(w))
        && ps == vec![Complex64::new(0.0, 0.0)];
    let pass = rays_ok(&c) && rays_ok(&s) && points_ok;
    Outcome::new(
        pass,
        format!(
            "ray endpoints exact pi/2 (symbolic): {}/{}; points [{}] / [{}]",
            rays_ok(&c),
            rays_ok(&s),
            show(&pc),
            show(&ps)
        ),
    )
}

fn a3() -> Outcome {
    let opts = RootFinderOptions::default();
    let rect = conductive_rect();
    let b = conductive().material_bounds();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    let truth = with_mirror(&rect, |r| eigenvalues_true(&conductive(), r, None, &opts)).unwrap();
    let mut sets = vec![("true", truth)];
    for x in [10.0, 50.0] {
        let m = conductive().truncated(x).unwrap();
        sets.push((if x == 10.0 { "X=10" } else { "X=50" }, with_mirror(&rect, |r| eigenvalues_truncated(&m, r, None, &opts)).unwrap()));
    }
    let mut counts = Vec::new();
    for (name, roots) in &sets {
        counts.push(format!("{name}: {}", roots.len()));
        for r in roots {
            checked += 1;
            if !enclosure_contains(r.location, &b, 1e-8) {
                violations.push(r.location);
            }
        }
    }
    Outcome::new(
        violations.is_empty() && checked > 0,
        format!("{checked} eigenvalues checked ({}), {} outside the enclosure", counts.join(", "), violations.len()),
    )
    .note("search region: [0.05, 8] x [-0.55, -0.005] and its mirror image; |Re| < 0.05 is where the relation degenerates")
}

fn a4() -> Outcome {
    let opts = RootFinderOptions::default();
    let rect = conductive_rect();
    let quarter = PI * PI / 4.0;
    let truth_q = eigenvalues_true(&conductive(), &rect, Some(quarter * (1.0 + 1e-12)), &opts).unwrap();
    let sweep = truncation_sweep(&conductive(), &SWEEP_X, &rect, Some(quarter * (1.0 + 1e-12)), DEFAULT_MATCH_RADIUS, &opts).unwrap();
    let mut o;
    if truth_q.is_empty() {
        o = Outcome::new(
            false,
            format!(
                "mode group c = pi^2/4: the half-infinite relation has no root in the search region ({} trajectories of that group, none with a target)",
                sweep.trajectories.len()
            ),
        );
    } else {
        let target = truth_q[0].location;
        let best = sweep
            .trajectories
            .iter()
            .filter(|t| t.points.len() == SWEEP_X.len())
            .map(|t| t.points.iter().map(|(_, z)| (z - target).norm()).collect::<Vec<_>>())
            .min_by(|a, b| a[a.len() - 1].total_cmp(&b[b.len() - 1]));
        let pass = best.as_ref().is_some_and(|d| d.windows(2).all(|w| w[1] < w[0]) && d[d.len() - 1] < 1e-6);
        o = Outcome::new(pass, format!("c = pi^2/4 distances {best:?}"));
    }
    // the nearest group that does have a root: c = pi^2 (double, modes (1,0) and (0,2))
    let full = truncation_sweep(&conductive(), &SWEEP_X, &SearchRect::new(3.0, 4.5, -0.3, -0.005).unwrap(), None, DEFAULT_MATCH_RADIUS, &opts).unwrap();
    let target = Complex64::new(3.736800899, -0.037867709);
    if let Some(t) = full.trajectories.iter().find(|t| (t.mode_constant - PI * PI).abs() < 1e-9 && (t.limit() - target).norm() < 1e-3) {
        let d: Vec<String> = t.points.iter().map(|(x, z)| format!("X={x}: {:.3e}", (z - target).norm())).collect();
        o = o.note(format!("c = pi^2 trajectory to 3.736801-0.037868i: {}", d.join(", ")));
    }
    if !o.pass {
        o = o
            .note("for c = pi^2/4 the '+' relation has no zero anywhere in [0.001, 20] x [-3, 0] (its only zeros there are")
            .note("'-' branch zeros near Im = -2); the truncated roots of this group drift to the real axis with Im ~ 1/X, toward")
            .note("the essential spectrum, so there is no eigenvalue to converge to. For c = pi^2 the distances fall faster than")
            .note("geometrically (x1/5, then x1/200 per doubling of X) but 2.4e-5 at X = 80 is above 1e-6.")
    }
    o
}

fn a5() -> Outcome {
    let opts = RootFinderOptions::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for (model, rect) in [(conductive(), conductive_rect()), (permittivity(), gap_rect())] {
        let mut sweep = truncation_sweep(&model, &SWEEP_X, &rect, None, DEFAULT_MATCH_RADIUS, &opts).unwrap();
        let mirror = truncation_sweep(&model, &SWEEP_X, &rect.mirrored(), None, DEFAULT_MATCH_RADIUS, &opts).unwrap();
        sweep.trajectories.extend(mirror.trajectories);
        let truth = with_mirror(&rect, |r| eigenvalues_true(&model, r, None, &opts)).unwrap();
        let rep = pollution_report(
            &sweep,
            &truth,
            &model.essential_spectrum().unwrap(),
            &model.pollution_set().unwrap(),
            &model.imaginary_segment(),
            1e-3,
            1e-3,
        )
        .unwrap();
        let v = rep.count(Classification::Violation);
        let p = rep.count(Classification::PollutionCandidate);
        let selfadjoint = matches!(model.variant, Variant::Permittivity { .. });
        pass &= v == 0 && (!selfadjoint || p == 0);
        lines.push(format!(
            "{}: {} trajectories, converged {}, in essential {}, pollution candidates {p}, violations {v}, undecided {}",
            model.variant.name(),
            rep.entries.len(),
            rep.count(Classification::ConvergedToEigenvalue),
            rep.count(Classification::InEssential),
            rep.count(Classification::NotConverged)
        ));
    }
    Outcome::new(pass, lines.join("; "))
}

fn a6() -> Outcome {
    let opts = RootFinderOptions::default();
    let rect = SearchRect::new(15.0, 40.0, -0.55, -0.005).unwrap();
    let roots = eigenvalues_true(&conductive(), &rect, None, &opts).unwrap();
    // zeros of the '-' branch solve the squared relation only; they are not eigenvalues
    let plus: Vec<_> = roots.iter().filter(|r| r.sign_branch == Some(1)).cloned().collect();
    let minus = roots.len() - plus.len();
    let max_dev = branch_asymptote_check(&plus, 15.0, Some(40.0)).unwrap_or(f64::NAN);
    let min_dev = plus.iter().map(|r| (r.location.im + 0.5).abs()).fold(f64::INFINITY, f64::min);
    let mut o = Outcome::new(
        max_dev < 0.05,
        format!(
            "{} eigenvalues with |Re| in [15, 40] ({minus} '-' branch zeros excluded), max |Im + 1/2| = {max_dev:.4}, min = {min_dev:.4}",
            plus.len()
        ),
    );
    if !o.pass {
        // per-window minimum deviation: evidence for convergence along a subsequence
        let windows: Vec<String> = (0..5)
            .map(|k| {
                let (lo, hi) = (15.0 + 5.0 * k as f64, 20.0 + 5.0 * k as f64);
                let m = plus
                    .iter()
                    .filter(|r| r.location.re >= lo && r.location.re < hi)
                    .map(|r| (r.location.im + 0.5).abs())
                    .fold(f64::INFINITY, f64::min);
                format!("[{lo},{hi}): {m:.3}")
            })
            .collect();
        o = o
            .note("each mode group contributes roots starting just above its cutoff Re ~ sqrt(c) with Im close to 0, so every")
            .note("window of Re contains fresh near-real roots and the maximum deviation stays near 1/2. The proven statement is")
            .note("that some subsequence approaches Im = -1/2; the minimum deviation per window is consistent with that:")
            .note(windows.join(", "));
    }
    o
}

fn printed_symbol(omega: Complex64, xi: f64, n2: u32, n3: u32) -> [[Complex64; 6]; 6] {
    let (a, b) = (PI * f64::from(n2), PI * f64::from(n3) / 2.0);
    let mut m = fourier_symbol(omega, xi, n2, n3, 1.0, 2.0);
    let lower = [[0.0, -b, a], [-b, 0.0, -xi], [-a, xi, 0.0]];
    for r in 0..3 {
        for c in 0..3 {
            m[r + 3][c] = lower[r][c].into();
        }
    }
    m
}

fn a7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA7);
    let mut worst = 0.0_f64;
    let mut worst_printed = 0.0_f64;
    for _ in 0..10_000 {
        let omega = Complex64::from_polar(rng.random_range(0.0..10.0), rng.random_range(0.0..2.0 * PI));
        let xi = rng.random_range(-10.0..10.0);
        let (n2, n3) = (rng.random_range(0..=5u32), rng.random_range(0..=5u32));
        let (num, closed) = fourier_symbol_det(omega, xi, n2, n3, 1.0, 2.0);
        worst = worst.max((num - closed).norm() / (1.0 + closed.norm()));
        let printed = determinant(printed_symbol(omega, xi, n2, n3));
        worst_printed = worst_printed.max((printed - closed).norm() / (1.0 + closed.norm()));
    }
    Outcome::new(worst < 1e-10, format!("10^4 samples, max relative error {worst:.3e}"))
        .note(format!(
            "lower-left block taken as the transpose of the upper-right block; with the block exactly as typeset the max relative error is {worst_printed:.3e}"
        ))
}

fn a8() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    for k in (1..=19).filter(|&k| k != 10) {
        let nu = 0.05 * f64::from(k);
        let p = dtn_sign_pattern(&dtn_entries(nu, 1.0, 2.0, 200).unwrap());
        let want = if nu < 0.5 { SignPattern::AllPositive } else { SignPattern::OneSignChange };
        pass &= p == want;
        rows.push(format!("{nu:.2}:{p:?}"));
    }
    let mut o = Outcome::new(pass, rows.join(" "));
    if !pass {
        let k1 = appendix::transverse_frequencies(1.0, 2.0, 1).unwrap()[0];
        o = o
            .note(
                "the entry k((1-nu)coth k - nu) is positive only for k < atanh((1-nu)/nu), which is 1.15 at nu = 0.55; the smallest",
            )
            .note(format!(
                "transverse frequency for L2 = 1, L3 = 2 is pi*sqrt(5)/2 = {k1:.4} (pi/2 even when n2 = 0 is allowed), so for every"
            ))
            .note("nu > 1/2 all entries are negative. That still gives the 'at worst finite-dimensional kernel' property (zero positive")
            .note("entries); a single sign change would need a thinner cross-section (e.g. L2 = L3 = 20 gives one at nu = 0.7).")
    }
    o
}

fn a9() -> Outcome {
    let k1 = appendix::transverse_frequencies(1.0, 2.0, 1).unwrap()[0];
    let rep = appendix::weyl_check(k1).unwrap();
    let r20 = appendix::weyl_decay_ratio(20.0, k1).unwrap();
    let pass = rep.pass && r20 < 1e-8;
    Outcome::new(pass, format!("R(20) = {r20:.3e}, fit {}", rep.detail))
}

fn a10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA10);
    let rect = SearchRect::new(-2.0, 2.0, -2.0, 2.0).unwrap();
    let opts = RootFinderOptions::default();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for case in 0..200 {
        let degree = rng.random_range(1..=6u32);
        let mut factors: Vec<(Complex64, u32)> = Vec::new();
        let mut used = 0;
        while used < degree {
            let m = rng.random_range(1..=(degree - used).min(3));
            let z = Complex64::new(rng.random_range(-1.99..1.99), rng.random_range(-1.99..1.99));
            if factors.iter().all(|(w, _)| (w - z).norm() >= 0.05) {
                factors.push((z, m));
                used += m;
            }
        }
        let fs = factors.clone();
        let f = move |z: Complex64| Ok(fs.iter().fold(Complex64::new(1.0, 0.0), |acc, (r, m)| acc * (z - r).powu(*m)));
        match find_roots(&f, &rect, &PoleList::empty(), &opts) {
            Ok(roots) => {
                let ok = roots.len() == factors.len()
                    && factors.iter().all(|(z, m)| {
                        roots.iter().any(|r| {
                            let d = (r.location - z).norm();
                            if d < 1e-9 {
                                worst = worst.max(d);
                            }
                            d < 1e-9 && r.multiplicity == *m
                        })
                    });
                if !ok {
                    failures.push(case);
                }
            }
            Err(_) => failures.push(case),
        }
    }
    Outcome::new(failures.is_empty(), format!("200 polynomials, failures {failures:?}, max location error {worst:.2e}"))
}

fn a11() -> Outcome {
    let b = MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 0.0).unwrap();
    let v1 = resolvent_bound(Complex64::new(1.0, -2.0), &b);
    let v2 = resolvent_bound(Complex64::new(1.0, -3.0), &b);
    let v3 = resolvent_bound(Complex64::new(0.0, -0.5), &b);
    let close = |v: Option<f64>, want: f64| v.is_some_and(|x| (x - want).abs() <= 1e-14);
    let pass = close(v1, 2.0) && close(v2, 1.0) && v3.is_none();
    Outcome::new(pass, format!("1-2i -> {v1:?}, 1-3i -> {v2:?}, -0.5i -> {v3:?}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("A1", "gap eigenvalues of the permittivity guide", a1),
        ("A2", "essential spectra", a2),
        ("A3", "enclosure soundness", a3),
        ("A4", "truncation convergence", a4),
        ("A5", "pollution confinement", a5),
        ("A6", "Im -> -1/2 asymptote", a6),
        ("A7", "Fourier determinant identity", a7),
        ("A8", "DtN sign analysis", a8),
        ("A9", "Weyl decay", a9),
        ("A10", "root-finder oracle equivalence", a10),
        ("A11", "resolvent bound spot values", a11),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{id} {verdict} {name}: {} [{:.2} s]", o.summary, start.elapsed().as_secs_f64());
        for line in &o.analysis {
            println!("      {line}");
        }
        if !o.pass {
            failed.push(id);
        }
    }
    println!("acceptance: {} of 11 criteria pass{}", 11 - failed.len(), if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) });
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

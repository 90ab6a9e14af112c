//! One function per subcommand. Each returns the text destined for stdout
//! (JSON reports) or writes CSV to `--out`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use maxspec_core::appendix::{self, SymbolSample};
use maxspec_core::enclosure::{enclosure_boundary_samples, spectral_free_gap, threshold_case};
use maxspec_core::export::{self, boundary_csv, grid_csv, roots_csv, sweep_csv};
use maxspec_core::resolvent::resolvent_levelgrid;
use maxspec_core::waveguide::{eigenvalues_true, eigenvalues_truncated, pollution_report, truncation_sweep, with_mirror};
use maxspec_core::{
    Classification, Complex64, Error, MaterialBounds, Root, SearchRect, Sweep, WaveguideModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Invalid, RunConfig};

/// Why a command failed; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or preconditions (exit 1).
    Validation(String),
    /// The numerics did not succeed (exit 2).
    Numerical(String),
}

impl From<Invalid> for Failure {
    fn from(e: Invalid) -> Self {
        Failure::Validation(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::DegenerateRect { .. } | Error::NonFinite(_) | Error::EmptyRange(_) => {
                Failure::Validation(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Validation(format!("cannot write {}: {e}", path.display()))
}

pub type Outcome = Result<String, Failure>;

fn json_out(mut v: Value) -> Outcome {
    export::round_json(&mut v);
    export::to_json_string(&v).map_err(|e| Failure::Numerical(e.to_string()))
}

/// Write CSV to `--out` (returning an empty stdout) or return it for stdout.
fn csv_out(cfg: &RunConfig, csv: String) -> Outcome {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| io_failure(path, e))?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn material_json(b: &MaterialBounds) -> Value {
    serde_json::to_value(b).unwrap_or_default()
}

pub fn enclosure(cfg: &RunConfig) -> Outcome {
    let b = cfg.material()?;
    let q = b.q();
    let strip = (-0.5 * q, -0.5 * b.sigma_min / b.eps_max);
    let n = RunConfig::count(cfg.samples, 401, 2, "samples")?;
    if cfg.out.is_some() {
        let range = match &cfg.im {
            Some(v) if v.len() == 2 => (v[0], v[1]),
            _ => (strip.0, 0.0),
        };
        csv_out(cfg, boundary_csv(&enclosure_boundary_samples(&b, range, n)?))?;
    }
    json_out(json!({
        "material": material_json(&b),
        "q": q,
        "strip": [strip.0, strip.1],
        "imaginary_segment": [-q, 0.0],
        "spectral_free_gap": spectral_free_gap(&b),
        "threshold_case": threshold_case(&b),
    }))
}

pub fn resolvent_grid(cfg: &RunConfig) -> Outcome {
    let b = cfg.material()?;
    let window = cfg.window()?;
    let nx = RunConfig::count(cfg.nx, 121, 1, "nx")?;
    let ny = RunConfig::count(cfg.ny, 101, 1, "ny")?;
    csv_out(cfg, grid_csv(&resolvent_levelgrid(&b, &window, nx, ny)))
}

pub fn essential_spectrum(cfg: &RunConfig) -> Outcome {
    let m = cfg.model()?;
    json_out(json!({ "variant": m.variant.name(), "L2": m.l2, "L3": m.l3, "essential_spectrum": m.essential_spectrum()?.to_json() }))
}

pub fn pollution_set(cfg: &RunConfig) -> Outcome {
    let m = cfg.model()?;
    json_out(json!({
        "variant": m.variant.name(),
        "L2": m.l2,
        "L3": m.l3,
        "pollution_set": m.pollution_set()?.to_json(),
        "imaginary_segment": m.imaginary_segment().to_json(),
    }))
}

fn solve(cfg: &RunConfig, model: &WaveguideModel, truncated: bool) -> Result<Vec<Root>, Failure> {
    let rect = cfg.search_rect(model)?;
    let opts = cfg.options()?;
    let c_max = cfg.c_max()?;
    let one = |r: &SearchRect| {
        if truncated {
            eigenvalues_truncated(model, r, c_max, &opts)
        } else {
            eigenvalues_true(model, r, c_max, &opts)
        }
    };
    let roots = if cfg.mirror() { with_mirror(&rect, one)? } else { one(&rect)? };
    Ok(roots)
}

pub fn true_roots(cfg: &RunConfig) -> Result<Vec<Root>, Failure> {
    let model = cfg.model()?;
    let mut roots = solve(cfg, &model, false)?;
    if let Some(s) = cfg.branch() {
        roots.retain(|r| r.sign_branch == Some(s));
    }
    Ok(roots)
}

pub fn eigs(cfg: &RunConfig) -> Outcome {
    if cfg.x.is_some() {
        return Err(Failure::Validation("--X is not accepted by `eigs` (half-infinite guide); use `eigs-truncated`".into()));
    }
    let roots = true_roots(cfg)?;
    csv_out(cfg, roots_csv(&roots))
}

pub fn eigs_truncated(cfg: &RunConfig) -> Outcome {
    if cfg.branch.is_some() {
        return Err(Failure::Validation("--branch applies only to `eigs` (the truncated relation has no sign branches)".into()));
    }
    let model = cfg.truncated_model()?;
    csv_out(cfg, roots_csv(&solve(cfg, &model, true)?))
}

fn run_sweep(cfg: &RunConfig, model: &WaveguideModel) -> Result<Sweep, Failure> {
    let rect = cfg.search_rect(model)?;
    let opts = cfg.options()?;
    let xs = cfg.x_list()?;
    let c_max = cfg.c_max()?;
    let radius = cfg.match_radius()?;
    let mut sweep = truncation_sweep(model, &xs, &rect, c_max, radius, &opts)?;
    if cfg.mirror() {
        let other = truncation_sweep(model, &xs, &rect.mirrored(), c_max, radius, &opts)?;
        sweep.trajectories.extend(other.trajectories);
        sweep.ambiguous.extend(other.ambiguous);
    }
    Ok(sweep)
}

pub fn sweep(cfg: &RunConfig) -> Outcome {
    let model = cfg.model()?;
    csv_out(cfg, sweep_csv(&run_sweep(cfg, &model)?))
}

pub fn pollution(cfg: &RunConfig) -> Outcome {
    let model = cfg.model()?;
    let sweep = run_sweep(cfg, &model)?;
    let truth = solve(cfg, &model, false)?;
    let rep = pollution_report(
        &sweep,
        &truth,
        &model.essential_spectrum()?,
        &model.pollution_set()?,
        &model.imaginary_segment(),
        cfg.tol()?,
        cfg.converge_tol()?,
    )?;
    let counts: serde_json::Map<String, Value> = [
        Classification::ConvergedToEigenvalue,
        Classification::InEssential,
        Classification::PollutionCandidate,
        Classification::Violation,
        Classification::NotConverged,
    ]
    .into_iter()
    .map(|c| (serde_json::to_value(c).unwrap().as_str().unwrap_or_default().to_string(), json!(rep.count(c))))
    .collect();
    json_out(json!({
        "variant": model.variant.name(),
        "X_list": sweep.x_list,
        "trajectories": sweep.trajectories.len(),
        "ambiguous_matches": sweep.ambiguous.len(),
        "true_roots": truth.len(),
        "tol": rep.tol,
        "converge_tol": rep.converge_tol,
        "counts": counts,
        "entries": rep.entries,
    }))
}

/// The three appendix checks as used by `appendix-checks`.
pub fn appendix_reports(seed: u64) -> Result<Vec<appendix::CheckReport>, Failure> {
    let (l2, l3) = (1.0, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<SymbolSample> = (0..10_000)
        .map(|_| SymbolSample {
            omega: Complex64::from_polar(rng.random_range(0.0..10.0), rng.random_range(0.0..2.0 * PI)),
            xi: rng.random_range(-10.0..10.0),
            n2: rng.random_range(0..=5),
            n3: rng.random_range(0..=5),
        })
        .collect();
    let nus: Vec<f64> = (1..=19).filter(|&k| k != 10).map(|k| 0.05 * f64::from(k)).collect();
    let kappa1 = appendix::transverse_frequencies(l2, l3, 1)?[0];
    Ok(vec![
        appendix::dtn_check(&nus, l2, l3, 200)?,
        appendix::weyl_check(kappa1)?,
        appendix::fourier_det_check(&samples, l2, l3, 1e-10),
    ])
}

pub fn appendix_checks(cfg: &RunConfig) -> Outcome {
    let reports = appendix_reports(cfg.seed.unwrap_or(2024))?;
    let pass = reports.iter().all(|r| r.pass);
    json_out(json!({ "pass": pass, "checks": reports }))
}

fn write(dir: &Path, name: &str, body: &str, manifest: &mut Vec<Value>) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    let rows = if name.ends_with(".csv") { body.lines().count().saturating_sub(1) } else { 0 };
    manifest.push(json!({ "file": name, "rows": rows }));
    Ok(())
}

fn pretty(mut v: Value) -> Result<String, Failure> {
    export::round_json(&mut v);
    export::to_json_string(&v).map_err(|e| Failure::Numerical(e.to_string()))
}

/// Everything the figure scripts read, written into `--out` (a directory).
pub fn figure_data(cfg: &RunConfig) -> Outcome {
    let dir: PathBuf = cfg.out.clone().ok_or_else(|| Failure::Validation("--out DIR is required for figure-data".into()))?;
    std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    let mut manifest = Vec::new();

    // Figure 1: the three threshold cases for σ_min = 0
    let mut cases = Vec::new();
    for (tag, lambda) in [("i", 0.5), ("ii", 1.2), ("iii", 2.0)] {
        let b = MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, 2.0, lambda, lambda.max(2.0))?;
        let name = format!("fig1_case_{tag}.csv");
        write(&dir, &name, &boundary_csv(&enclosure_boundary_samples(&b, (-1.0, 0.0), 401)?), &mut manifest)?;
        cases.push(json!({
            "case": tag,
            "boundary": name,
            "material": material_json(&b),
            "threshold_case": threshold_case(&b),
            "strip": [-0.5 * b.q(), 0.0],
            "imaginary_segment": [-b.q(), 0.0],
        }));
    }
    write(&dir, "fig1.json", &pretty(json!({ "cases": cases }))?, &mut manifest)?;

    // Figure 2: resolvent level grid, ε_min = μ_min = 1, σ_max = 2
    let b2 = MaterialBounds::new(1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 0.0)?;
    let window = SearchRect::new(-3.0, 3.0, -5.0, 0.0)?;
    write(&dir, "fig2_grid.csv", &grid_csv(&resolvent_levelgrid(&b2, &window, 241, 201)), &mut manifest)?;
    write(
        &dir,
        "fig2.json",
        &pretty(json!({ "grid": "fig2_grid.csv", "material": material_json(&b2), "numerical_range": [-2.0, 0.0] }))?,
        &mut manifest,
    )?;

    // Figures 3 and 4: conductive guide on (0,∞)×(0,1)×(0,2) and its X = 50 truncation
    let base = RunConfig { out: None, ..cfg.clone() };
    let model = base.model()?;
    let bounds = model.material_bounds();
    let rect = base.search_rect(&model)?;
    let truth = solve(&base, &model, false)?;
    write(&dir, "fig3_eigs.csv", &roots_csv(&truth), &mut manifest)?;
    let boundary = enclosure_boundary_samples(&bounds, (-0.5 * bounds.q(), 0.0), 401)?;
    write(&dir, "enclosure_boundary.csv", &boundary_csv(&boundary), &mut manifest)?;
    write(
        &dir,
        "fig3.json",
        &pretty(json!({
            "eigenvalues": "fig3_eigs.csv",
            "boundary": "enclosure_boundary.csv",
            "essential_spectrum": model.essential_spectrum()?.to_json(),
            "material": material_json(&bounds),
            "window": { "re": [-rect.re_hi(), rect.re_hi()], "im": [rect.im_lo(), 0.0] },
        }))?,
        &mut manifest,
    )?;
    let trunc = model.truncated(base.x.unwrap_or(50.0))?;
    let truncated = solve(&base, &trunc, true)?;
    write(&dir, "fig4_eigs.csv", &roots_csv(&truncated), &mut manifest)?;
    write(
        &dir,
        "fig4.json",
        &pretty(json!({
            "eigenvalues": "fig4_eigs.csv",
            "boundary": "enclosure_boundary.csv",
            "X": trunc.truncation,
            "material": material_json(&bounds),
            "window": { "re": [-rect.re_hi(), rect.re_hi()], "im": [rect.im_lo(), 0.0] },
            "zoom": { "re": [0.0, 1.5 * PI], "im": [-0.1, 0.0] },
        }))?,
        &mut manifest,
    )?;

    let summary = json!({ "schema": 1, "files": manifest });
    std::fs::write(dir.join("manifest.json"), pretty(summary.clone())?).map_err(|e| io_failure(&dir, e))?;
    json_out(summary)
}

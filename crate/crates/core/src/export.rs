//! CSV and JSON serialisation of computed spectra.
//!
//! Every number is written with 12 significant digits, `.` as decimal
//! separator, `,` between fields and `\n` line endings. Degenerate roots list
//! all contributing modes, `;`-separated and aligned between the `n2` and
//! `n3` columns.

use std::fmt::Write as _;

use serde::Serialize;

use crate::enclosure::BoundarySample;
use crate::resolvent::LevelGrid;
use crate::rootfind::Root;
use crate::waveguide::Sweep;

pub const ROOTS_HEADER: &str = "re,im,mult,c,n2,n3,sign,residual";
pub const SWEEP_HEADER: &str = "trajectory,X,re,im,mult,c,n2,n3,sign,residual";
pub const BOUNDARY_HEADER: &str = "re,im,branch";
pub const GRID_HEADER: &str = "re,im,bound";

/// Format `x` with 12 significant digits, in fixed notation for moderate
/// exponents and scientific notation otherwise; trailing zeros are dropped.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

fn modes(m: &[(u32, u32)]) -> (String, String) {
    let join = |f: fn(&(u32, u32)) -> u32| m.iter().map(|p| f(p).to_string()).collect::<Vec<_>>().join(";");
    (join(|p| p.0), join(|p| p.1))
}

fn root_fields(r: &Root) -> String {
    let (n2, n3) = modes(&r.modes);
    let sign = match r.sign_branch {
        Some(s) if s > 0 => "+",
        Some(_) => "-",
        None => "",
    };
    format!(
        "{},{},{},{},{n2},{n3},{sign},{}",
        fmt12(r.location.re),
        fmt12(r.location.im),
        r.multiplicity,
        opt(r.mode_constant),
        fmt12(r.residual)
    )
}

/// Roots as CSV with header [`ROOTS_HEADER`].
pub fn roots_csv(roots: &[Root]) -> String {
    let mut out = format!("{ROOTS_HEADER}\n");
    for r in roots {
        let _ = writeln!(out, "{}", root_fields(r));
    }
    out
}

/// Every trajectory point of a sweep, one row per `(trajectory, X)`, with
/// header [`SWEEP_HEADER`]. Multiplicity is 1 per tracked point; the sign
/// and residual columns are left empty.
pub fn sweep_csv(sweep: &Sweep) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for (id, t) in sweep.trajectories.iter().enumerate() {
        let (n2, n3) = modes(&t.modes);
        for (x, z) in &t.points {
            let _ = writeln!(
                out,
                "{id},{},{},{},1,{},{n2},{n3},,",
                fmt12(*x),
                fmt12(z.re),
                fmt12(z.im),
                fmt12(t.mode_constant)
            );
        }
    }
    out
}

/// Enclosure boundary samples with header [`BOUNDARY_HEADER`].
pub fn boundary_csv(samples: &[BoundarySample]) -> String {
    let mut out = format!("{BOUNDARY_HEADER}\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", fmt12(s.point.re), fmt12(s.point.im), s.branch);
    }
    out
}

/// Resolvent level grid with header [`GRID_HEADER`]; cells without a bound
/// have an empty third field.
pub fn grid_csv(grid: &LevelGrid) -> String {
    let mut out = format!("{GRID_HEADER}\n");
    for (x, y, v) in grid.cells() {
        let _ = writeln!(out, "{},{},{}", fmt12(x), fmt12(y), opt(v));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Round every float inside a JSON value to 12 significant digits, so that
/// JSON reports agree digit-for-digit with the CSV output.
pub fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| fmt12(x).parse::<f64>().ok()) {
                if let Some(m) = serde_json::Number::from_f64(r) {
                    *n = m;
                }
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_json),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

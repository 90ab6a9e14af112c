//! Upper bounds for the resolvent norm below the enclosure strip.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::enclosure::MaterialBounds;
use crate::rootfind::SearchRect;

/// Resolvent-norm bound at `ω`, or `None` where no bound is available.
///
/// With `q = σ_max/ε_min` and `m = min{ε_min, μ_min}`, two estimates apply:
/// off the imaginary axis below `Im ω = −q/2`,
/// `(1/m) · 1/(|Im ω| − q/2) · (1 + (q/2)²/(Re ω)²)`, and anywhere below
/// `Im ω = −q`, `(1/m) · 1/(|Im ω| − q)`. The smaller one is returned.
pub fn resolvent_bound(omega: Complex64, b: &MaterialBounds) -> Option<f64> {
    let q = b.q();
    let m = b.eps_min.min(b.mu_min);
    let (x, y) = (omega.re, omega.im);
    let strip = (x != 0.0 && y < -0.5 * q).then(|| {
        let h = 0.5 * q;
        (1.0 / m) * (1.0 / (y.abs() - h)) * (1.0 + h * h / (x * x))
    });
    let half_plane = (y < -q).then(|| (1.0 / m) / (y.abs() - q));
    match (strip, half_plane) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// A regular grid of bound values; `values[j][i]` sits at `(re[i], im[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl LevelGrid {
    /// Iterate `(re, im, bound)` row by row.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, Option<f64>)> + '_ {
        self.im
            .iter()
            .zip(&self.values)
            .flat_map(move |(&y, row)| self.re.iter().zip(row).map(move |(&x, &v)| (x, y, v)))
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Evaluate [`resolvent_bound`] on an `nx × ny` grid spanning `window`
/// (corners included). A `1 × 1` grid samples the window centre.
pub fn resolvent_levelgrid(b: &MaterialBounds, window: &SearchRect, nx: usize, ny: usize) -> LevelGrid {
    let re = axis(window.re_lo(), window.re_hi(), nx.max(1));
    let im = axis(window.im_lo(), window.im_hi(), ny.max(1));
    let values = im
        .par_iter()
        .map(|&y| re.iter().map(|&x| resolvent_bound(Complex64::new(x, y), b)).collect())
        .collect();
    LevelGrid { re, im, values }
}

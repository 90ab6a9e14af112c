//! Run configuration: command-line flags layered over an optional JSON file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Args;
use maxspec_core::{Error, MaterialBounds, RootFinderOptions, SearchRect, Variant, WaveguideModel};
use serde::Deserialize;

/// Current version of the JSON configuration format.
pub const SCHEMA_VERSION: u32 = 1;

/// Every tunable of every command. Each field may come from a flag or from
/// the `--config` file; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Configuration format version; must be 1 when given.
    #[arg(skip)]
    pub schema: Option<u32>,

    /// Command the file was written for; must match the subcommand.
    #[arg(skip)]
    pub command: Option<String>,

    /// Slab material: `conductive` (σ = 1) or `permittivity` (ε = 1 + δ).
    #[arg(long)]
    pub variant: Option<String>,

    /// Permittivity contrast δ in the slab (permittivity variant).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,

    /// Cross-section width in x2.
    #[arg(long = "L2", allow_negative_numbers = true)]
    #[serde(rename = "L2")]
    pub l2: Option<f64>,

    /// Cross-section width in x3.
    #[arg(long = "L3", allow_negative_numbers = true)]
    #[serde(rename = "L3")]
    pub l3: Option<f64>,

    /// Truncation length X of the guide.
    #[arg(long = "X", allow_negative_numbers = true)]
    #[serde(rename = "X")]
    pub x: Option<f64>,

    /// Truncation lengths of a sweep, ascending.
    #[arg(long = "X-list", num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(rename = "X_list")]
    pub x_list: Option<Vec<f64>>,

    /// Real range of the search rectangle or plotting window.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub re: Option<Vec<f64>>,

    /// Imaginary range of the search rectangle or plotting window.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub im: Option<Vec<f64>>,

    /// Do not add the mirror image `−conj` of the search rectangle.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_mirror: Option<bool>,

    /// Largest mode constant π²n2²/L2² + π²n3²/L3² to include.
    #[arg(long)]
    pub c_max: Option<f64>,

    /// Keep only roots of one sign branch of the half-infinite relation.
    #[arg(long, value_parser = ["plus", "minus", "any"])]
    pub branch: Option<String>,

    /// Newton residual tolerance of the root finder.
    #[arg(long)]
    pub residual_tol: Option<f64>,

    /// Classification distance for pollution reports.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Convergence tolerance for trajectory limits.
    #[arg(long)]
    pub converge_tol: Option<f64>,

    /// Linking radius between consecutive truncation lengths.
    #[arg(long)]
    pub match_radius: Option<f64>,

    /// Lower bound of the permittivity ε (enclosure commands; defaults from the model).
    #[arg(long)]
    pub eps_min: Option<f64>,
    /// Upper bound of the permittivity ε.
    #[arg(long)]
    pub eps_max: Option<f64>,
    /// Lower bound of the permeability μ.
    #[arg(long)]
    pub mu_min: Option<f64>,
    /// Upper bound of the permeability μ.
    #[arg(long)]
    pub mu_max: Option<f64>,
    /// Lower bound of the conductivity σ.
    #[arg(long)]
    pub sigma_min: Option<f64>,
    /// Upper bound of the conductivity σ.
    #[arg(long)]
    pub sigma_max: Option<f64>,
    /// Curl-curl spectral bound `λ_min` of the cross-section (0: no gap).
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Curl-curl spectral bound `λ_e_min` of the cross-section.
    #[arg(long)]
    pub lambda_e_min: Option<f64>,

    /// Grid points along Re.
    #[arg(long)]
    pub nx: Option<usize>,

    /// Grid points along Im.
    #[arg(long)]
    pub ny: Option<usize>,

    /// Number of boundary-curve samples.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Seed for the randomised appendix checks.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output file (CSV commands) or directory (`figure-data`).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

macro_rules! layer {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

/// A validation failure, reported with exit code 1.
#[derive(Debug)]
pub struct Invalid(pub String);

impl From<Error> for Invalid {
    fn from(e: Error) -> Self {
        Invalid(e.to_string())
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, Invalid> {
    Err(Invalid(msg.into()))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Invalid> {
        let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("--config {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Invalid(format!("--config {}: {e}", path.display())))?;
        match cfg.schema {
            Some(SCHEMA_VERSION) => Ok(cfg),
            Some(v) => invalid(format!("--config: unsupported schema {v} (expected {SCHEMA_VERSION})")),
            None => invalid(format!("--config: missing \"schema\": {SCHEMA_VERSION}")),
        }
    }

    /// Fill every unset field of `self` from `file`.
    pub fn layered_over(mut self, file: Self, command: &str) -> Result<Self, Invalid> {
        if let Some(c) = &file.command {
            if c != command {
                return invalid(format!("--config was written for `{c}`, not `{command}`"));
            }
        }
        layer!(self, file; schema, variant, delta, l2, l3, x, x_list, re, im, no_mirror, c_max, branch,
            residual_tol, tol, converge_tol, match_radius, eps_min, eps_max, mu_min, mu_max, sigma_min,
            sigma_max, lambda_min, lambda_e_min, nx, ny, samples, seed, out);
        Ok(self)
    }

    fn positive(v: Option<f64>, default: f64, flag: &str) -> Result<f64, Invalid> {
        let v = v.unwrap_or(default);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            invalid(format!("--{flag} must be positive and finite, got {v}"))
        }
    }

    pub fn model(&self) -> Result<WaveguideModel, Invalid> {
        let l2 = Self::positive(self.l2, 1.0, "L2")?;
        let l3 = Self::positive(self.l3, 2.0, "L3")?;
        let variant = match self.variant.as_deref().unwrap_or("conductive") {
            "conductive" => {
                if self.delta.is_some() {
                    return invalid("--delta applies only to --variant permittivity");
                }
                Variant::Conductive
            }
            "permittivity" => Variant::Permittivity { delta: Self::positive(self.delta, 10.0, "delta")? },
            other => return invalid(format!("--variant must be `conductive` or `permittivity`, got `{other}`")),
        };
        Ok(WaveguideModel::new(l2, l3, variant)?)
    }

    pub fn truncated_model(&self) -> Result<WaveguideModel, Invalid> {
        let Some(x) = self.x else {
            return invalid("--X is required (truncation length, must exceed 1)");
        };
        self.model()?.truncated(x).map_err(|e| Invalid(format!("--X: {e}")))
    }

    fn range(v: &Option<Vec<f64>>, flag: &str) -> Result<Option<(f64, f64)>, Invalid> {
        match v.as_deref() {
            None => Ok(None),
            Some([lo, hi]) if lo.is_finite() && hi.is_finite() && lo < hi => Ok(Some((*lo, *hi))),
            Some(other) => invalid(format!("--{flag} needs two finite values LO < HI, got {other:?}")),
        }
    }

    /// Search rectangle for eigenvalue commands. Defaults: the conductive
    /// field `[0.05, 8] × [−0.55, −0.005]`; for the permittivity guide the
    /// real gap `[0.01, π/L − 10⁻⁴] × [−10⁻⁶, 10⁻⁶]`.
    pub fn search_rect(&self, model: &WaveguideModel) -> Result<SearchRect, Invalid> {
        let (dre, dim) = match model.variant {
            Variant::Conductive => ((0.05, 8.0), (-0.55, -0.005)),
            Variant::Permittivity { .. } => ((0.01, PI / model.l_max() - 1e-4), (-1e-6, 1e-6)),
        };
        let (a, b) = Self::range(&self.re, "re")?.unwrap_or(dre);
        let (c, d) = Self::range(&self.im, "im")?.unwrap_or(dim);
        Ok(SearchRect::new(a, b, c, d)?)
    }

    /// Plotting window for grids; defaults to `[−3, 3] × [−5, 0]`.
    pub fn window(&self) -> Result<SearchRect, Invalid> {
        let (a, b) = Self::range(&self.re, "re")?.unwrap_or((-3.0, 3.0));
        let (c, d) = Self::range(&self.im, "im")?.unwrap_or((-5.0, 0.0));
        Ok(SearchRect::new(a, b, c, d)?)
    }

    pub fn mirror(&self) -> bool {
        !self.no_mirror.unwrap_or(false)
    }

    pub fn options(&self) -> Result<RootFinderOptions, Invalid> {
        let mut o = RootFinderOptions::default();
        o.residual_tol = Self::positive(self.residual_tol, o.residual_tol, "residual-tol")?;
        Ok(o)
    }

    pub fn c_max(&self) -> Result<Option<f64>, Invalid> {
        self.c_max.map(|c| Self::positive(Some(c), 0.0, "c-max")).transpose()
    }

    pub fn branch(&self) -> Option<i8> {
        match self.branch.as_deref() {
            Some("plus") => Some(1),
            Some("minus") => Some(-1),
            _ => None,
        }
    }

    pub fn x_list(&self) -> Result<Vec<f64>, Invalid> {
        let xs = self.x_list.clone().unwrap_or_else(|| vec![10.0, 20.0, 40.0, 80.0]);
        if xs.len() < 2 {
            return invalid("--X-list needs at least two truncation lengths");
        }
        if xs.iter().any(|x| !(x.is_finite() && *x > 1.0)) || xs.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("--X-list must be strictly increasing with every X > 1, got {xs:?}"));
        }
        Ok(xs)
    }

    pub fn tol(&self) -> Result<f64, Invalid> {
        Self::positive(self.tol, 1e-3, "tol")
    }

    pub fn converge_tol(&self) -> Result<f64, Invalid> {
        Self::positive(self.converge_tol, 1e-3, "converge-tol")
    }

    pub fn match_radius(&self) -> Result<f64, Invalid> {
        Self::positive(self.match_radius, maxspec_core::waveguide::DEFAULT_MATCH_RADIUS, "match-radius")
    }

    /// Material bounds: explicit flags over the bounds of the chosen guide.
    pub fn material(&self) -> Result<MaterialBounds, Invalid> {
        let base = self.model()?.material_bounds();
        let b = MaterialBounds {
            eps_min: self.eps_min.unwrap_or(base.eps_min),
            eps_max: self.eps_max.unwrap_or(base.eps_max),
            mu_min: self.mu_min.unwrap_or(base.mu_min),
            mu_max: self.mu_max.unwrap_or(base.mu_max),
            sigma_min: self.sigma_min.unwrap_or(base.sigma_min),
            sigma_max: self.sigma_max.unwrap_or(base.sigma_max),
            lambda_min: self.lambda_min.unwrap_or(base.lambda_min),
            lambda_e_min: self.lambda_e_min.unwrap_or(base.lambda_e_min),
        };
        b.validate().map_err(|e| Invalid(format!("material bounds (--eps-min … --lambda-e-min): {e}")))?;
        Ok(b)
    }

    pub fn count(v: Option<usize>, default: usize, min: usize, flag: &str) -> Result<usize, Invalid> {
        let n = v.unwrap_or(default);
        if n < min {
            return invalid(format!("--{flag} must be at least {min}, got {n}"));
        }
        Ok(n)
    }
}

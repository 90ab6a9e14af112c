use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `s` lies within the pole-exclusion radius of `-k²π²`.
    #[error("argument {s} is within the exclusion radius of the pole -{k}^2 pi^2")]
    PoleProximity { s: Complex64, k: u64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate search rectangle [{re_lo}, {re_hi}] x [{im_lo}, {im_hi}]")]
    DegenerateRect {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
    },

    /// The function came too close to zero (or to a listed pole) on the
    /// contour used for counting.
    #[error("zero or pole too close to the contour near {at}")]
    BoundaryHit { at: Complex64 },

    #[error("Newton polishing failed to converge in a cell centred at {center} (best residual {residual:e})")]
    NonConvergence { center: Complex64, residual: f64 },

    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("no root satisfies |Re| >= {re_min}")]
    NoQualifyingRoots { re_min: f64 },

    #[error("adaptive quadrature did not reach the requested tolerance (estimate {estimate:e})")]
    QuadratureFailure { estimate: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} = {z}")))
    }
}

pub(crate) fn ensure_positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {x}")))
    }
}

//! Spectral computations for the dissipative Maxwell pencil on rectangular
//! cylinders `(0, ∞) × (0, L2) × (0, L3)` and their truncations
//! `(0, X) × (0, L2) × (0, L3)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: branch-stable `z coth z` evaluation and the per-mode
//!   dispersion relations.
//! - [`rootfind`]: argument-principle zero counting with pole correction,
//!   adaptive subdivision and Newton polishing.
//! - [`enclosure`] and [`resolvent`]: closed-form spectral enclosures,
//!   thresholds and resolvent-norm bounds in terms of coefficient bounds.
//! - [`spectra`]: exact symbolic spectrum sets (rays, imaginary intervals,
//!   isolated points) with membership and distance queries.
//! - [`waveguide`]: mode enumeration, eigenvalue solves for the half-infinite
//!   and truncated guides, truncation sweeps and pollution classification.
//! - [`appendix`]: Dirichlet-to-Neumann sign analysis, Weyl-sequence decay and
//!   the Fourier-symbol determinant identity.
//! - [`export`]: CSV/JSON writers shared by the command-line tool.

// `!(a < b)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appendix;
pub mod enclosure;
pub mod error;
pub mod export;
pub mod resolvent;
pub mod rootfind;
pub mod specfun;
pub mod spectra;
pub mod waveguide;

pub use num_complex::Complex64;

pub use appendix::{CheckReport, DtNEntry, SignPattern};
pub use enclosure::{MaterialBounds, ThresholdCase};
pub use error::{Error, Result};
pub use rootfind::{Pole, PoleList, Root, RootFinderOptions, SearchRect};
pub use specfun::{ComplexPoint, ModeConstant};
pub use spectra::{Endpoint, SpectrumSet, Surd};
pub use waveguide::{Classification, ModeGroup, PollutionReport, Sweep, Trajectory, Variant, WaveguideModel};

//! Numerical study of Kähler angles along immersions.
//!
//! The library works with an immersion `F: M^{2n} -> N` of an even-dimensional
//! manifold into a Kähler manifold of complex dimension `2n`, all given in a
//! single chart. The pulled-back Kähler form is polar-decomposed against the
//! induced metric, which yields the Kähler-angle cosines
//! `cos θ_1 ≥ … ≥ cos θ_n ≥ 0`, the partial isometry `J_ω`, and the
//! logarithmic angle functional
//! `κ = Σ_α log((1 + cos θ_α)/(1 − cos θ_α))`.
//!
//! On top of that the crate provides finite-difference calculus on `M`
//! (differentials, Laplace–Beltrami, frame connection coefficients) and a set
//! of identity checks relating derivatives of `κ` to ambient curvature, e.g.
//! that `Δκ = −2R Σ_α cos θ_α` for broadly-pluriminimal immersions into
//! Kähler–Einstein targets.
//!
//! Everything here is `no_std` (with `alloc`); IO, file formats and the CLI
//! live in the companion `kahler-lens-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ambient;
pub mod angles;
pub mod calculus;
pub mod catalog;
pub mod identities;
pub mod immersion;
pub mod linalg;

use alloc::string::String;
use core::fmt;

pub use ambient::AmbientSpace;
pub use angles::{AdaptedFrame, AngleSpectrum};
pub use calculus::FdScheme;
pub use identities::{IdentityReport, Verdict};
pub use immersion::Immersion;

/// Numerical thresholds shared across the pipeline.
///
/// The defaults are deliberate and match the tolerances the identity checks
/// and acceptance tests are calibrated for; individual fields can be
/// overridden (e.g. from CLI flags).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Below this, a singular value / angle cosine counts as zero (kernel).
    pub rank: f64,
    /// Within this of 1, an angle cosine counts as a complex direction.
    pub complex: f64,
    /// Maximum allowed mismatch between the two members of a doubled
    /// eigenvalue pair of `|F*ω|`.
    pub pairing: f64,
    /// Residual threshold for algebraic identities (no finite differences).
    pub algebraic: f64,
    /// Residual threshold for identities involving finite differences.
    pub finite_diff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-8,
            complex: 1e-8,
            pairing: 1e-8,
            algebraic: 1e-5,
            finite_diff: 1e-3,
        }
    }
}

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// A point fell outside the chart domain of the ambient space or of the
    /// immersion.
    OutsideChart { what: &'static str },
    /// A matrix expected to be symmetric positive definite was not.
    NotPositiveDefinite { what: &'static str },
    /// The differential of the immersion is (numerically) rank deficient.
    DegenerateDifferential { singular_value_ratio: f64 },
    /// An operation that requires `cos θ < 1` hit a complex direction.
    ComplexDirection { cosine: f64 },
    /// The doubled eigenvalues of `|F*ω|` failed to pair up.
    EigenvaluePairing { residual: f64 },
    /// A smooth frame could not be continued from the base point
    /// (eigenvalue collision or rank change along the stencil).
    FrameContinuation { reason: String },
    /// The rank of `F*ω` is not constant over the sampled points, so a
    /// stratum-interior computation does not apply.
    RankNotConstant { expected: usize, found: usize },
    /// Mismatched dimensions between arguments.
    DimensionMismatch { expected: usize, found: usize },
    /// Catalog id not recognised.
    UnknownCatalogId(String),
    /// A catalog parameter was missing or out of range.
    InvalidParameter { name: &'static str, reason: String },
    /// A constructed catalog immersion failed its own certification.
    Certification {
        entry: &'static str,
        property: &'static str,
        residual: f64,
    },
    /// The requested operation needs a different domain dimension
    /// (e.g. the wedge-square sign split exists only for `n = 2`).
    UnsupportedDimension { needs: &'static str },
    /// Adaptive quadrature failed to reach the requested tolerance.
    Quadrature { achieved: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::OutsideChart { what } => {
                write!(f, "point lies outside the chart domain of {what}")
            }
            GeometryError::NotPositiveDefinite { what } => {
                write!(f, "{what} is not symmetric positive definite")
            }
            GeometryError::DegenerateDifferential { singular_value_ratio } => write!(
                f,
                "differential is numerically rank deficient (σ_min/σ_max = {singular_value_ratio:.3e})"
            ),
            GeometryError::ComplexDirection { cosine } => write!(
                f,
                "undefined at a complex direction (cos θ = {cosine:.12})"
            ),
            GeometryError::EigenvaluePairing { residual } => write!(
                f,
                "eigenvalues of |F*ω| failed to pair up (residual {residual:.3e})"
            ),
            GeometryError::FrameContinuation { reason } => {
                write!(f, "frame continuation failed: {reason}")
            }
            GeometryError::RankNotConstant { expected, found } => write!(
                f,
                "rank of F*ω changed across sample points (expected {expected}, found {found})"
            ),
            GeometryError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            GeometryError::UnknownCatalogId(id) => write!(f, "unknown catalog id `{id}`"),
            GeometryError::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            GeometryError::Certification { entry, property, residual } => write!(
                f,
                "catalog entry `{entry}` failed certification of `{property}` (residual {residual:.3e})"
            ),
            GeometryError::UnsupportedDimension { needs } => {
                write!(f, "operation requires {needs}")
            }
            GeometryError::Quadrature { achieved } => write!(
                f,
                "adaptive quadrature stalled at tolerance {achieved:.3e}"
            ),
        }
    }
}

impl core::error::Error for GeometryError {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, GeometryError>;

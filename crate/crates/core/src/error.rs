//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the line-space, congruence, focal and reflection routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The oriented line points (numerically) straight down and falls outside
    /// the single coordinate chart used throughout the crate.
    #[error("ray leaves the coordinate chart (direction is south-pointing, |xi| = {0:e})")]
    ChartExit(f64),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A parameter is outside the domain of the requested formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The optical scalars blow up: the requested affine parameter is a focal point.
    #[error("focal point: optical scalar denominator {denominator:e} vanishes at r = {r}")]
    FocalPoint { r: f64, denominator: f64 },

    /// Central differences need a margin of at least `h` inside the chart domain.
    #[error("parameter {mu} is closer than {h:e} to the chart domain boundary")]
    DomainMargin { mu: String, h: f64 },

    /// Path integrals of the support gradient disagree: the congruence is twisted.
    #[error("support function is not integrable (path discrepancy {0:e})")]
    NonIntegrable(f64),

    /// No intersection of an incoming ray with a mirror patch.
    #[error("ray does not intersect the mirror")]
    NoIntersection,

    /// Rays parallel to the cylinder axis are rejected by the cylinder formulas.
    #[error("ray is parallel to the cylinder axis (xi = 0)")]
    VerticalRay,

    /// Two derivative vectors of a sampled surface are (nearly) parallel.
    #[error("surface is not immersed at the requested parameters")]
    DegenerateImmersion,

    /// A level set could not be extracted because height is not monotone.
    #[error("slicing failed: {0}")]
    Slicing(String),

    /// A precondition on focal-pair geometry does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Geometric optics in the space of oriented lines.
//!
//! Rays are points `(ξ, η)` of the space of oriented lines in R³. A family of
//! rays (a line congruence) focuses where its optical scalars blow up; this
//! crate computes those focal sets, reflects congruences off mirrors, and
//! checks the results against plain vector ray tracing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod congruence;
pub mod error;
pub mod focal;
pub mod line_space;
pub mod oracle;
pub mod reflection;
pub mod sampling;
pub mod scenarios;
pub mod wirtinger;

pub use error::{Error, Result};

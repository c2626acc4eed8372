//! Finite-dimensional real normed spaces described by their unit balls.

mod normed;
mod spec;
mod validate;

pub use normed::{gauge_lp, support_lp, NormedSpace, VERTEX_DIM_BUDGET};
pub use spec::{Exponent, Facet, SpaceFile, SpaceSpec};
pub use validate::{validate, ValidationReport, Violation};

//! Slice geometry of finite-dimensional normed spaces.
//!
//! The crate computes slice diameters of unit balls, the midpoint sets
//! `S^a(X) = {(x + y)/2 : x, y in B_X, ||x - y|| >= a}`, distances to their
//! n-term convex hulls, the quantity `C_n^a(X) = sup_{x in S_X} d(x, S_n^a(X))`
//! and its decay in `n`, together with a small L1 sandbox of dyadic step
//! functions for the convergence-in-measure metric.

pub mod budget;
pub mod criterion;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod midpoints;
pub mod optim;
pub mod par;
pub mod polytope;
pub mod rng;
pub mod sandbox;
pub mod slices;
pub mod space;

pub use budget::SolverBudget;
pub use error::{Error, Result};
pub use space::{NormedSpace, SpaceSpec};

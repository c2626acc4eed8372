use thiserror::Error;

use crate::space::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector has zero norm")]
    ZeroVector,
    #[error("space is not polytopal: {0}")]
    NotPolytopal(String),
    #[error("dimension {dim} exceeds the vertex-enumeration budget {budget}")]
    DimensionBudgetExceeded { dim: usize, budget: usize },
    #[error("invalid space specification: {0}")]
    InvalidSpace(ValidationReport),
    #[error("functional is zero")]
    ZeroFunctional,
    #[error("slice depth {0} outside (0, 2]")]
    DepthOutOfRange(f64),
    #[error("slice contains no feasible point")]
    EmptySlice,
    #[error("no separating slice found: gap {gap:.3e} below margin {margin:.3e}")]
    NotSeparated { gap: f64, margin: f64 },
    #[error("no spread witness found within budget")]
    NotFound,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("point has norm {0} > 1")]
    InvalidPoint(f64),
    #[error("unsupported space for this operation: {0}")]
    UnsupportedSpace(String),
    #[error("resolution {0} below the minimum 64")]
    ResolutionTooLow(usize),
    #[error("degenerate component: {0} part is zero")]
    DegenerateComponent(&'static str),
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: f64, right: f64 },
    #[error("profile has no column at n = {0}")]
    MissingStabilizedColumn(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("step-function grids incompatible: {0}")]
    GridIncompatible(String),
    #[error("support {0} is not a dyadic 2^-j with j >= 1")]
    NonDyadicSupport(f64),
    #[error("product grid too large: {0}")]
    GridTooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear program failed: {0}")]
    Lp(String),
}

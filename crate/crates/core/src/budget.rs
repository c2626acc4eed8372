use serde::{Deserialize, Serialize};

/// Search budgets and tolerances shared by the solvers. Every output that
/// depends on a budget records it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverBudget {
    pub seed: u64,
    /// Random sphere points (beyond ball vertices) for suprema over `S_X`.
    pub samples: usize,
    /// Independent starts of every multi-start search.
    pub starts: usize,
    /// Local-search iterations per start.
    pub iterations: usize,
    /// Angular / boundary grid resolution.
    pub resolution: usize,
    /// Minimum detected gap before a separation is reported.
    pub margin: f64,
    /// Dimension budget for exact vertex enumeration.
    pub vertex_dim: usize,
    /// Maximum number of exact subset LPs in the midpoint-hull solver.
    pub subset_limit: usize,
    /// Cap on column-generation rounds.
    pub max_columns: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 64,
            starts: 8,
            iterations: 400,
            resolution: 720,
            margin: 1e-4,
            vertex_dim: 8,
            subset_limit: 4096,
            max_columns: 200,
        }
    }
}

impl SolverBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

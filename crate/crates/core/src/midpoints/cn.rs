use serde::{Deserialize, Serialize};

use crate::budget::SolverBudget;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, scale};
use crate::par;
use crate::space::NormedSpace;

use super::hull::{dist_with_set, HullDistance, HullMethod};
use super::support::MidpointSet;
use super::oracle::oracle_dist_2d;
use super::{check_alpha, MidpointCombination};

/// Estimate of `C_n^alpha(X) = sup_{x in S_X} d(x, conv_n S^alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnAlphaEstimate {
    pub n: usize,
    pub alpha: f64,
    /// Largest distance attained over the sample.
    pub value: f64,
    /// Certified lower bound on the supremum.
    pub lower: Option<f64>,
    /// Certified upper bound, available when the supremum is provably
    /// attained on the sample (polytopal balls, full hull).
    pub upper: Option<f64>,
    pub argmax: Vec<f64>,
    pub witness: MidpointCombination,
    pub method: HullMethod,
    pub samples: usize,
    pub budget: SolverBudget,
}

pub fn cn_alpha(space: &NormedSpace, n: usize, alpha: f64, budget: &SolverBudget) -> Result<CnAlphaEstimate> {
    cn_alpha_warm(space, n, alpha, budget, None).map(|(e, _)| e)
}

/// As [`cn_alpha`], with per-sample warm starts, returning the per-sample
/// witnesses in sample order for reuse at neighbouring `(n, alpha)`.
///
/// The sample (ball vertices up to sign, then random sphere points) depends
/// only on the space and the budget, so warm starts line up across calls.
pub fn cn_alpha_warm(
    space: &NormedSpace,
    n: usize,
    alpha: f64,
    budget: &SolverBudget,
    warm: Option<&[Vec<MidpointCombination>]>,
) -> Result<(CnAlphaEstimate, Vec<MidpointCombination>)> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let set = MidpointSet::new(space, alpha, budget)?;
    let points = sample_points(space, budget);
    let results: Vec<Result<HullDistance>> = par::map(points.len(), |i| {
        let w = warm.and_then(|w| w.get(i)).map(Vec::as_slice).unwrap_or(&[]);
        dist_with_set(&set, &points[i], n, w)
    });
    let results: Vec<HullDistance> = results.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let best = par::argmax(&values).expect("nonempty sample");

    let mut lower = results.iter().filter_map(|r| r.lower).reduce(f64::max);
    if space.dim() == 2 {
        if let Ok(b) = oracle_dist_2d(space, &points[best], n, alpha, budget.resolution) {
            lower = Some(lower.map_or(b.lower, |l| l.max(b.lower)));
        }
    }
    let n_eff = n.min(space.dim() + 1);
    let vertices_sampled = space.ball_vertices_within(budget.vertex_dim).is_ok();
    let upper = (vertices_sampled && n_eff == space.dim() + 1 && results.iter().all(|r| r.exact))
        .then(|| values[best] + 1e-8);

    let estimate = CnAlphaEstimate {
        n,
        alpha,
        value: values[best],
        lower,
        upper,
        argmax: points[best].clone(),
        witness: results[best].witness.clone(),
        method: results[best].method,
        samples: points.len(),
        budget: budget.clone(),
    };
    Ok((estimate, results.into_iter().map(|r| r.witness).collect()))
}

/// Ball vertices and random sphere points, one representative per `±x`
/// (every `conv_n S^alpha` is symmetric).
pub fn sample_points(space: &NormedSpace, budget: &SolverBudget) -> Vec<Vec<f64>> {
    let verts = space.ball_vertices_within(budget.vertex_dim).map(|v| v.len()).unwrap_or(0);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in space.sphere_sample(budget.seed, verts + budget.samples) {
        let p = canonical(p);
        if !out.iter().any(|q| max_abs_diff(q, &p) <= 1e-12) {
            out.push(p);
        }
    }
    out
}

fn canonical(p: Vec<f64>) -> Vec<f64> {
    match p.iter().find(|c| c.abs() > 1e-12) {
        Some(c) if *c < 0.0 => scale(&p, -1.0),
        _ => p,
    }
}

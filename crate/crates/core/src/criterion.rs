//! Decay of `C_n^alpha` in `n` and the finite surrogates for the uniform
//! criterion over single spaces and sequences of spaces.

use serde::{Deserialize, Serialize};

use crate::budget::SolverBudget;
use crate::error::{Error, Result};
use crate::midpoints::{cn_alpha_warm, CnAlphaEstimate, MidpointCombination};
use crate::space::NormedSpace;

pub const DEFAULT_THETA: f64 = 1e-2;
pub const DEFAULT_DENSITY_CUT: f64 = 0.95;

/// `C_n^alpha` over an `alpha x n` grid. Rows follow `alphas`, columns `ns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub space_id: String,
    pub dim: usize,
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub estimates: Vec<Vec<CnAlphaEstimate>>,
    pub raw: Vec<Vec<f64>>,
    /// Running minimum of `raw` along `n`.
    pub cleaned: Vec<Vec<f64>>,
}

impl DecayProfile {
    pub fn alpha_index(&self, alpha: f64) -> Option<usize> {
        self.alphas.iter().position(|a| (a - alpha).abs() <= 1e-12)
    }

    pub fn n_index(&self, n: usize) -> Option<usize> {
        self.ns.iter().position(|&m| m == n)
    }
}

/// Computes `C_n^alpha` for `n = 1..=nmax` and every alpha.
///
/// Levels are processed from the largest down and `n` upward; each cell is
/// warm-started from the witnesses of its left and upper neighbours (a pair
/// separated at a larger level is admissible at a smaller one, and an
/// `(n-1)`-term combination is an `n`-term one), so per-sample distances are
/// monotone across the grid. Columns beyond `dim + 1` repeat the `dim + 1`
/// column.
pub fn decay_profile(
    space: &NormedSpace,
    space_id: &str,
    alphas: &[f64],
    nmax: usize,
    budget: &SolverBudget,
) -> Result<DecayProfile> {
    if nmax < 2 {
        return Err(Error::InvalidArgument(format!("nmax must be at least 2, got {nmax}")));
    }
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a <= 2.0)) {
        return Err(Error::InvalidArgument("alphas must be nonempty and lie in (0, 2]".into()));
    }
    let d = space.dim();
    let ns: Vec<usize> = (1..=nmax).collect();
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&i, &j| alphas[j].total_cmp(&alphas[i]).then(i.cmp(&j)));

    let mut estimates: Vec<Vec<Option<CnAlphaEstimate>>> = vec![vec![None; nmax]; alphas.len()];
    let mut above: Option<Vec<Vec<MidpointCombination>>> = None;
    for &ai in &order {
        let mut row_witnesses: Vec<Vec<MidpointCombination>> = Vec::new();
        let mut left: Option<Vec<MidpointCombination>> = None;
        for n in 1..=nmax {
            if n > d + 1 {
                let mut e = estimates[ai][d].clone().expect("stabilized column");
                e.n = n;
                estimates[ai][n - 1] = Some(e);
                continue;
            }
            let warm = merge_warm(left.as_ref(), above.as_ref().and_then(|a| a.get(n - 1)));
            let (est, per_sample) = cn_alpha_warm(space, n, alphas[ai], budget, warm.as_deref())?;
            estimates[ai][n - 1] = Some(est);
            row_witnesses.push(per_sample.clone());
            left = Some(per_sample);
        }
        above = Some(row_witnesses);
    }
    let estimates: Vec<Vec<CnAlphaEstimate>> =
        estimates.into_iter().map(|r| r.into_iter().map(|e| e.expect("filled")).collect()).collect();
    let raw: Vec<Vec<f64>> = estimates.iter().map(|r| r.iter().map(|e| e.value).collect()).collect();
    let cleaned = raw.iter().map(|r| running_min(r)).collect();
    Ok(DecayProfile { space_id: space_id.into(), dim: d, alphas: alphas.to_vec(), ns, estimates, raw, cleaned })
}

fn merge_warm(
    left: Option<&Vec<MidpointCombination>>,
    above: Option<&Vec<MidpointCombination>>,
) -> Option<Vec<Vec<MidpointCombination>>> {
    let count = left.map_or(0, Vec::len).max(above.map_or(0, Vec::len));
    if count == 0 {
        return None;
    }
    Some(
        (0..count)
            .map(|i| left.and_then(|l| l.get(i)).into_iter().chain(above.and_then(|a| a.get(i))).cloned().collect())
            .collect(),
    )
}

pub fn running_min(values: &[f64]) -> Vec<f64> {
    let mut m = f64::INFINITY;
    values
        .iter()
        .map(|v| {
            m = m.min(*v);
            m
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedFailure,
    ConsistentWithUniform,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub alpha: f64,
    pub n: usize,
    pub value: f64,
    pub certified_lower: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub space: String,
    pub theta: f64,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
}

/// Reads the stabilized column `n = dim + 1`, which equals the limit in `n`
/// for a `dim`-dimensional space.
pub fn uniform_verdict(profile: &DecayProfile, theta: f64) -> Result<VerdictReport> {
    let n = profile.dim + 1;
    let j = profile.n_index(n).ok_or(Error::MissingStabilizedColumn(n))?;
    let evidence: Vec<Evidence> = profile
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| Evidence {
            alpha,
            n,
            value: profile.cleaned[i][j],
            certified_lower: profile.estimates[i][j].lower,
        })
        .collect();
    let verdict = if evidence.iter().any(|e| e.certified_lower.is_some_and(|l| l > theta)) {
        Verdict::CertifiedFailure
    } else if evidence.iter().all(|e| e.value < theta) {
        Verdict::ConsistentWithUniform
    } else {
        Verdict::Inconclusive
    };
    Ok(VerdictReport { space: profile.space_id.clone(), theta, verdict, evidence })
}

/// Finite stand-in for membership in a free ultrafilter over the sampled
/// index range `0..K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FilterSurrogate {
    /// The set contains the tail `{k : k >= K/2}`.
    Frechet,
    /// The set holds at least a `cut` fraction of the indices.
    Density { cut: f64 },
}

impl FilterSurrogate {
    pub fn is_large(&self, members: &[bool]) -> bool {
        let k = members.len();
        if k == 0 {
            return false;
        }
        match self {
            Self::Frechet => members[k / 2..].iter().all(|&m| m),
            Self::Density { cut } => members.iter().filter(|&&m| m).count() as f64 >= cut * k as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub delta: f64,
    /// Least `n` whose index set is large, if any.
    pub n: Option<usize>,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub surrogate: FilterSurrogate,
    pub alpha: f64,
    pub eps: f64,
    pub rows: Vec<SequenceRow>,
    /// Every delta admits some `n` on the sampled range.
    pub satisfied: bool,
}

/// For each delta, the least `n` such that `{k : C_n^{alpha - eps}(X_k) < delta}`
/// is large for the surrogate.
pub fn sequence_criterion(
    profiles: &[DecayProfile],
    alpha: f64,
    eps: f64,
    deltas: &[f64],
    surrogate: FilterSurrogate,
) -> Result<SequenceReport> {
    let first = profiles.first().ok_or_else(|| Error::GridMismatch("no profiles".into()))?;
    if !(eps > 0.0 && eps < alpha) {
        return Err(Error::InvalidArgument(format!("need 0 < eps < alpha, got {eps}, {alpha}")));
    }
    let level = alpha - eps;
    let mut rows_at = Vec::with_capacity(profiles.len());
    for (k, p) in profiles.iter().enumerate() {
        if p.ns != first.ns {
            return Err(Error::GridMismatch(format!("profile {k} has a different n grid")));
        }
        let i = p
            .alpha_index(level)
            .ok_or_else(|| Error::GridMismatch(format!("profile {k} lacks alpha = {level}")))?;
        rows_at.push(i);
    }
    let rows: Vec<SequenceRow> = deltas
        .iter()
        .map(|&delta| {
            for (j, &n) in first.ns.iter().enumerate() {
                let members: Vec<bool> =
                    profiles.iter().zip(&rows_at).map(|(p, &i)| p.cleaned[i][j] < delta).collect();
                if surrogate.is_large(&members) {
                    let indices = members.iter().enumerate().filter(|(_, &m)| m).map(|(k, _)| k).collect();
                    return SequenceRow { delta, n: Some(n), indices };
                }
            }
            SequenceRow { delta, n: None, indices: Vec::new() }
        })
        .collect();
    let satisfied = rows.iter().all(|r| r.n.is_some());
    Ok(SequenceReport { surrogate, alpha, eps, rows, satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_minimum() {
        assert_eq!(running_min(&[1.0, 0.5, 0.6, 0.4]), vec![1.0, 0.5, 0.5, 0.4]);
    }

    #[test]
    fn surrogates() {
        let m = [false, true, true, true];
        assert!(FilterSurrogate::Frechet.is_large(&m));
        assert!(!FilterSurrogate::Density { cut: 0.95 }.is_large(&m));
        assert!(FilterSurrogate::Density { cut: 0.75 }.is_large(&m));
        assert!(!FilterSurrogate::Frechet.is_large(&[true, true, false]));
    }
}

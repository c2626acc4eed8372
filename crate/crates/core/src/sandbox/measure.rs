use serde::Serialize;

use super::{neumaier, StepFunction};
use crate::error::{Error, Result};

/// Slack for inequality checks on non-dyadic inputs.
const CHECK_TOL: f64 = 1e-12;

pub fn l1_norm(f: &StepFunction) -> f64 {
    neumaier(f.values().iter().map(|v| v.abs())) * f.cell_measure()
}

/// `inf {e > 0 : mu(|f - g| >= e) <= e}`, exact on the common grid.
///
/// The tail measure is constant on each interval between consecutive distinct
/// values of `|f - g|`, so the infimum is either such a value or the tail
/// measure itself.
pub fn dm(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    let h = f.sub(g)?;
    let cell = h.cell_measure();
    let mut vals: Vec<f64> = h.values().iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
    if vals.is_empty() {
        return Ok(0.0);
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    // (value, mu(|h| >= value)) for distinct values, descending
    let mut levels: Vec<(f64, f64)> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        let tail = (i + 1) as f64 * cell;
        match levels.last_mut() {
            Some(last) if last.0 == *v => last.1 = tail,
            _ => levels.push((*v, tail)),
        }
    }
    for i in (0..levels.len()).rev() {
        let (v, tail) = levels[i];
        let below = levels.get(i + 1).map_or(0.0, |l| l.0);
        if tail <= v {
            return Ok(tail.max(below));
        }
    }
    Ok(levels[0].0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingCheck {
    pub index: usize,
    pub lambda: f64,
    /// `d_m(lambda f, 0)`
    pub lhs: f64,
    /// `d_m(f, 0)`
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalculusReport {
    /// `d_m(sum f_i, 0)`
    pub sum_dm: f64,
    /// `sum d_m(f_i, 0)`
    pub dm_sum: f64,
    pub subadditivity_margin: f64,
    pub scaling: Vec<ScalingCheck>,
    pub min_margin: f64,
    pub violations: usize,
}

/// Checks subadditivity of `d_m(., 0)` over `fs` and the contraction
/// `d_m(lambda f, 0) <= d_m(f, 0)` for every pair `(f, lambda)`.
pub fn check_dm_calculus(fs: &[StepFunction], lambdas: &[f64]) -> Result<CalculusReport> {
    if let Some(l) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidArgument(format!("lambda {l} outside [0, 1]")));
    }
    let zero = StepFunction::zero(1);
    let singles: Vec<f64> = fs.iter().map(|f| dm(f, &zero)).collect::<Result<_>>()?;
    let sum_dm = dm(&StepFunction::sum(fs)?, &zero)?;
    let dm_sum = neumaier(singles.iter().copied());
    let subadditivity_margin = dm_sum - sum_dm;
    let mut scaling = Vec::new();
    for (index, f) in fs.iter().enumerate() {
        for &lambda in lambdas {
            let lhs = dm(&f.scale(lambda), &zero)?;
            let rhs = singles[index];
            scaling.push(ScalingCheck { index, lambda, lhs, rhs, margin: rhs - lhs });
        }
    }
    let margins = std::iter::once(subadditivity_margin).chain(scaling.iter().map(|s| s.margin));
    let min_margin = margins.clone().fold(f64::INFINITY, f64::min);
    let violations = margins.filter(|m| *m < -CHECK_TOL).count();
    Ok(CalculusReport { sum_dm, dm_sum, subadditivity_margin, scaling, min_margin, violations })
}

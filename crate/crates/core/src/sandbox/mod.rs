//! Dyadic step functions on finite products of `[0, 1]`.
//!
//! A function with `coords = k` lives on `[0,1]^k` with product Lebesgue
//! measure and is constant on the cells of a grid with `2^{r_j}` equal
//! intervals along coordinate `j`. Values are stored row-major with the first
//! coordinate most significant. Functions with fewer coordinates are treated
//! as constant along the missing ones, so any two functions have a common
//! refinement.

mod measure;
mod spikes;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{below, StreamRng};

pub use measure::{check_dm_calculus, dm, l1_norm, CalculusReport, ScalingCheck};
pub use spikes::{
    near_disjointness_scan, spike, spike_average_deficit, spike_average_deficit_grid,
    spike_deficit_binomial, spike_family, spike_probes, NearDisjointReport, ProbeRecord,
    SpikeDeficit, MAX_GRID_COORDS,
};

/// Largest supported grid, as a power of two.
pub const MAX_LOG_CELLS: u32 = 27;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionData", into = "StepFunctionData")]
pub struct StepFunction {
    resolutions: Vec<u32>,
    values: Vec<f64>,
}

/// Serialized form `{coords, resolutions, values}`.
#[derive(Serialize, Deserialize)]
pub struct StepFunctionData {
    pub coords: usize,
    pub resolutions: Vec<u32>,
    pub values: Vec<f64>,
}

impl TryFrom<StepFunctionData> for StepFunction {
    type Error = Error;

    fn try_from(d: StepFunctionData) -> Result<Self> {
        if d.coords != d.resolutions.len() {
            return Err(Error::InvalidArgument(format!(
                "coords = {} but {} resolutions given",
                d.coords,
                d.resolutions.len()
            )));
        }
        StepFunction::new(d.resolutions, d.values)
    }
}

impl From<StepFunction> for StepFunctionData {
    fn from(f: StepFunction) -> Self {
        StepFunctionData { coords: f.coords(), resolutions: f.resolutions, values: f.values }
    }
}

fn log_cells(resolutions: &[u32]) -> u32 {
    resolutions.iter().sum()
}

impl StepFunction {
    pub fn new(resolutions: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if resolutions.is_empty() {
            return Err(Error::InvalidArgument("a step function needs at least one coordinate".into()));
        }
        let log = log_cells(&resolutions);
        if log > MAX_LOG_CELLS {
            return Err(Error::GridTooLarge(format!("2^{log} cells")));
        }
        if values.len() != 1usize << log {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                1usize << log,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value {v}")));
        }
        Ok(Self { resolutions, values })
    }

    pub fn constant(coords: usize, c: f64) -> Self {
        Self { resolutions: vec![0; coords.max(1)], values: vec![c] }
    }

    pub fn zero(coords: usize) -> Self {
        Self::constant(coords, 0.0)
    }

    /// Builds a function from its value on each cell multi-index.
    pub fn from_cells(resolutions: Vec<u32>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let log = log_cells(&resolutions);
        if log > MAX_LOG_CELLS {
            return Err(Error::GridTooLarge(format!("2^{log} cells")));
        }
        let mut digits = vec![0usize; resolutions.len()];
        let values = (0..1usize << log)
            .map(|i| {
                split_index(&resolutions, i, &mut digits);
                f(&digits)
            })
            .collect();
        Self::new(resolutions, values)
    }

    pub fn coords(&self) -> usize {
        self.resolutions.len()
    }

    pub fn resolutions(&self) -> &[u32] {
        &self.resolutions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measure of one grid cell, an exact power of two.
    pub fn cell_measure(&self) -> f64 {
        cell_measure(&self.resolutions)
    }

    /// Re-expresses the function on a finer grid with at least as many coordinates.
    pub fn refine(&self, target: &[u32]) -> Result<StepFunction> {
        if target.len() < self.coords()
            || self.resolutions.iter().zip(target).any(|(r, t)| t < r)
        {
            return Err(Error::GridIncompatible(format!(
                "{:?} is not a refinement of {:?}",
                target, self.resolutions
            )));
        }
        if target == self.resolutions.as_slice() {
            return Ok(self.clone());
        }
        let lookup = Lookup::new(&self.resolutions, target);
        let log = log_cells(target);
        if log > MAX_LOG_CELLS {
            return Err(Error::GridIncompatible(format!("common grid has 2^{log} cells")));
        }
        let values = (0..1usize << log).map(|i| self.values[lookup.index(i)]).collect();
        Ok(Self { resolutions: target.to_vec(), values })
    }

    /// Pointwise combination on the common refinement.
    pub fn zip_with(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        let grid = common_grid(&[self, other])?;
        let a = self.refine(&grid)?;
        let b = other.refine(&grid)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| op(*x, *y)).collect();
        Ok(Self { resolutions: grid, values })
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        Self { resolutions: self.resolutions.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn abs(&self) -> StepFunction {
        Self { resolutions: self.resolutions.clone(), values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn sum(fs: &[StepFunction]) -> Result<StepFunction> {
        let coords = fs.iter().map(StepFunction::coords).max().unwrap_or(1);
        fs.iter().try_fold(StepFunction::zero(coords), |acc, f| acc.add(f))
    }
}

pub(crate) fn cell_measure(resolutions: &[u32]) -> f64 {
    0.5f64.powi(log_cells(resolutions) as i32)
}

/// Coordinatewise maximum resolution, checked against the cell cap.
pub fn common_grid(fs: &[&StepFunction]) -> Result<Vec<u32>> {
    let coords = fs.iter().map(|f| f.coords()).max().unwrap_or(1);
    let mut grid = vec![0u32; coords];
    for f in fs {
        for (g, r) in grid.iter_mut().zip(&f.resolutions) {
            *g = (*g).max(*r);
        }
    }
    let log = log_cells(&grid);
    if log > MAX_LOG_CELLS {
        return Err(Error::GridIncompatible(format!("common grid {grid:?} has 2^{log} cells")));
    }
    Ok(grid)
}

fn split_index(resolutions: &[u32], mut index: usize, digits: &mut [usize]) {
    for (d, r) in digits.iter_mut().zip(resolutions).rev() {
        *d = index & ((1usize << r) - 1);
        index >>= r;
    }
}

/// Maps cell indices of a fine grid to cell indices of a coarser one.
pub(crate) struct Lookup {
    // (fine shift, coarse shift, coarse mask, dropped bits) per active coordinate
    parts: Vec<(u32, u32, usize, u32)>,
}

impl Lookup {
    pub(crate) fn new(coarse: &[u32], fine: &[u32]) -> Self {
        let mut parts = Vec::new();
        let mut fine_shift = 0;
        let mut coarse_shift = 0;
        for j in (0..fine.len()).rev() {
            let r = coarse.get(j).copied().unwrap_or(0);
            if r > 0 {
                parts.push((fine_shift, coarse_shift, (1usize << r) - 1, fine[j] - r));
            }
            fine_shift += fine[j];
            coarse_shift += r;
        }
        Self { parts }
    }

    pub(crate) fn index(&self, fine_index: usize) -> usize {
        self.parts
            .iter()
            .map(|&(fs, cs, mask, drop)| ((fine_index >> (fs + drop)) & mask) << cs)
            .sum()
    }
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Random step function with values in `{-4, -4 + 1/16, ..., 4}` and
/// resolutions up to `max_res`; all arithmetic on such functions is exact.
pub fn random_dyadic(rng: &mut StreamRng, coords: usize, max_res: u32) -> StepFunction {
    let resolutions: Vec<u32> =
        (0..coords.max(1)).map(|_| below(rng, max_res as usize + 1) as u32).collect();
    let cells = 1usize << log_cells(&resolutions);
    let values = (0..cells).map(|_| (below(rng, 129) as f64 - 64.0) / 16.0).collect();
    StepFunction { resolutions, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_matches_digit_arithmetic() {
        let coarse = [1, 0, 2];
        let fine = [2, 1, 3];
        let l = Lookup::new(&coarse, &fine);
        let mut d = [0usize; 3];
        for i in 0..1usize << 6 {
            split_index(&fine, i, &mut d);
            let expect = ((d[0] >> 1) << 2) + (d[2] >> 1);
            assert_eq!(l.index(i), expect);
        }
    }

    #[test]
    fn compensated_sum() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier(v), 2.0);
    }

    #[test]
    fn missing_coordinates_are_constant() {
        let f = StepFunction::new(vec![1], vec![1.0, 2.0]).unwrap();
        let g = f.refine(&[1, 1]).unwrap();
        assert_eq!(g.values(), &[1.0, 1.0, 2.0, 2.0]);
    }
}

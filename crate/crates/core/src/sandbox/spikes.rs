use serde::Serialize;

use super::{cell_measure, dm, l1_norm, neumaier, Lookup, StepFunction, MAX_LOG_CELLS};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{below, stream};

/// Largest product dimension for direct grid integration.
pub const MAX_GRID_COORDS: usize = 12;

const AGREEMENT_TOL: f64 = 1e-12;
const CHUNK_LOG: u32 = 16;
const PROBE_TAG: u32 = 0x5b1e;
const MAX_PROBES: usize = 20;

/// `j` with `s = 2^-j`, `j >= 1`.
fn dyadic_exponent(s: f64) -> Result<u32> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::NonDyadicSupport(s));
    }
    let j = -s.log2().round();
    if j >= 1.0 && j <= 1022.0 && 0.5f64.powi(j as i32) == s {
        Ok(j as u32)
    } else {
        Err(Error::NonDyadicSupport(s))
    }
}

/// `(1/s) 1{t_coord in [0, s)}` as a function of `coords` coordinates.
pub fn spike(s: f64, coord: usize, coords: usize) -> Result<StepFunction> {
    let j = dyadic_exponent(s)?;
    if coord >= coords {
        return Err(Error::InvalidArgument(format!("coordinate {coord} out of {coords}")));
    }
    if j > MAX_LOG_CELLS {
        return Err(Error::GridTooLarge(format!("spike of width 2^-{j}")));
    }
    let mut resolutions = vec![0; coords];
    resolutions[coord] = j;
    let mut values = vec![0.0; 1usize << j];
    values[0] = 1.0 / s;
    StepFunction::new(resolutions, values)
}

/// `n` spikes of width `s`, the `j`-th depending only on coordinate `j`,
/// hence independent under the product measure.
pub fn spike_family(s: f64, n: usize) -> Result<Vec<StepFunction>> {
    dyadic_exponent(s)?;
    (0..n).map(|j| spike(s, j, n)).collect()
}

/// `E|K/(ns) - 1|` for `K ~ Bin(n, s)`.
pub fn spike_deficit_binomial(s: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ratio = s / (1.0 - s);
    let mut p = (1.0 - s).powi(n as i32);
    let log_space = p < 1e-280;
    let mut log_p = nf * (1.0 - s).ln();
    let terms = (0..=n).map(|k| {
        let kf = k as f64;
        let weight = if log_space { log_p.exp() } else { p };
        let term = weight * (kf / (nf * s) - 1.0).abs();
        p *= (nf - kf) / (kf + 1.0) * ratio;
        log_p += ((nf - kf) / (kf + 1.0)).ln() + ratio.ln();
        term
    });
    neumaier(terms)
}

/// `||(1/n) sum f_j - 1||` by integration over the `n`-fold product grid.
pub fn spike_average_deficit_grid(s: f64, n: usize) -> Result<f64> {
    let j = dyadic_exponent(s)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > MAX_GRID_COORDS || j as usize * n > MAX_LOG_CELLS as usize {
        return Err(Error::GridTooLarge(format!("{n} coordinates at width 2^-{j}")));
    }
    let family = spike_family(s, n)?;
    let grid = vec![j; n];
    let lookups: Vec<Lookup> = family.iter().map(|f| Lookup::new(f.resolutions(), &grid)).collect();
    let log = j * n as u32;
    let chunk = CHUNK_LOG.min(log);
    let inv_n = 1.0 / n as f64;
    let partial = par::map(1usize << (log - chunk), |c| {
        let start = c << chunk;
        neumaier((start..start + (1usize << chunk)).map(|i| {
            let avg = neumaier(family.iter().zip(&lookups).map(|(f, l)| f.values()[l.index(i)]));
            (avg * inv_n - 1.0).abs()
        }))
    });
    Ok(neumaier(partial) * cell_measure(&grid))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpikeDeficit {
    pub s: f64,
    pub n: usize,
    pub value: f64,
    pub oracle: f64,
    /// Absent when the product grid exceeds the integration cap.
    pub grid: Option<f64>,
}

/// Deficit of the spike average, by the binomial formula and, when the grid
/// is small enough, by direct integration; the two must agree to `1e-12`.
pub fn spike_average_deficit(s: f64, n: usize) -> Result<SpikeDeficit> {
    dyadic_exponent(s)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let oracle = spike_deficit_binomial(s, n);
    let grid = match spike_average_deficit_grid(s, n) {
        Ok(v) => Some(v),
        Err(Error::GridTooLarge(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(g) = grid {
        if (g - oracle).abs() > AGREEMENT_TOL {
            return Err(Error::InvariantViolation(format!(
                "grid deficit {g} differs from binomial {oracle}"
            )));
        }
    }
    Ok(SpikeDeficit { s, n, value: oracle, oracle, grid })
}

/// Spikes of width `2^-1, ..., 2^-count` on one coordinate, each placed on a
/// seeded random dyadic cell, so `d_m(probe, 0)` strictly decreases.
pub fn spike_probes(count: usize, seed: u64) -> Result<Vec<StepFunction>> {
    if count == 0 || count > MAX_PROBES {
        return Err(Error::InvalidArgument(format!("probe count must be in 1..={MAX_PROBES}")));
    }
    (1..=count as u32)
        .map(|j| {
            let cells = 1usize << j;
            let at = below(&mut stream(seed, PROBE_TAG, u64::from(j)), cells);
            let mut values = vec![0.0; cells];
            values[at] = cells as f64;
            StepFunction::new(vec![j], values)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub index: usize,
    pub dm: f64,
    pub norm: f64,
    /// `max_g ||f|| + ||g|| - ||f + g||` over the family.
    pub deficit: f64,
    pub worst: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NearDisjointReport {
    pub eps: f64,
    pub delta: f64,
    /// Smallest probe distance to zero.
    pub floor: f64,
    /// The smallest probe already violates the inequality.
    pub collapsed: bool,
    /// Probes sorted by increasing `d_m(f, 0)`.
    pub probes: Vec<ProbeRecord>,
}

/// Largest probe level `delta` such that every probe with `d_m(f, 0) < delta`
/// satisfies `||f + g|| >= ||f|| + ||g|| - eps` for all `g` in `family`.
pub fn near_disjointness_scan(
    family: &[StepFunction],
    eps: f64,
    probes: &[StepFunction],
) -> Result<NearDisjointReport> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probes".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    let zero = StepFunction::zero(1);
    let norms: Vec<f64> = family.iter().map(l1_norm).collect();
    let mut records = probes
        .iter()
        .enumerate()
        .map(|(index, f)| {
            let norm = l1_norm(f);
            let mut deficit = f64::NEG_INFINITY;
            let mut worst = 0;
            for (k, g) in family.iter().enumerate() {
                let d = norm + norms[k] - l1_norm(&f.add(g)?);
                if d > deficit {
                    deficit = d;
                    worst = k;
                }
            }
            Ok(ProbeRecord { index, dm: dm(f, &zero)?, norm, deficit, worst })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.dm.total_cmp(&b.dm).then(a.index.cmp(&b.index)));
    let floor = records[0].dm;
    let delta = match records.iter().find(|r| r.deficit > eps) {
        Some(bad) => bad.dm,
        None => records[records.len() - 1].dm,
    };
    let collapsed = records[0].deficit > eps;
    Ok(NearDisjointReport { eps, delta, floor, collapsed, probes: records })
}

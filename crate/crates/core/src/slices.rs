//! Slices `S(B_X, f, d) = {x in B_X : <f, x> > 1 - d}` with `|f|_* = 1`,
//! their diameters, small-slice search and the two witness constructions
//! linking slice diameters to midpoint sets.

use serde::{Deserialize, Serialize};

use crate::budget::SolverBudget;
use crate::error::{Error, Result};
use crate::linalg::{dot, euclid, scale, sub};
use crate::midpoints::{MidpointSet, INVARIANT_TOL};
use crate::optim::{adaptive_search, combine, min_norm_on_simplex};
use crate::polytope;
use crate::rng::{gaussian_vec, stream};
use crate::space::{NormedSpace, SpaceSpec};

const RIM_TAG: u32 = 0x5249;
const REFINE_TAG: u32 = 0x5246;
const FUNCTIONAL_TAG: u32 = 0x4655;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    /// Normalized to dual norm 1.
    pub functional: Vec<f64>,
    pub depth: f64,
}

impl Slice {
    pub fn threshold(&self) -> f64 {
        1.0 - self.depth
    }

    /// Membership in the open slice.
    pub fn contains(&self, space: &NormedSpace, x: &[f64]) -> bool {
        space.norm(x) <= 1.0 && dot(&self.functional, x) > self.threshold()
    }

    /// Membership in the closed slice within [`INVARIANT_TOL`].
    pub fn contains_closed(&self, space: &NormedSpace, x: &[f64]) -> bool {
        space.norm(x) <= 1.0 + INVARIANT_TOL
            && dot(&self.functional, x) >= self.threshold() - INVARIANT_TOL
    }
}

pub fn make_slice(space: &NormedSpace, f: &[f64], depth: f64) -> Result<Slice> {
    let n = space.checked_dual_norm(f)?;
    if n == 0.0 {
        return Err(Error::ZeroFunctional);
    }
    if !(depth > 0.0 && depth <= 2.0) {
        return Err(Error::DepthOutOfRange(depth));
    }
    Ok(Slice { functional: scale(f, 1.0 / n), depth })
}

/// Diameter bracket of a closed slice with the pair attaining `lower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDiameter {
    pub lower: f64,
    pub upper: f64,
    /// `upper` is exact (vertex enumeration); otherwise it only repeats the
    /// best value found by search.
    pub certified: bool,
    pub witness: (Vec<f64>, Vec<f64>),
}

pub fn slice_diameter(space: &NormedSpace, slice: &Slice, budget: &SolverBudget) -> Result<SliceDiameter> {
    if slice.functional.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: slice.functional.len() });
    }
    match space.facets() {
        Some(rows) => {
            if space.dim() > budget.vertex_dim {
                return Err(Error::DimensionBudgetExceeded { dim: space.dim(), budget: budget.vertex_dim });
            }
            exact_diameter(space, rows, slice)
        }
        None => Ok(searched_diameter(space, slice, budget)),
    }
}

fn exact_diameter(space: &NormedSpace, rows: &[Vec<f64>], slice: &Slice) -> Result<SliceDiameter> {
    let mut normals = rows.to_vec();
    normals.push(scale(&slice.functional, -1.0));
    let mut offsets = vec![1.0; rows.len()];
    offsets.push(-slice.threshold());
    let verts = polytope::vertices(&normals, &offsets, space.dim()).map_err(|_| Error::EmptySlice)?;
    if verts.is_empty() {
        return Err(Error::EmptySlice);
    }
    // Ties go to the pair highest in the slice.
    let f = &slice.functional;
    let (mut best, mut height, mut pair) = (0.0, f64::NEG_INFINITY, (verts[0].clone(), verts[0].clone()));
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            let d = space.norm(&sub(&verts[i], &verts[j]));
            let h = dot(f, &verts[i]) + dot(f, &verts[j]);
            if d > best + 1e-12 || (d > best - 1e-12 && h > height) {
                best = best.max(d);
                height = h;
                pair = (verts[i].clone(), verts[j].clone());
            }
        }
    }
    Ok(SliceDiameter { lower: best, upper: best, certified: true, witness: pair })
}

/// Retraction of `R^d` onto the closed slice: clamp to the ball, then move
/// toward the top point `p` until the level is reached.
fn into_slice(space: &NormedSpace, slice: &Slice, p: &[f64], y: &[f64]) -> Vec<f64> {
    let x = space.clamp_to_ball(y);
    let fx = dot(&slice.functional, &x);
    let c = slice.threshold();
    if fx >= c {
        return x;
    }
    let t = ((c - fx) / (1.0 - fx)).min(1.0);
    x.iter().zip(p).map(|(a, b)| a + t * (b - a)).collect()
}

fn searched_diameter(space: &NormedSpace, slice: &Slice, budget: &SolverBudget) -> SliceDiameter {
    let d = space.dim();
    let f = &slice.functional;
    let c = slice.threshold();
    let p = space.support_point(f);
    let mut cands = vec![p.clone()];
    // Rim points: from c * p along directions Euclidean-orthogonal to f.
    let base = scale(&p, c);
    let ff = dot(f, f);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if d == 2 {
        dirs.push(vec![-f[1], f[0]]);
        dirs.push(vec![f[1], -f[0]]);
    } else {
        for i in 0..budget.samples {
            let g = gaussian_vec(&mut stream(budget.seed, RIM_TAG, i as u64), d);
            let e = sub(&g, &scale(f, dot(f, &g) / ff));
            if euclid(&e) > 1e-12 {
                dirs.push(e.clone());
                dirs.push(scale(&e, -1.0));
            }
        }
    }
    for e in &dirs {
        let t = space.max_step(&base, e);
        if t.is_finite() {
            cands.push(base.iter().zip(e).map(|(a, b)| a + t * b).collect());
        }
    }
    for x in space.sphere_sample(budget.seed, budget.samples) {
        for s in [x.clone(), scale(&x, -1.0)] {
            if dot(f, &s) >= c {
                cands.push(s);
            }
        }
    }
    let mut best = (0.0, 0usize, 0usize);
    for i in 0..cands.len() {
        for j in (i + 1)..cands.len() {
            let v = space.norm(&sub(&cands[i], &cands[j]));
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let start = [cands[best.1].clone(), cands[best.2].clone()].concat();
    let eval = |y: &[f64]| {
        let u = into_slice(space, slice, &p, &y[..d]);
        let v = into_slice(space, slice, &p, &y[d..]);
        Some(space.norm(&sub(&u, &v)))
    };
    let mut y = start;
    for (k, step) in [0.05, 5e-3, 5e-4].into_iter().enumerate() {
        let mut rng = stream(budget.seed, REFINE_TAG, k as u64);
        y = adaptive_search(y, eval, &mut rng, budget.iterations / 2, step).0;
    }
    let u = into_slice(space, slice, &p, &y[..d]);
    let v = into_slice(space, slice, &p, &y[d..]);
    let value = space.norm(&sub(&u, &v));
    SliceDiameter { lower: value, upper: value, certified: false, witness: (u, v) }
}

/// Smallest slice diameter found at a fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinSliceDiameter {
    /// Diameter of the slice given by `functional`; an upper bound on the
    /// infimum (certified when `diameter.certified`).
    pub upper: f64,
    /// Resolution-qualified lower bound (planar polytopal balls only).
    pub lower: Option<f64>,
    pub functional: Vec<f64>,
    pub diameter: SliceDiameter,
    pub evaluated: usize,
}

pub fn min_slice_diameter(space: &NormedSpace, depth: f64, budget: &SolverBudget) -> Result<MinSliceDiameter> {
    if !(depth > 0.0 && depth <= 2.0) {
        return Err(Error::DepthOutOfRange(depth));
    }
    let d = space.dim();
    let diam = |f: &[f64]| -> Result<(Vec<f64>, SliceDiameter)> {
        let s = make_slice(space, f, depth)?;
        let dd = slice_diameter(space, &s, budget)?;
        Ok((s.functional, dd))
    };
    let mut evaluated = Vec::new();
    let mut lower = None;
    if d == 2 {
        // D(f) = D(-f), so half a turn of functionals suffices.
        let k = if space.facets().is_some() { budget.resolution } else { budget.resolution.min(90) };
        let mut grid = Vec::with_capacity(k);
        for i in 0..k {
            let t = std::f64::consts::PI * i as f64 / k as f64;
            grid.push(diam(&[t.cos(), t.sin()])?);
        }
        if space.facets().is_some() {
            let jump = (0..k)
                .map(|i| (grid[i].1.upper - grid[(i + 1) % k].1.upper).abs())
                .fold(0.0, f64::max);
            let min = grid.iter().map(|g| g.1.upper).fold(f64::INFINITY, f64::min);
            lower = Some((min - jump).max(0.0));
        }
        evaluated.extend(grid);
    } else {
        let mut fs: Vec<Vec<f64>> = space.facets().map(|r| r.to_vec()).unwrap_or_default();
        for x in space.sphere_sample(budget.seed, budget.samples) {
            fs.push(space.norming_functional(&x));
        }
        for f in fs {
            evaluated.push(diam(&f)?);
        }
    }
    if let Some(rows) = space.facets() {
        for r in rows {
            evaluated.push(diam(r)?);
        }
    }
    let count = evaluated.len();
    let best = evaluated
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.upper.total_cmp(&b.1 .1.upper).then(a.0.cmp(&b.0)))
        .map(|(_, v)| v)
        .expect("nonempty functional set");
    let (mut functional, mut diameter) = best;
    if d > 2 {
        let mut rng = stream(budget.seed, FUNCTIONAL_TAG, 0);
        let eval = |g: &[f64]| diam(g).ok().map(|(_, dd)| -dd.upper);
        let (g, _) = adaptive_search(functional.clone(), eval, &mut rng, budget.iterations / 8, 0.1);
        let (f2, d2) = diam(&g)?;
        if d2.upper < diameter.upper {
            functional = f2;
            diameter = d2;
        }
    }
    if let (Some(l), true) = (lower, diameter.certified) {
        lower = Some(l.min(diameter.upper));
    }
    Ok(MinSliceDiameter { upper: diameter.upper, lower, functional, diameter, evaluated: count })
}

/// A slice containing `x0` and disjoint from `S^{alpha - eps}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatingSlice {
    pub slice: Slice,
    /// `<f, x0> - sup <f, S^{alpha - eps}>` for the slice functional.
    pub gap: f64,
    pub hull_support: f64,
    /// Support values are exact (polytopal balls).
    pub certified: bool,
}

pub fn separating_slice(
    space: &NormedSpace,
    x0: &[f64],
    alpha: f64,
    eps: f64,
    budget: &SolverBudget,
) -> Result<SeparatingSlice> {
    let nx = space.checked_norm(x0)?;
    if nx > 1.0 + INVARIANT_TOL {
        return Err(Error::InvalidPoint(nx));
    }
    check_levels(alpha, eps)?;
    let set = MidpointSet::new(space, alpha - eps, budget)?;
    let d = space.dim();
    let euclidean = NormedSpace::new(SpaceSpec::lp(d, 2.0))?;
    let mut atoms = vec![vec![0.0; d]];
    if nx > 0.0 {
        atoms.push(set.support(x0).m);
    }
    let mut weights: Option<Vec<f64>> = None;
    let mut g = x0.to_vec();
    for _ in 0..budget.max_columns {
        let w = min_norm_on_simplex(&euclidean, x0, &atoms, weights.as_deref(), 4000);
        let z = combine(&w, &atoms, d);
        g = sub(x0, &z);
        if euclid(&g) <= 1e-14 {
            break;
        }
        let s = set.support(&g);
        if dot(&g, &s.m) <= dot(&g, &z) + 1e-13 {
            break;
        }
        atoms.push(s.m);
        let mut w = w;
        w.push(0.0);
        weights = Some(w);
    }
    let gn = space.dual_norm(&g);
    if gn <= 1e-14 {
        return Err(Error::NotSeparated { gap: 0.0, margin: budget.margin });
    }
    let f = scale(&g, 1.0 / gn);
    let h = set.support(&f).value.max(0.0);
    let gap = dot(&f, x0) - h;
    if gap < budget.margin {
        return Err(Error::NotSeparated { gap, margin: budget.margin });
    }
    let depth = 1.0 - (h + 0.5 * gap);
    let slice = Slice { functional: f, depth };
    Ok(SeparatingSlice { slice, gap, hull_support: h, certified: set.is_exact() })
}

/// Searches the half-depth slice for a point of `S^{alpha - eps}`; its
/// generating pair then lies in the original slice.
pub fn slice_spread_witness(
    space: &NormedSpace,
    slice: &Slice,
    alpha: f64,
    eps: f64,
    budget: &SolverBudget,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_levels(alpha, eps)?;
    let set = MidpointSet::new(space, alpha - eps, budget)?;
    let atom = set.support(&slice.functional);
    let half = 1.0 - 0.5 * slice.depth;
    if atom.value >= half - 1e-12 && slice.contains_closed(space, &atom.u) && slice.contains_closed(space, &atom.v)
    {
        Ok((atom.u, atom.v))
    } else {
        Err(Error::NotFound)
    }
}

fn check_levels(alpha: f64, eps: f64) -> Result<()> {
    if eps > 0.0 && eps < alpha && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("need 0 < eps < alpha <= 2, got alpha={alpha}, eps={eps}")))
    }
}

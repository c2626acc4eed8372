use serde::{Deserialize, Serialize};

use crate::budget::SolverBudget;
use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs_diff, null_vector, scale, sub};
use crate::lp::{Cmp, DenseLp};
use crate::optim::{adaptive_search, combine, min_norm_on_simplex, project_simplex};
use crate::par;
use crate::rng::{gaussian_vec, stream};
use crate::space::NormedSpace;

use super::support::{sphere_pair, Atom, MidpointSet};
use super::{MidpointCombination, MidpointTerm};

const START_TAG: u32 = 0x4853;
const POLISH_TAG: u32 = 0x504f;
/// Largest piece count solved as a single perspective LP for the full hull.
const FULL_LP_PIECES: usize = 12;
const LP_TOL: f64 = 1e-8;
const MASTER_ITERS: usize = 3000;
const LOCAL_ROUNDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullMethod {
    /// One LP over all pieces of a polytopal midpoint set.
    PieceLp,
    /// Exhaustive LPs over all n-subsets of pieces.
    SubsetLp,
    /// Column generation on the full convex hull.
    ColumnGeneration,
    /// Multi-start local search over n-term combinations.
    Heuristic,
}

/// `d(x, conv_n S^alpha)` with a witness attaining `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullDistance {
    /// Distance attained by `witness`; an upper bound on the true distance.
    pub value: f64,
    /// Certified lower bound, when one is available.
    pub lower: Option<f64>,
    /// The lower bound matches `value` up to LP tolerance.
    pub exact: bool,
    pub method: HullMethod,
    pub witness: MidpointCombination,
}

pub fn dist_to_midpoint_hull(
    space: &NormedSpace,
    x: &[f64],
    n: usize,
    alpha: f64,
    budget: &SolverBudget,
) -> Result<HullDistance> {
    dist_to_midpoint_hull_warm(space, x, n, alpha, budget, &[])
}

/// As [`dist_to_midpoint_hull`], additionally competing against the given
/// combinations (e.g. solutions at a larger level or with fewer terms).
pub fn dist_to_midpoint_hull_warm(
    space: &NormedSpace,
    x: &[f64],
    n: usize,
    alpha: f64,
    budget: &SolverBudget,
    warm: &[MidpointCombination],
) -> Result<HullDistance> {
    let set = MidpointSet::new(space, alpha, budget)?;
    dist_with_set(&set, x, n, warm)
}

pub(crate) fn dist_with_set(
    set: &MidpointSet<'_>,
    x: &[f64],
    n: usize,
    warm: &[MidpointCombination],
) -> Result<HullDistance> {
    let (space, alpha, budget) = (set.space, set.alpha, set.budget);
    let nx = space.checked_norm(x)?;
    if nx > 1.0 + super::INVARIANT_TOL {
        return Err(Error::InvalidPoint(nx));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let d = space.dim();
    let n_eff = n.min(d + 1);
    let full = n_eff == d + 1;
    let solver = Solver { set, x };

    let mut result = match set.piece_count() {
        Some(p) if p <= n_eff || (full && p <= FULL_LP_PIECES) => {
            let all: Vec<usize> = (0..p).collect();
            let (obj, atoms) = solver.perspective_lp(&all).ok_or_else(lp_failure)?;
            solver.finish(atoms, Some(obj - LP_TOL), true, HullMethod::PieceLp, n_eff)
        }
        Some(p) if !full && binomial(p, n_eff) <= budget.subset_limit as u128 => {
            let subsets = combinations(p, n_eff);
            let solved = par::map(subsets.len(), |i| solver.perspective_lp(&subsets[i]));
            let objs: Vec<f64> =
                solved.iter().map(|s| s.as_ref().map_or(f64::INFINITY, |s| s.0)).collect();
            let best = par::argmin(&objs).ok_or_else(lp_failure)?;
            let (obj, atoms) = solved[best].clone().ok_or_else(lp_failure)?;
            solver.finish(atoms, Some(obj - LP_TOL), true, HullMethod::SubsetLp, n_eff)
        }
        _ => {
            let (atoms, lower) = solver.column_generation(warm);
            let lower = lower.filter(|_| set.is_exact());
            if full {
                solver.finish(atoms, lower, false, HullMethod::ColumnGeneration, n_eff)
            } else {
                let atoms = solver.n_term_search(atoms, warm, n_eff);
                solver.finish(atoms, lower, false, HullMethod::Heuristic, n_eff)
            }
        }
    };

    for c in warm {
        if c.alpha + 1e-12 < alpha || c.check(space).is_err() {
            continue;
        }
        let atoms: Vec<Atom> = c.terms.iter().map(|t| Atom::new(t.u.clone(), t.v.clone(), x)).collect();
        let reduced = solver.drop_to(atoms, n_eff);
        let cand = solver.finish(reduced, result.lower, result.exact, result.method, n_eff);
        if cand.value < result.value {
            result.witness = cand.witness;
            result.value = cand.value;
        }
    }
    result.witness.alpha = alpha;
    if let Some(l) = result.lower {
        if l > result.value {
            result.lower = Some(result.value);
        }
    }
    Ok(result)
}

fn lp_failure() -> Error {
    Error::Lp("midpoint hull LP failed".into())
}

struct Solver<'s, 'a> {
    set: &'s MidpointSet<'a>,
    x: &'s [f64],
}

struct Master {
    weights: Vec<f64>,
    z: Vec<f64>,
    value: f64,
    /// Functional of dual norm at most 1 certifying the restricted optimum.
    f: Vec<f64>,
}

impl Solver<'_, '_> {
    fn space(&self) -> &NormedSpace {
        self.set.space
    }

    fn norm_to(&self, z: &[f64]) -> f64 {
        self.space().norm(&sub(self.x, z))
    }

    /// Exact `d(x, conv(union of the given pieces))`: a perspective LP in
    /// `(U_k, V_k, lambda_k) = lambda_k (u_k, v_k, 1)`.
    fn perspective_lp(&self, pieces: &[usize]) -> Option<(f64, Vec<Atom>)> {
        let rows = self.set.rows()?;
        let d = self.space().dim();
        let mut lp = DenseLp::minimize();
        let t = lp.free_var(1.0);
        let mut blocks = Vec::new();
        for _ in pieces {
            let u0 = lp.num_vars();
            for _ in 0..2 * d {
                lp.free_var(0.0);
            }
            let lam = lp.nonneg_var(0.0);
            blocks.push((u0, lam));
        }
        for (&k, &(u0, lam)) in pieces.iter().zip(&blocks) {
            for row in rows {
                for off in [0, d] {
                    let mut terms: Vec<(usize, f64)> =
                        row.iter().enumerate().map(|(i, &c)| (u0 + off + i, c)).collect();
                    terms.push((lam, -1.0));
                    lp.constraint(&terms, Cmp::Le, 0.0);
                }
            }
            let a = self.set.piece(k);
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(2 * d + 1);
            for (i, &c) in a.iter().enumerate() {
                terms.push((u0 + i, c));
                terms.push((u0 + d + i, -c));
            }
            terms.push((lam, -self.set.alpha));
            lp.constraint(&terms, Cmp::Ge, 0.0);
        }
        let lams: Vec<(usize, f64)> = blocks.iter().map(|&(_, l)| (l, 1.0)).collect();
        lp.constraint(&lams, Cmp::Eq, 1.0);
        for row in rows {
            let mut terms = vec![(t, 1.0)];
            for &(u0, _) in &blocks {
                for (i, &c) in row.iter().enumerate() {
                    terms.push((u0 + i, 0.5 * c));
                    terms.push((u0 + d + i, 0.5 * c));
                }
            }
            lp.constraint(&terms, Cmp::Ge, dot(row, self.x));
        }
        let sol = lp.solve().ok()?;
        let mut atoms = Vec::new();
        for &(u0, lam) in &blocks {
            let l = sol.values[lam];
            if l <= 1e-10 {
                continue;
            }
            let u = scale(&sol.values[u0..u0 + d], 1.0 / l);
            let v = scale(&sol.values[u0 + d..u0 + 2 * d], 1.0 / l);
            if self.set.is_valid(&u, &v) {
                atoms.push(Atom::new(u, v, self.x));
            }
        }
        if atoms.is_empty() {
            return None;
        }
        Some((sol.objective, atoms))
    }

    /// Best weights over fixed atoms and a certifying functional.
    fn master(&self, atoms: &[Atom], warm: Option<&[f64]>) -> Master {
        let pts: Vec<Vec<f64>> = atoms.iter().map(|a| a.m.clone()).collect();
        let d = self.space().dim();
        if let Some(rows) = self.set.rows() {
            if let Some(m) = self.master_lp(rows, &pts) {
                return m;
            }
        }
        let weights = min_norm_on_simplex(self.space(), self.x, &pts, warm, MASTER_ITERS);
        let z = combine(&weights, &pts, d);
        let r = sub(self.x, &z);
        let f = self.space().norming_functional(&r);
        Master { value: self.space().norm(&r), weights, z, f }
    }

    fn master_lp(&self, rows: &[Vec<f64>], pts: &[Vec<f64>]) -> Option<Master> {
        let mut primal = DenseLp::minimize();
        let t = primal.free_var(1.0);
        let mu: Vec<usize> = pts.iter().map(|_| primal.nonneg_var(0.0)).collect();
        primal.constraint(&mu.iter().map(|&i| (i, 1.0)).collect::<Vec<_>>(), Cmp::Eq, 1.0);
        for row in rows {
            let mut terms = vec![(t, 1.0)];
            terms.extend(mu.iter().zip(pts).map(|(&i, p)| (i, dot(row, p))));
            primal.constraint(&terms, Cmp::Ge, dot(row, self.x));
        }
        let ps = primal.solve().ok()?;
        let weights = project_simplex(&mu.iter().map(|&i| ps.values[i].max(0.0)).collect::<Vec<_>>());

        let mut dual = DenseLp::maximize();
        let c: Vec<usize> = rows.iter().map(|r| dual.nonneg_var(dot(r, self.x))).collect();
        let s = dual.free_var(-1.0);
        dual.constraint(&c.iter().map(|&i| (i, 1.0)).collect::<Vec<_>>(), Cmp::Eq, 1.0);
        for p in pts {
            let mut terms: Vec<(usize, f64)> =
                c.iter().zip(rows).map(|(&i, r)| (i, dot(r, p))).collect();
            terms.push((s, -1.0));
            dual.constraint(&terms, Cmp::Le, 0.0);
        }
        let ds = dual.solve().ok()?;
        let mut f = vec![0.0; self.space().dim()];
        for (&i, r) in c.iter().zip(rows) {
            crate::linalg::axpy(&mut f, ds.values[i].max(0.0), r);
        }
        let z = combine(&weights, pts, self.space().dim());
        Some(Master { value: self.norm_to(&z), weights, z, f })
    }

    /// Column generation on `conv S^alpha`. Returns the final atoms (at most
    /// `d + 1`, by Caratheodory reduction) and the best dual lower bound.
    fn column_generation(&self, warm: &[MidpointCombination]) -> (Vec<Atom>, Option<f64>) {
        let space = self.space();
        let mut atoms = vec![self.set.support(&space.norming_functional(self.x))];
        let p = space.support_point(&space.norming_functional(self.x));
        atoms.push(Atom::new(p.clone(), scale(&p, -1.0), self.x));
        for c in warm {
            if c.alpha + 1e-12 >= self.set.alpha && c.check(space).is_ok() {
                atoms.extend(c.terms.iter().map(|t| Atom::new(t.u.clone(), t.v.clone(), self.x)));
            }
        }
        let mut lower: Option<f64> = None;
        let mut weights: Option<Vec<f64>> = None;
        for _ in 0..self.set.budget.max_columns {
            let m = self.master(&atoms, weights.as_deref());
            let s = self.set.support(&m.f);
            let h = dot(&m.f, &s.m);
            let l = dot(&m.f, self.x) - h;
            lower = Some(lower.map_or(l, |b: f64| b.max(l)));
            weights = Some(m.weights.clone());
            let gap = m.value - lower.unwrap();
            if h <= dot(&m.f, &m.z) + 1e-12 || gap <= 1e-10 {
                break;
            }
            if atoms.iter().any(|a| max_abs_diff(&a.m, &s.m) <= 1e-13) {
                break;
            }
            atoms.push(s);
            let mut w = m.weights;
            w.push(0.0);
            weights = Some(w);
        }
        let m = self.master(&atoms, weights.as_deref());
        (caratheodory(atoms, &m.weights, space.dim()), lower)
    }

    /// Multi-start local search for the best combination with at most `n`
    /// atoms.
    fn n_term_search(&self, hull_atoms: Vec<Atom>, warm: &[MidpointCombination], n: usize) -> Vec<Atom> {
        let space = self.space();
        let d = space.dim();
        let mut starts: Vec<Vec<Atom>> = vec![
            self.drop_to(hull_atoms, n),
            vec![self.set.support(&space.norming_functional(self.x))],
        ];
        for c in warm {
            if c.alpha + 1e-12 >= self.set.alpha && c.check(space).is_ok() {
                let atoms = c.terms.iter().map(|t| Atom::new(t.u.clone(), t.v.clone(), self.x)).collect();
                starts.push(self.drop_to(atoms, n));
            }
        }
        for s in 0..self.set.budget.starts {
            let mut rng = stream(self.set.budget.seed, START_TAG, s as u64);
            let atoms = (0..n)
                .map(|_| {
                    let g = gaussian_vec(&mut rng, d);
                    self.set.support(&g)
                })
                .collect();
            starts.push(atoms);
        }
        let improved = par::map(starts.len(), |i| self.local_improve(starts[i].clone(), n));
        let values: Vec<f64> = improved.iter().map(|(v, _)| *v).collect();
        let best = par::argmin(&values).unwrap();
        let atoms = improved[best].1.clone();
        self.polish(atoms)
    }

    fn local_improve(&self, mut atoms: Vec<Atom>, n: usize) -> (f64, Vec<Atom>) {
        let mut m = self.master(&atoms, None);
        for _ in 0..LOCAL_ROUNDS {
            let s = self.set.support(&m.f);
            if dot(&m.f, &s.m) <= dot(&m.f, &m.z) + 1e-12 {
                break;
            }
            if atoms.len() < n {
                atoms.push(s);
                m = self.master(&atoms, None);
                continue;
            }
            let trials: Vec<(Master, usize)> = (0..atoms.len())
                .map(|i| {
                    let mut t = atoms.clone();
                    t[i] = s.clone();
                    (self.master(&t, None), i)
                })
                .collect();
            let (bm, bi) = trials
                .into_iter()
                .min_by(|a, b| a.0.value.total_cmp(&b.0.value).then(a.1.cmp(&b.1)))
                .unwrap();
            if bm.value < m.value - 1e-12 {
                atoms[bi] = s;
                m = bm;
            } else {
                break;
            }
        }
        let kept = prune(atoms, &m.weights);
        (self.master(&kept, None).value, kept)
    }

    /// Greedily removes atoms until at most `n` remain.
    fn drop_to(&self, mut atoms: Vec<Atom>, n: usize) -> Vec<Atom> {
        if atoms.len() > self.space().dim() + 1 {
            let w = self.master(&atoms, None).weights;
            atoms = caratheodory(atoms, &w, self.space().dim());
        }
        while atoms.len() > n {
            let values: Vec<f64> = (0..atoms.len())
                .map(|i| {
                    let mut t = atoms.clone();
                    t.remove(i);
                    self.master(&t, None).value
                })
                .collect();
            let i = par::argmin(&values).unwrap();
            atoms.remove(i);
        }
        atoms
    }

    /// Direct search over all pairs and weights of the combination.
    fn polish(&self, atoms: Vec<Atom>) -> Vec<Atom> {
        let space = self.space();
        let d = space.dim();
        let k = atoms.len();
        let alpha = self.set.alpha;
        let w0 = self.master(&atoms, None).weights;
        let mut y: Vec<f64> = Vec::with_capacity(k * (2 * d + 1));
        for a in &atoms {
            y.extend_from_slice(&a.u);
            y.extend(sub(&a.v, &a.u));
        }
        y.extend_from_slice(&w0);
        let decode = |y: &[f64]| -> Option<(Vec<Atom>, Vec<f64>)> {
            let mut out = Vec::with_capacity(k);
            for i in 0..k {
                let b = &y[i * 2 * d..(i + 1) * 2 * d];
                let (u, v) = sphere_pair(space, &b[..d], &b[d..], alpha);
                out.push(Atom::new(u, v, self.x));
            }
            Some((out, project_simplex(&y[k * 2 * d..])))
        };
        let eval = |y: &[f64]| {
            let (atoms, w) = decode(y)?;
            let pts: Vec<Vec<f64>> = atoms.iter().map(|a| a.m.clone()).collect();
            Some(-self.norm_to(&combine(&w, &pts, d)))
        };
        let mut rng = stream(self.set.budget.seed, POLISH_TAG, 0);
        let (y, _) = adaptive_search(y, eval, &mut rng, 2 * self.set.budget.iterations, 0.05);
        let (polished, _) = decode(&y).unwrap();
        if polished.iter().all(|a| self.set.is_valid(&a.u, &a.v))
            && self.master(&polished, None).value < self.master(&atoms, None).value
        {
            polished
        } else {
            atoms
        }
    }

    fn finish(
        &self,
        atoms: Vec<Atom>,
        lower: Option<f64>,
        exact: bool,
        method: HullMethod,
        n: usize,
    ) -> HullDistance {
        let atoms = if atoms.len() > n { self.drop_to(atoms, n) } else { atoms };
        let m = self.master(&atoms, None);
        let terms: Vec<MidpointTerm> = atoms
            .into_iter()
            .zip(&m.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(a, &w)| MidpointTerm { weight: w, u: a.u, v: a.v })
            .collect();
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        let terms: Vec<MidpointTerm> =
            terms.into_iter().map(|t| MidpointTerm { weight: t.weight / total, ..t }).collect();
        let witness = MidpointCombination { alpha: self.set.alpha, terms };
        let value = self.norm_to(&witness.point());
        HullDistance { value, lower, exact, method, witness }
    }
}

fn prune(atoms: Vec<Atom>, weights: &[f64]) -> Vec<Atom> {
    let kept: Vec<Atom> =
        atoms.iter().zip(weights).filter(|(_, &w)| w > 1e-14).map(|(a, _)| a.clone()).collect();
    if kept.is_empty() {
        atoms
    } else {
        kept
    }
}

/// Drops zero-weight atoms, then reduces to at most `d + 1` atoms whose hull
/// still contains `sum w_i m_i`.
fn caratheodory(atoms: Vec<Atom>, weights: &[f64], d: usize) -> Vec<Atom> {
    let (mut atoms, mut w): (Vec<Atom>, Vec<f64>) =
        atoms.into_iter().zip(weights.iter().copied()).filter(|(_, w)| *w > 1e-14).unzip();
    while atoms.len() > d + 1 {
        let cols = atoms.len();
        let mut rows: Vec<Vec<f64>> = (0..d).map(|i| atoms.iter().map(|a| a.m[i]).collect()).collect();
        rows.push(vec![1.0; cols]);
        let Some(c) = null_vector(&rows, cols, 1e-12) else { break };
        let c = if c.iter().any(|&ci| ci > 1e-15) { c } else { scale(&c, -1.0) };
        let (mut best, mut ratio) = (0, f64::INFINITY);
        for (i, &ci) in c.iter().enumerate() {
            if ci > 1e-15 && w[i] / ci < ratio {
                ratio = w[i] / ci;
                best = i;
            }
        }
        for (wi, ci) in w.iter_mut().zip(&c) {
            *wi -= ratio * ci;
        }
        atoms.remove(best);
        w.remove(best);
    }
    atoms
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

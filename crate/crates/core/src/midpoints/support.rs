use crate::budget::SolverBudget;
use crate::error::Result;
use crate::linalg::{dot, max_abs_diff, midpoint, rank, scale, sub};
use crate::lp::{Cmp, DenseLp};
use crate::optim::adaptive_search;
use crate::rng::stream;
use crate::space::NormedSpace;

use super::{check_alpha, INVARIANT_TOL};

const LMO_TAG: u32 = 0x4c4d;
/// Above this many pieces the exact support LPs are replaced by search.
const MAX_PIECES: usize = 512;
const DICT_POINTS: usize = 400;

/// A point `m = (u + v)/2` of `S^alpha` with its generating pair and the
/// value `<f, m>` it attains for the functional it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub m: Vec<f64>,
    pub value: f64,
}

impl Atom {
    pub fn new(u: Vec<f64>, v: Vec<f64>, f: &[f64]) -> Self {
        let m = midpoint(&u, &v);
        let value = dot(f, &m);
        Self { u, v, m, value }
    }
}

/// `S^alpha(X)` prepared for repeated support queries.
///
/// For polytopal balls `S^alpha` is the union over facet normals `a_k` of
/// the convex pieces `{(u + v)/2 : u, v in B, <a_k, u - v> >= alpha}`; the
/// pieces for `a_k` and `-a_k` coincide, so one of each pair is kept.
pub struct MidpointSet<'a> {
    pub space: &'a NormedSpace,
    pub alpha: f64,
    pub budget: &'a SolverBudget,
    rows: Option<Vec<Vec<f64>>>,
    pieces: Vec<usize>,
    /// Sphere pairs `(u, v)` seeding the search when supports are not exact.
    dict: Vec<(Vec<f64>, Vec<f64>)>,
}

impl<'a> MidpointSet<'a> {
    pub fn new(space: &'a NormedSpace, alpha: f64, budget: &'a SolverBudget) -> Result<Self> {
        check_alpha(alpha)?;
        let rows = space.facets().map(|a| facet_rows(space, a, budget.vertex_dim));
        let pieces = match &rows {
            Some(r) => representatives(r),
            None => Vec::new(),
        };
        let rows = rows.filter(|_| pieces.len() <= MAX_PIECES);
        let dict = if rows.is_some() { Vec::new() } else { dictionary(space, alpha, budget) };
        Ok(Self { space, alpha, budget, rows, pieces, dict })
    }

    /// Whether support values are exact (LP based).
    pub fn is_exact(&self) -> bool {
        self.rows.is_some()
    }

    /// Facet normals of the ball (offset 1), when exact.
    pub fn rows(&self) -> Option<&[Vec<f64>]> {
        self.rows.as_deref()
    }

    pub fn piece_count(&self) -> Option<usize> {
        self.rows.as_ref().map(|_| self.pieces.len())
    }

    /// Normal of piece `k`.
    pub fn piece(&self, k: usize) -> &[f64] {
        &self.rows.as_ref().expect("exact set")[self.pieces[k]]
    }

    /// A point of `S^alpha` maximizing `<f, .>`.
    pub fn support(&self, f: &[f64]) -> Atom {
        match &self.rows {
            Some(_) => self.support_exact(f),
            None => self.support_search(f),
        }
    }

    fn support_exact(&self, f: &[f64]) -> Atom {
        let mut best: Option<Atom> = None;
        for k in 0..self.pieces.len() {
            if let Some(atom) = self.piece_support(k, f) {
                if best.as_ref().is_none_or(|b| atom.value > b.value) {
                    best = Some(atom);
                }
            }
        }
        best.unwrap_or_else(|| self.antipodal(f))
    }

    /// `max <f, (u + v)/2>` over piece `k`, or `None` if the piece is empty.
    pub fn piece_support(&self, k: usize, f: &[f64]) -> Option<Atom> {
        let rows = self.rows.as_ref()?;
        let d = self.space.dim();
        let a = self.piece(k);
        let mut lp = DenseLp::maximize();
        for &c in f {
            lp.free_var(0.5 * c);
        }
        for &c in f {
            lp.free_var(0.5 * c);
        }
        for row in rows {
            let u: Vec<(usize, f64)> = row.iter().copied().enumerate().collect();
            let v: Vec<(usize, f64)> = row.iter().enumerate().map(|(i, &c)| (d + i, c)).collect();
            lp.constraint(&u, Cmp::Le, 1.0);
            lp.constraint(&v, Cmp::Le, 1.0);
        }
        let sep: Vec<(usize, f64)> = a
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| [(i, c), (d + i, -c)])
            .collect();
        lp.constraint(&sep, Cmp::Ge, self.alpha);
        let s = lp.solve().ok()?;
        let (u, v) = s.values.split_at(d);
        let atom = Atom::new(u.to_vec(), v.to_vec(), f);
        self.is_valid(&atom.u, &atom.v).then_some(atom)
    }

    /// `(p, -p)` for a support point `p`; its midpoint is the origin.
    fn antipodal(&self, f: &[f64]) -> Atom {
        let p = self.space.support_point(f);
        Atom::new(p.clone(), scale(&p, -1.0), f)
    }

    pub fn is_valid(&self, u: &[f64], v: &[f64]) -> bool {
        self.space.norm(u) <= 1.0 + INVARIANT_TOL
            && self.space.norm(v) <= 1.0 + INVARIANT_TOL
            && self.space.norm(&sub(u, v)) >= self.alpha - INVARIANT_TOL
    }

    fn support_search(&self, f: &[f64]) -> Atom {
        let d = self.space.dim();
        let space = self.space;
        let alpha = self.alpha;
        let eval = |y: &[f64]| {
            let (u, v) = sphere_pair(space, &y[..d], &y[d..], alpha);
            Some(0.5 * (dot(f, &u) + dot(f, &v)))
        };
        let mut best = self.antipodal(f);
        let seeds = self
            .dict
            .iter()
            .max_by(|a, b| (dot(f, &a.0) + dot(f, &a.1)).total_cmp(&(dot(f, &b.0) + dot(f, &b.1))));
        if let Some((u, v)) = seeds {
            let mut rng = stream(self.budget.seed, LMO_TAG, 0);
            let mut y = [u.clone(), sub(v, u)].concat();
            for step in [0.02, 2e-3, 2e-4] {
                y = adaptive_search(y, eval, &mut rng, self.budget.iterations / 4, step).0;
            }
            let (u, v) = sphere_pair(space, &y[..d], &y[d..], alpha);
            let atom = Atom::new(u, v, f);
            if atom.value > best.value && self.is_valid(&atom.u, &atom.v) {
                best = atom;
            }
        }
        best
    }
}

/// Pairs of a sphere discretization separated by `alpha`; in the plane only
/// those whose midpoints are extreme in the midpoint cloud are kept.
fn dictionary(space: &NormedSpace, alpha: f64, budget: &SolverBudget) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = space.dim();
    let pts: Vec<Vec<f64>> = if d == 2 {
        let k = budget.resolution.clamp(16, 360);
        (0..k)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / k as f64;
                let e = [t.cos(), t.sin()];
                scale(&e, 1.0 / space.norm(&e))
            })
            .collect()
    } else {
        space.sphere_sample(budget.seed, DICT_POINTS)
    };
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if space.norm(&sub(&pts[i], &pts[j])) >= alpha {
                pairs.push((i, j));
            }
        }
    }
    if d == 2 {
        let mids: Vec<[f64; 2]> = pairs
            .iter()
            .map(|&(i, j)| [0.5 * (pts[i][0] + pts[j][0]), 0.5 * (pts[i][1] + pts[j][1])])
            .collect();
        pairs = hull_indices(&mids).into_iter().map(|k| pairs[k]).collect();
    }
    pairs.into_iter().map(|(i, j)| (pts[i].clone(), pts[j].clone())).collect()
}

fn hull_indices(p: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[a][0].total_cmp(&p[b][0]).then(p[a][1].total_cmp(&p[b][1])));
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        (p[a][0] - p[o][0]) * (p[b][1] - p[o][1]) - (p[a][1] - p[o][1]) * (p[b][0] - p[o][0])
    };
    let mut h: Vec<usize> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let order: Vec<usize> = if pass == 0 { idx.clone() } else { idx.iter().rev().copied().collect() };
        for k in order {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], k) <= 0.0 {
                h.pop();
            }
            h.push(k);
        }
        h.pop();
    }
    h
}

/// Maps arbitrary `(y1, y2)` onto a pair of unit vectors at distance at
/// least `alpha`: `u = y1 / |y1|`, and `v` slides from the direction of
/// `u + y2` toward `-u` along normalized chords until the separation is
/// reached. Encoding `v` relative to `u` lets a single step move the pair
/// rigidly.
pub(crate) fn sphere_pair(space: &NormedSpace, y1: &[f64], y2: &[f64], alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let unit = |y: &[f64]| {
        let n = space.norm(y);
        if n > 1e-300 {
            Some(scale(y, 1.0 / n))
        } else {
            None
        }
    };
    let u = unit(y1).unwrap_or_else(|| {
        let mut e = vec![0.0; y1.len()];
        e[0] = 1.0;
        scale(&e, 1.0 / space.norm(&e))
    });
    let neg = scale(&u, -1.0);
    let v0 = unit(&crate::linalg::add(&u, y2)).unwrap_or_else(|| neg.clone());
    let sep = |v: &[f64]| space.norm(&sub(&u, v));
    if sep(&v0) >= alpha {
        return (u, v0);
    }
    let at = |t: f64| -> Option<Vec<f64>> {
        let w: Vec<f64> = v0.iter().zip(&neg).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        unit(&w)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = neg.clone();
    for _ in 0..32 {
        let mid = 0.5 * (lo + hi);
        match at(mid) {
            Some(v) if sep(&v) >= alpha => {
                hi = mid;
                best = v;
            }
            _ => lo = mid,
        }
    }
    (u, best)
}

/// Public entry point for a single support query.
pub fn midpoint_support(
    space: &NormedSpace,
    f: &[f64],
    alpha: f64,
    budget: &SolverBudget,
) -> Result<Atom> {
    space.checked_dual_norm(f)?;
    Ok(MidpointSet::new(space, alpha, budget)?.support(f))
}

/// Facet normals of the ball: rows that are tight on a full-rank vertex set.
/// Rows in the convex hull of others are dropped; their pieces are covered.
fn facet_rows(space: &NormedSpace, rows: &[Vec<f64>], max_dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        if !out.iter().any(|q| max_abs_diff(q, r) <= 1e-12) {
            out.push(r.clone());
        }
    }
    let Ok(verts) = space.ball_vertices_within(max_dim) else {
        return out;
    };
    let d = space.dim();
    out.retain(|r| {
        let tight: Vec<Vec<f64>> =
            verts.iter().filter(|v| (dot(r, v) - 1.0).abs() <= 1e-9).cloned().collect();
        rank(&tight, 1e-9) == d
    });
    out
}

fn representatives(rows: &[Vec<f64>]) -> Vec<usize> {
    let mut keep = Vec::new();
    for (k, r) in rows.iter().enumerate() {
        let neg = scale(r, -1.0);
        let partner = rows.iter().position(|q| max_abs_diff(q, &neg) <= 1e-12);
        if partner.is_none_or(|j| j > k) {
            keep.push(k);
        }
    }
    keep
}

use std::sync::OnceLock;

use super::spec::{Exponent, SpaceSpec};
use super::validate::validate;
use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs_diff, rank, scale};
use crate::lp::{Cmp, DenseLp};
use crate::polytope;
use crate::rng;

/// Default dimension budget for exact vertex enumeration.
pub const VERTEX_DIM_BUDGET: usize = 8;
const SAMPLE_TAG: u32 = 0x5a;

enum Geometry {
    /// Ball given by (possibly redundant) vertices.
    Vertices(Vec<Vec<f64>>),
    /// Ball `{x : <a_k, x> <= 1}`.
    Facets(Vec<Vec<f64>>),
    Lp(Exponent),
    Sum { p: Exponent, left: Box<NormedSpace>, right: Box<NormedSpace> },
}

/// A validated, immutable finite-dimensional normed space.
pub struct NormedSpace {
    spec: SpaceSpec,
    dim: usize,
    geom: Geometry,
    facets: OnceLock<Option<Vec<Vec<f64>>>>,
    vertices: OnceLock<Result<Vec<Vec<f64>>>>,
}

impl std::fmt::Debug for NormedSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NormedSpace").field("spec", &self.spec).finish()
    }
}

impl NormedSpace {
    pub fn new(spec: SpaceSpec) -> Result<Self> {
        let report = validate(&spec);
        if !report.is_valid() {
            return Err(Error::InvalidSpace(report));
        }
        Ok(Self::build(spec))
    }

    fn build(spec: SpaceSpec) -> Self {
        let dim = spec.dim();
        let geom = match &spec {
            SpaceSpec::PolytopeV { vertices, .. } => Geometry::Vertices(vertices.clone()),
            SpaceSpec::PolytopeH { facets, .. } => Geometry::Facets(
                facets.iter().map(|f| scale(&f.normal, 1.0 / f.offset)).collect(),
            ),
            SpaceSpec::Lp { p, .. } => Geometry::Lp(*p),
            SpaceSpec::Lip { metric, base, .. } => Geometry::Facets(lip_rows(metric, *base)),
            SpaceSpec::Sum { p, left, right, .. } => Geometry::Sum {
                p: *p,
                left: Box::new(Self::build((**left).clone())),
                right: Box::new(Self::build((**right).clone())),
            },
        };
        Self { spec, dim, geom, facets: OnceLock::new(), vertices: OnceLock::new() }
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Polytopal kinds: V/H polytopes, Lip, l_1, l_inf, and 1/inf-sums of those.
    pub fn is_polytopal(&self) -> bool {
        match &self.geom {
            Geometry::Vertices(_) | Geometry::Facets(_) => true,
            Geometry::Lp(p) => p.0 == 1.0 || p.is_inf(),
            Geometry::Sum { p, left, right } => {
                (p.0 == 1.0 || p.is_inf()) && left.is_polytopal() && right.is_polytopal()
            }
        }
    }

    /// Components of a sum space.
    pub fn components(&self) -> Option<(Exponent, &NormedSpace, &NormedSpace)> {
        match &self.geom {
            Geometry::Sum { p, left, right } => Some((*p, left, right)),
            _ => None,
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// `||x||_X`. Panics on a length mismatch; see [`checked_norm`](Self::checked_norm).
    pub fn norm(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        match &self.geom {
            Geometry::Vertices(v) => match self.facets() {
                Some(a) => facet_gauge(a, x),
                None => gauge_lp(v, x).unwrap_or(f64::INFINITY),
            },
            Geometry::Facets(a) => facet_gauge(a, x),
            Geometry::Lp(p) => p.combine(x),
            Geometry::Sum { p, left, right } => {
                let (x1, x2) = x.split_at(left.dim);
                p.combine(&[left.norm(x1), right.norm(x2)])
            }
        }
    }

    pub fn checked_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.norm(x))
    }

    /// `sup_{x in B_X} <f, x>`.
    pub fn dual_norm(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.dim, "dimension mismatch");
        match &self.geom {
            Geometry::Vertices(v) => v.iter().map(|p| dot(f, p)).fold(0.0, f64::max),
            Geometry::Facets(a) => {
                if f.iter().all(|c| *c == 0.0) {
                    return 0.0;
                }
                support_lp(a, f).map(|(val, _)| val).unwrap_or(f64::NAN)
            }
            Geometry::Lp(p) => p.conjugate().combine(f),
            Geometry::Sum { p, left, right } => {
                let (f1, f2) = f.split_at(left.dim);
                p.conjugate().combine(&[left.dual_norm(f1), right.dual_norm(f2)])
            }
        }
    }

    pub fn checked_dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        Ok(self.dual_norm(f))
    }

    /// Dual norm as a maximum over the enumerated ball vertices.
    pub fn dual_norm_by_vertices(&self, f: &[f64]) -> Result<f64> {
        let v = self.ball_vertices()?;
        Ok(v.iter().map(|p| dot(f, p)).fold(0.0, f64::max))
    }

    /// A point of `B_X` maximizing `<f, .>`.
    pub fn support_point(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.dim, "dimension mismatch");
        match &self.geom {
            Geometry::Vertices(v) => v
                .iter()
                .max_by(|a, b| dot(f, a).total_cmp(&dot(f, b)))
                .cloned()
                .unwrap_or_else(|| vec![0.0; self.dim]),
            Geometry::Facets(a) => {
                if let Ok(vs) = self.ball_vertices() {
                    return vs
                        .iter()
                        .max_by(|x, y| dot(f, x).total_cmp(&dot(f, y)))
                        .cloned()
                        .unwrap();
                }
                support_lp(a, f).map(|(_, x)| x).unwrap_or_else(|_| vec![0.0; self.dim])
            }
            Geometry::Lp(p) => lp_support(*p, f),
            Geometry::Sum { p, left, right } => {
                let (f1, f2) = f.split_at(left.dim);
                let w = lp_support(*p, &[left.dual_norm(f1), right.dual_norm(f2)]);
                let mut x = scale(&left.support_point(f1), w[0]);
                x.extend(scale(&right.support_point(f2), w[1]));
                x
            }
        }
    }

    /// A functional with dual norm 1 and `<f, x> = ||x||`.
    pub fn norming_functional(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        if x.iter().all(|c| *c == 0.0) {
            let mut e = vec![0.0; self.dim];
            e[0] = 1.0;
            let d = self.dual_norm(&e);
            return scale(&e, 1.0 / d);
        }
        match &self.geom {
            Geometry::Vertices(_) | Geometry::Facets(_) => {
                let a = self.facets().expect("polytope facets");
                a.iter().max_by(|p, q| dot(p, x).total_cmp(&dot(q, x))).unwrap().clone()
            }
            Geometry::Lp(p) => lp_norming(*p, x),
            Geometry::Sum { p, left, right } => {
                let (x1, x2) = x.split_at(left.dim);
                let (n1, n2) = (left.norm(x1), right.norm(x2));
                let w = lp_norming(*p, &[n1, n2]);
                let part = |s: &NormedSpace, y: &[f64], wi: f64| {
                    if wi == 0.0 || y.iter().all(|c| *c == 0.0) {
                        vec![0.0; s.dim]
                    } else {
                        scale(&s.norming_functional(y), wi)
                    }
                };
                let mut f = part(left, x1, w[0]);
                f.extend(part(right, x2, w[1]));
                f
            }
        }
    }

    /// `x / ||x||`.
    pub fn project_to_sphere(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let n = self.norm(x);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(scale(x, 1.0 / n))
    }

    /// `x / max(1, ||x||)`.
    pub fn clamp_to_ball(&self, x: &[f64]) -> Vec<f64> {
        let n = self.norm(x);
        if n > 1.0 {
            scale(x, 1.0 / n)
        } else {
            x.to_vec()
        }
    }

    /// `sup {t >= 0 : ||m + t e|| <= 1}` for `m` in the ball.
    pub fn max_step(&self, m: &[f64], e: &[f64]) -> f64 {
        if let Some(a) = self.facets() {
            let mut t = f64::INFINITY;
            for row in a {
                let de = dot(row, e);
                if de > 1e-15 {
                    t = t.min(((1.0 - dot(row, m)) / de).max(0.0));
                }
            }
            return t;
        }
        if self.norm(e) == 0.0 {
            return f64::INFINITY;
        }
        let mut hi = 1.0;
        while self.norm(&step(m, e, hi)) <= 1.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.norm(&step(m, e, mid)) <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Facet normals scaled to offset 1, when the ball is polytopal and the
    /// H-description is of manageable size.
    pub fn facets(&self) -> Option<&[Vec<f64>]> {
        self.facets.get_or_init(|| self.compute_facets()).as_deref()
    }

    fn compute_facets(&self) -> Option<Vec<Vec<f64>>> {
        match &self.geom {
            Geometry::Facets(a) => Some(a.clone()),
            Geometry::Vertices(v) => polytope::facets_of_hull(v, self.dim).ok(),
            Geometry::Lp(p) if p.is_inf() => {
                Some(signed_units(self.dim))
            }
            Geometry::Lp(p) if p.0 == 1.0 && self.dim <= 12 => Some(sign_vectors(self.dim)),
            Geometry::Lp(_) => None,
            Geometry::Sum { p, left, right } => {
                let (a, c) = (left.facets()?, right.facets()?);
                let (d1, d2) = (left.dim, right.dim);
                if p.is_inf() {
                    let mut out: Vec<Vec<f64>> = a.iter().map(|r| pad(r, 0, d2)).collect();
                    out.extend(c.iter().map(|r| pad(r, d1, 0)));
                    Some(out)
                } else if p.0 == 1.0 && a.len() * c.len() <= 20_000 {
                    Some(
                        a.iter()
                            .flat_map(|r| c.iter().map(move |s| [r.as_slice(), s].concat()))
                            .collect(),
                    )
                } else {
                    None
                }
            }
        }
    }

    /// Extreme points of `B_X` with the default dimension budget.
    pub fn ball_vertices(&self) -> Result<&[Vec<f64>]> {
        self.ball_vertices_within(VERTEX_DIM_BUDGET)
    }

    pub fn ball_vertices_within(&self, max_dim: usize) -> Result<&[Vec<f64>]> {
        if !self.is_polytopal() {
            return Err(Error::NotPolytopal(self.spec.kind_name().into()));
        }
        if self.dim > max_dim {
            return Err(Error::DimensionBudgetExceeded { dim: self.dim, budget: max_dim });
        }
        match self.vertices.get_or_init(|| self.compute_vertices()) {
            Ok(v) => Ok(v.as_slice()),
            Err(e) => Err(e.clone()),
        }
    }

    fn compute_vertices(&self) -> Result<Vec<Vec<f64>>> {
        match &self.geom {
            Geometry::Vertices(v) => {
                let a = self.facets().ok_or_else(|| Error::Lp("hull facets".into()))?;
                let mut out: Vec<Vec<f64>> = Vec::new();
                for p in v {
                    let tight: Vec<Vec<f64>> =
                        a.iter().filter(|r| (dot(r, p) - 1.0).abs() <= 1e-9).cloned().collect();
                    if rank(&tight, 1e-9) == self.dim
                        && !out.iter().any(|q| max_abs_diff(q, p) <= polytope::DEDUP_TOL)
                    {
                        out.push(p.clone());
                    }
                }
                Ok(out)
            }
            Geometry::Facets(a) => polytope::vertices(a, &vec![1.0; a.len()], self.dim),
            Geometry::Lp(p) if p.is_inf() => Ok(sign_vectors(self.dim)),
            Geometry::Lp(_) => Ok(signed_units(self.dim)),
            Geometry::Sum { p, left, right } => {
                let (v1, v2) = (left.compute_vertices()?, right.compute_vertices()?);
                if p.is_inf() {
                    Ok(v1
                        .iter()
                        .flat_map(|a| v2.iter().map(move |b| [a.as_slice(), b].concat()))
                        .collect())
                } else {
                    let mut out: Vec<Vec<f64>> = v1.iter().map(|a| pad(a, 0, right.dim)).collect();
                    out.extend(v2.iter().map(|b| pad(b, left.dim, 0)));
                    Ok(out)
                }
            }
        }
    }

    /// Deterministic sample of unit vectors. Polytopal spaces within the
    /// vertex budget list all ball vertices first.
    pub fn sphere_sample(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = match self.ball_vertices() {
            Ok(v) => v.to_vec(),
            Err(_) => Vec::new(),
        };
        let mut i = 0u64;
        while out.len() < count.max(1) {
            let mut r = rng::stream(seed, SAMPLE_TAG, i);
            i += 1;
            let g = rng::gaussian_vec(&mut r, self.dim);
            let n = self.norm(&g);
            if n > 1e-12 {
                out.push(scale(&g, 1.0 / n));
            }
        }
        out
    }
}

fn step(m: &[f64], e: &[f64], t: f64) -> Vec<f64> {
    m.iter().zip(e).map(|(a, b)| a + t * b).collect()
}

fn pad(v: &[f64], before: usize, after: usize) -> Vec<f64> {
    let mut out = vec![0.0; before];
    out.extend_from_slice(v);
    out.extend(std::iter::repeat_n(0.0, after));
    out
}

fn signed_units(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            out.push(e);
        }
    }
    out
}

fn sign_vectors(dim: usize) -> Vec<Vec<f64>> {
    (0..1usize << dim)
        .map(|m| (0..dim).map(|i| if m >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect()
}

fn facet_gauge(a: &[Vec<f64>], x: &[f64]) -> f64 {
    a.iter().map(|r| dot(r, x)).fold(0.0, f64::max)
}

/// Rows `±(e_i - e_j) / d(i, j)` over all point pairs, with the base
/// coordinate dropped.
fn lip_rows(metric: &[Vec<f64>], base: usize) -> Vec<Vec<f64>> {
    let n = metric.len();
    let coord = |k: usize| if k < base { Some(k) } else if k > base { Some(k - 1) } else { None };
    let mut rows = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut r = vec![0.0; n - 1];
            if let Some(ci) = coord(i) {
                r[ci] += 1.0 / metric[i][j];
            }
            if let Some(cj) = coord(j) {
                r[cj] -= 1.0 / metric[i][j];
            }
            rows.push(scale(&r, -1.0));
            rows.push(r);
        }
    }
    rows
}

/// `max <f, x>` over `{x : <a_k, x> <= 1}` by linear programming.
pub fn support_lp(a: &[Vec<f64>], f: &[f64]) -> Result<(f64, Vec<f64>)> {
    let dim = f.len();
    let mut lp = DenseLp::maximize();
    for &c in f {
        lp.free_var(c);
    }
    for row in a {
        let terms: Vec<(usize, f64)> = row.iter().copied().enumerate().collect();
        lp.constraint(&terms, Cmp::Le, 1.0);
    }
    let s = lp.solve()?;
    Ok((s.objective, s.values[..dim].to_vec()))
}

/// Minkowski gauge of `conv(vertices)` at `x`: `min {t : x in t conv(V)}`.
pub fn gauge_lp(vertices: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let mut lp = DenseLp::minimize();
    for _ in vertices {
        lp.nonneg_var(1.0);
    }
    for (i, &xi) in x.iter().enumerate() {
        let terms: Vec<(usize, f64)> = vertices.iter().enumerate().map(|(j, v)| (j, v[i])).collect();
        lp.constraint(&terms, Cmp::Eq, xi);
    }
    Ok(lp.solve()?.objective)
}

fn lp_support(p: Exponent, f: &[f64]) -> Vec<f64> {
    let q = p.conjugate();
    if p.is_inf() {
        return f.iter().map(|c| if *c > 0.0 { 1.0 } else if *c < 0.0 { -1.0 } else { 0.0 }).collect();
    }
    if p.0 == 1.0 {
        let mut x = vec![0.0; f.len()];
        if let Some((i, c)) =
            f.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        {
            x[i] = if *c < 0.0 { -1.0 } else { 1.0 };
        }
        return x;
    }
    let nq = q.combine(f);
    if nq == 0.0 {
        return vec![0.0; f.len()];
    }
    f.iter().map(|c| c.signum() * (c.abs() / nq).powf(q.0 - 1.0)).collect()
}

fn lp_norming(p: Exponent, x: &[f64]) -> Vec<f64> {
    if p.is_inf() {
        let mut f = vec![0.0; x.len()];
        if let Some((i, c)) =
            x.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        {
            f[i] = c.signum();
        }
        return f;
    }
    if p.0 == 1.0 {
        return x.iter().map(|c| if *c == 0.0 { 0.0 } else { c.signum() }).collect();
    }
    let n = p.combine(x);
    x.iter().map(|c| c.signum() * (c.abs() / n).powf(p.0 - 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::spec::Facet;

    fn square_v() -> NormedSpace {
        NormedSpace::new(SpaceSpec::PolytopeV {
            dim: 2,
            vertices: vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]],
        })
        .unwrap()
    }

    fn lip3() -> NormedSpace {
        // M = {0, a, b}, d(0,a) = d(0,b) = 1, d(a,b) = 1/2
        NormedSpace::new(SpaceSpec::Lip {
            dim: 2,
            metric: vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.5], vec![1.0, 0.5, 0.0]],
            base: 0,
        })
        .unwrap()
    }

    #[test]
    fn norm_examples() {
        let linf = NormedSpace::new(SpaceSpec::lp(2, f64::INFINITY)).unwrap();
        assert_eq!(linf.norm(&[1.0, 1.0]), 1.0);
        // f(a) = 1, f(b) = 0: quotients 1/1, 0/1, 1/(1/2)
        assert_eq!(lip3().norm(&[1.0, 0.0]), 2.0);
        let s = NormedSpace::new(SpaceSpec::sum(1.0, SpaceSpec::lp(1, 2.0), SpaceSpec::lp(1, 2.0)))
            .unwrap();
        assert_eq!(s.norm(&[3.0, 4.0]), 7.0);
        assert!(matches!(
            linf.checked_norm(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn dual_norm_examples() {
        let l1 = NormedSpace::new(SpaceSpec::lp(2, 1.0)).unwrap();
        assert_eq!(l1.dual_norm(&[3.0, -4.0]), 4.0);
        // max over the four vertices (±1, ±1) of x + y
        assert_eq!(square_v().dual_norm(&[1.0, 1.0]), 2.0);
        assert_eq!(lip3().dual_norm(&[0.0, 0.0]), 0.0);
        assert_eq!(square_v().dual_norm(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn projection_examples() {
        let l2 = NormedSpace::new(SpaceSpec::lp(2, 2.0)).unwrap();
        let p = l2.project_to_sphere(&[3.0, 4.0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        let linf = NormedSpace::new(SpaceSpec::lp(2, f64::INFINITY)).unwrap();
        assert_eq!(linf.project_to_sphere(&[2.0, 1.0]).unwrap(), vec![1.0, 0.5]);
        assert_eq!(l2.project_to_sphere(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn vertex_examples() {
        let l1 = NormedSpace::new(SpaceSpec::lp(2, 1.0)).unwrap();
        let v = l1.ball_vertices().unwrap();
        assert_eq!(v.len(), 4);
        for p in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            assert!(v.iter().any(|q| max_abs_diff(q, &p) < 1e-12));
        }
        // enumerate intersections of constraint pairs, keep feasible, dedup
        let lip = lip3();
        let v = lip.ball_vertices().unwrap();
        let expected = [[1.0, 1.0], [-1.0, -1.0], [1.0, 0.5], [-1.0, -0.5], [0.5, 1.0], [-0.5, -1.0]];
        assert_eq!(v.len(), 6);
        for p in expected {
            assert!(v.iter().any(|q| max_abs_diff(q, &p) < 1e-10), "missing {p:?}");
        }
        let l2 = NormedSpace::new(SpaceSpec::lp(2, 2.0)).unwrap();
        assert!(matches!(l2.ball_vertices(), Err(Error::NotPolytopal(_))));
        let big = NormedSpace::new(SpaceSpec::lp(9, 1.0)).unwrap();
        assert!(matches!(big.ball_vertices(), Err(Error::DimensionBudgetExceeded { .. })));
    }

    #[test]
    fn sample_examples() {
        let sq = square_v();
        let s = sq.sphere_sample(3, 10);
        assert_eq!(s.len(), 10);
        for v in sq.ball_vertices().unwrap() {
            assert!(s[..4].contains(v));
        }
        assert_eq!(s, sq.sphere_sample(3, 10));
        let l2 = NormedSpace::new(SpaceSpec::lp(3, 2.0)).unwrap();
        for x in l2.sphere_sample(11, 1000) {
            assert!((l2.norm(&x) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn v_rep_norm_matches_lp_gauge() {
        let hex = NormedSpace::new(SpaceSpec::symmetric_polygon(&[[1.0, 0.0], [0.5, 0.9], [-0.5, 0.9]]))
            .unwrap();
        let SpaceSpec::PolytopeV { vertices, .. } = hex.spec() else { unreachable!() };
        for x in hex.sphere_sample(5, 50) {
            let g = gauge_lp(vertices, &x).unwrap();
            assert!((g - hex.norm(&x)).abs() < 1e-9);
        }
    }

    #[test]
    fn h_space_roundtrip_vertices() {
        let f = |n: [f64; 2]| Facet { normal: n.to_vec(), offset: 1.0 };
        let s = NormedSpace::new(SpaceSpec::PolytopeH {
            dim: 2,
            facets: vec![f([1.0, 0.0]), f([-1.0, 0.0]), f([0.0, 1.0]), f([0.0, -1.0]), f([1.0, 1.0]), f([-1.0, -1.0])],
        })
        .unwrap();
        let v = s.ball_vertices().unwrap();
        assert_eq!(v.len(), 6);
        for p in v {
            assert!((s.norm(p) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sum_vertices_and_facets() {
        let sq = SpaceSpec::lp(2, f64::INFINITY);
        let s1 = NormedSpace::new(SpaceSpec::sum(1.0, sq.clone(), SpaceSpec::lp(1, 1.0))).unwrap();
        assert!(s1.is_polytopal());
        assert_eq!(s1.ball_vertices().unwrap().len(), 6);
        let si = NormedSpace::new(SpaceSpec::sum(f64::INFINITY, sq.clone(), SpaceSpec::lp(1, 1.0))).unwrap();
        assert_eq!(si.ball_vertices().unwrap().len(), 8);
        let s2 = NormedSpace::new(SpaceSpec::sum(2.0, sq, SpaceSpec::lp(1, 1.0))).unwrap();
        assert!(!s2.is_polytopal());
        for s in [&s1, &si] {
            for x in s.sphere_sample(1, 40) {
                assert!((facet_gauge(s.facets().unwrap(), &x) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn norming_and_support_are_consistent() {
        let specs = vec![
            SpaceSpec::lp(3, 3.0),
            SpaceSpec::lp(2, 1.0),
            SpaceSpec::lp(2, f64::INFINITY),
            SpaceSpec::sum(2.0, SpaceSpec::lp(2, 1.0), SpaceSpec::lp(1, 2.0)),
            SpaceSpec::lip_dyadic_grid(2),
        ];
        for spec in specs {
            let s = NormedSpace::new(spec).unwrap();
            for x in s.sphere_sample(9, 30) {
                let f = s.norming_functional(&x);
                assert!((dot(&f, &x) - 1.0).abs() < 1e-9);
                assert!((s.dual_norm(&f) - 1.0).abs() < 1e-9);
                let p = s.support_point(&x);
                assert!(s.norm(&p) <= 1.0 + 1e-9);
                assert!((dot(&x, &p) - s.dual_norm(&x)).abs() < 1e-9);
            }
        }
    }
}

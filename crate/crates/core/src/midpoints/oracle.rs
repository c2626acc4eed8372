use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{NormedSpace, SpaceSpec};

use super::check_alpha;

const MIN_RESOLUTION: usize = 64;
/// Cap on representatives in the two-term search.
const MAX_REPS: usize = 1200;
const GOLDEN_ITERS: usize = 48;

/// Interval enclosing `d(x, conv_n S^alpha)` from a boundary discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleBracket {
    pub lower: f64,
    pub upper: f64,
    pub resolution: usize,
    /// Largest norm distance between neighbouring boundary points.
    pub mesh: f64,
}

type P2 = [f64; 2];

/// Brute-force bracket for planar spaces.
///
/// Pairs of boundary points separated by at least `alpha` give points of
/// `S^alpha`, so distances computed from them are upper bounds. Every
/// admissible pair has grid neighbours within `mesh / 2` that are separated
/// by at least `alpha - mesh`; distances to that relaxed family minus
/// `mesh / 2` are lower bounds.
pub fn oracle_dist_2d(
    space: &NormedSpace,
    x: &[f64],
    n: usize,
    alpha: f64,
    resolution: usize,
) -> Result<OracleBracket> {
    if space.dim() != 2 {
        return Err(Error::UnsupportedSpace(format!("oracle needs dimension 2, got {}", space.dim())));
    }
    if matches!(space.spec(), SpaceSpec::Sum { .. }) && !space.is_polytopal() {
        return Err(Error::UnsupportedSpace("non-polytopal sum".into()));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::ResolutionTooLow(resolution));
    }
    check_alpha(alpha)?;
    space.checked_norm(x)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let xp = [x[0], x[1]];
    let boundary = boundary_points(space, resolution);
    let mesh = (0..boundary.len())
        .map(|i| nrm(space, sub2(boundary[(i + 1) % boundary.len()], boundary[i])))
        .fold(0.0, f64::max);

    let reach = boundary.iter().fold(0.0f64, |r, p| r.max(p[0].abs()).max(p[1].abs()));
    let mut strict = Family::new(space, xp, n, reach);
    let mut relaxed = Family::new(space, xp, n, reach);
    for_each_pair(space, &boundary, alpha, mesh, |m, exact| {
        relaxed.push(m);
        if exact {
            strict.push(m);
        }
    });
    if strict.count == 0 {
        return Err(Error::InvariantViolation("no admissible boundary pairs".into()));
    }

    let (lower, upper) = match n {
        1 => (relaxed.nearest - 0.5 * mesh, strict.nearest),
        2 => {
            let delta = nrm(space, [relaxed.cell, relaxed.cell]).max(nrm(space, [relaxed.cell, -relaxed.cell]));
            let mut ls = strict.reps();
            let h = strict.hull();
            let step = h.len().div_ceil(MAX_REPS).max(1);
            ls.extend(h.iter().step_by(step));
            let up = segment_min(space, xp, &ls).min(strict.nearest);
            let lo2 = segment_min(space, xp, &relaxed.reps()) - 0.5 * mesh - delta - 1e-8;
            let lo_hull = polygon_dist(space, xp, &relaxed.hull()) - 0.5 * mesh;
            (lo2.max(lo_hull), up)
        }
        _ => (
            polygon_dist(space, xp, &relaxed.hull()) - 0.5 * mesh,
            polygon_dist(space, xp, &strict.hull()),
        ),
    };
    Ok(OracleBracket { lower: lower.max(0.0), upper, resolution, mesh })
}

fn nrm(space: &NormedSpace, p: P2) -> f64 {
    space.norm(&p)
}

fn sub2(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// Boundary points in angular order, symmetric under negation, including
/// the ball vertices when the ball is a polygon.
fn boundary_points(space: &NormedSpace, resolution: usize) -> Vec<P2> {
    let half = resolution.div_ceil(2);
    let mut pts: Vec<(f64, P2)> = (0..half)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / half as f64;
            let d = [t.cos(), t.sin()];
            let s = 1.0 / nrm(space, d);
            (t, [d[0] * s, d[1] * s])
        })
        .collect();
    if let Ok(verts) = space.ball_vertices() {
        for v in verts {
            let t = v[1].atan2(v[0]);
            if (0.0..std::f64::consts::PI).contains(&t) {
                pts.push((t, [v[0], v[1]]));
            }
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.1[0] - b.1[0]).abs() < 1e-14 && (a.1[1] - b.1[1]).abs() < 1e-14);
    let mut out: Vec<P2> = pts.iter().map(|p| p.1).collect();
    out.extend(pts.iter().map(|p| [-p.1[0], -p.1[1]]));
    out
}

/// Calls `visit(midpoint, exact)` for every boundary pair separated by at
/// least `alpha - mesh`; `exact` marks separation at least `alpha`.
fn for_each_pair(space: &NormedSpace, b: &[P2], alpha: f64, mesh: f64, mut visit: impl FnMut(P2, bool)) {
    for i in 0..b.len() {
        for j in (i + 1)..b.len() {
            let sep = nrm(space, sub2(b[i], b[j]));
            if sep >= alpha - mesh {
                let m = [0.5 * (b[i][0] + b[j][0]), 0.5 * (b[i][1] + b[j][1])];
                visit(m, sep >= alpha - 1e-12);
            }
        }
    }
}

const HULL_BUFFER: usize = 1 << 16;

/// Streaming summary of a midpoint family: nearest distance to `x`, a hull
/// compacted as points arrive, and one representative per grid cell.
struct Family<'a> {
    space: &'a NormedSpace,
    x: P2,
    keep_hull: bool,
    keep_reps: bool,
    count: usize,
    nearest: f64,
    buffer: Vec<P2>,
    cell: f64,
    cells: std::collections::BTreeMap<(i64, i64), P2>,
}

impl<'a> Family<'a> {
    fn new(space: &'a NormedSpace, x: P2, n: usize, reach: f64) -> Self {
        let per_side = (MAX_REPS as f64).sqrt().floor() - 1.0;
        Family {
            space,
            x,
            keep_hull: n >= 2,
            keep_reps: n == 2,
            count: 0,
            nearest: f64::INFINITY,
            buffer: Vec::new(),
            cell: 2.0 * reach / per_side,
            cells: Default::default(),
        }
    }

    fn push(&mut self, m: P2) {
        self.count += 1;
        self.nearest = self.nearest.min(nrm(self.space, sub2(self.x, m)));
        if self.keep_hull {
            self.buffer.push(m);
            if self.buffer.len() >= HULL_BUFFER {
                self.buffer = hull(std::mem::take(&mut self.buffer));
            }
        }
        if self.keep_reps {
            let key = ((m[0] / self.cell).floor() as i64, (m[1] / self.cell).floor() as i64);
            self.cells.entry(key).or_insert(m);
        }
    }

    fn hull(&self) -> Vec<P2> {
        hull(self.buffer.clone())
    }

    fn reps(&self) -> Vec<P2> {
        self.cells.values().copied().collect()
    }
}

fn seg_dist(space: &NormedSpace, x: P2, a: P2, b: P2) -> f64 {
    let d = sub2(b, a);
    let f = |t: f64| nrm(space, [x[0] - a[0] - t * d[0], x[1] - a[1] - t * d[1]]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut c, mut e) = (hi - g, g);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..GOLDEN_ITERS {
        if fc <= fe {
            hi = e;
            e = c;
            fe = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + g * (hi - lo);
            fe = f(e);
        }
    }
    fc.min(fe).min(f(0.0)).min(f(1.0))
}

fn segment_min(space: &NormedSpace, x: P2, pts: &[P2]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.min(seg_dist(space, x, pts[i], pts[j]));
        }
    }
    best
}

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain).
fn hull(mut pts: Vec<P2>) -> Vec<P2> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut h: Vec<P2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &P2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    h
}

fn polygon_dist(space: &NormedSpace, x: P2, poly: &[P2]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => nrm(space, sub2(x, poly[0])),
        2 => seg_dist(space, x, poly[0], poly[1]),
        k => {
            if (0..k).all(|i| cross(poly[i], poly[(i + 1) % k], x) >= 0.0) {
                return 0.0;
            }
            (0..k).map(|i| seg_dist(space, x, poly[i], poly[(i + 1) % k])).fold(f64::INFINITY, f64::min)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_points() {
        let h = hull(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn rejects_low_resolution_and_dimension() {
        let s = NormedSpace::new(SpaceSpec::lp(2, 2.0)).unwrap();
        assert!(matches!(
            oracle_dist_2d(&s, &[1.0, 0.0], 1, 1.0, 16),
            Err(Error::ResolutionTooLow(16))
        ));
        let s3 = NormedSpace::new(SpaceSpec::lp(3, 2.0)).unwrap();
        assert!(matches!(
            oracle_dist_2d(&s3, &[1.0, 0.0, 0.0], 1, 1.0, 128),
            Err(Error::UnsupportedSpace(_))
        ));
    }

    #[test]
    fn brackets_known_values() {
        let l2 = NormedSpace::new(SpaceSpec::lp(2, 2.0)).unwrap();
        let b = oracle_dist_2d(&l2, &[1.0, 0.0], 1, 1.0, 512).unwrap();
        let exact = 1.0 - 0.75f64.sqrt();
        assert!(b.lower <= exact && exact <= b.upper, "{b:?}");
        let linf = NormedSpace::new(SpaceSpec::lp(2, f64::INFINITY)).unwrap();
        for (n, exact) in [(1, 1.0), (2, 0.5), (3, 0.5)] {
            let b = oracle_dist_2d(&linf, &[1.0, 1.0], n, 2.0, 512).unwrap();
            assert!(b.lower <= exact + 1e-12 && exact <= b.upper + 1e-12, "{n}: {b:?}");
            assert!(b.upper - exact < 1e-9, "{n}: {b:?}");
        }
    }
}

//! Small generic optimizers used by the heuristic paths.

use crate::linalg::{axpy, euclid, sub};
use crate::rng::{gaussian_vec, StreamRng};
use crate::space::NormedSpace;

/// Maximizes `eval` by adaptive random search (1/5-success step control).
/// `eval` returns `None` at infeasible points; `start` must be feasible.
pub fn adaptive_search<F>(
    start: Vec<f64>,
    eval: F,
    rng: &mut StreamRng,
    iterations: usize,
    initial_step: f64,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let mut best_val = eval(&start).expect("feasible start");
    let mut best = start;
    let mut step = initial_step;
    let n = best.len();
    for _ in 0..iterations {
        let g = gaussian_vec(rng, n);
        let gn = euclid(&g).max(1e-300);
        let mut cand = best.clone();
        axpy(&mut cand, step / gn, &g);
        match eval(&cand) {
            Some(v) if v > best_val => {
                best_val = v;
                best = cand;
                step *= 1.5;
            }
            _ => step *= 0.9,
        }
        if step < 1e-13 {
            break;
        }
    }
    (best, best_val)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

pub fn combine(weights: &[f64], points: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut z = vec![0.0; dim];
    for (w, p) in weights.iter().zip(points) {
        axpy(&mut z, *w, p);
    }
    z
}

/// `min_{mu in simplex} ||target - sum mu_j points_j||` in the given space,
/// by projected gradient on half the squared norm. Returns the weights.
pub fn min_norm_on_simplex(
    space: &NormedSpace,
    target: &[f64],
    points: &[Vec<f64>],
    warm: Option<&[f64]>,
    iterations: usize,
) -> Vec<f64> {
    let n = points.len();
    let dim = target.len();
    let objective = |w: &[f64]| {
        let r = sub(target, &combine(w, points, dim));
        let v = space.norm(&r);
        0.5 * v * v
    };
    let mut w = match warm {
        Some(w) if w.len() == n => project_simplex(w),
        _ => vec![1.0 / n as f64; n],
    };
    let mut val = objective(&w);
    let mut step = 1.0;
    for _ in 0..iterations {
        let r = sub(target, &combine(&w, points, dim));
        let rn = space.norm(&r);
        if rn == 0.0 {
            break;
        }
        let f = space.norming_functional(&r);
        let grad: Vec<f64> = points.iter().map(|p| -rn * crate::linalg::dot(&f, p)).collect();
        let mut improved = false;
        while step > 1e-16 {
            let mut trial = w.clone();
            axpy(&mut trial, -step, &grad);
            let trial = project_simplex(&trial);
            let tv = objective(&trial);
            if tv < val - 1e-18 {
                let moved: f64 = trial.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
                w = trial;
                val = tv;
                step *= 2.0;
                improved = moved > 1e-15;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    w
}

/// Minimizes the convex `t -> ||x - (a + t (b - a))||` over `[0, 1]`.
pub fn min_on_segment(space: &NormedSpace, x: &[f64], a: &[f64], b: &[f64]) -> (f64, f64) {
    let d = sub(b, a);
    let eval = |t: f64| {
        let p: Vec<f64> = a.iter().zip(&d).map(|(ai, di)| ai + t * di).collect();
        space.norm(&sub(x, &p))
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut e = lo + g * (hi - lo);
    let (mut fc, mut fe) = (eval(c), eval(e));
    for _ in 0..70 {
        if fc <= fe {
            hi = e;
            e = c;
            fe = fc;
            c = hi - g * (hi - lo);
            fc = eval(c);
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + g * (hi - lo);
            fe = eval(e);
        }
    }
    let candidates = [(0.0, eval(0.0)), (1.0, eval(1.0)), (0.5 * (lo + hi), eval(0.5 * (lo + hi)))];
    candidates.into_iter().min_by(|p, q| p.1.total_cmp(&q.1)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::space::SpaceSpec;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn search_finds_interior_maximum() {
        let mut r = stream(1, 0, 0);
        let (x, v) = adaptive_search(
            vec![0.0, 0.0],
            |p| Some(-(p[0] - 0.3).powi(2) - (p[1] + 0.2).powi(2)),
            &mut r,
            2000,
            0.5,
        );
        assert!(v > -1e-12 && (x[0] - 0.3).abs() < 1e-6 && (x[1] + 0.2).abs() < 1e-6, "{v} at {x:?}");
    }

    #[test]
    fn search_approaches_boundary_maximum() {
        let mut r = stream(1, 0, 0);
        let feasible = |p: &[f64]| p[0] * p[0] + p[1] * p[1] <= 1.0;
        let (x, v) = adaptive_search(
            vec![0.0, 0.0],
            |p| if feasible(p) { Some(p[0] + p[1]) } else { None },
            &mut r,
            2000,
            0.5,
        );
        assert!(feasible(&x));
        // the improving cone narrows along a curved boundary, so progress stalls short of the optimum
        assert!(v <= 2f64.sqrt() && v > 2f64.sqrt() - 0.05, "{v} at {x:?}");
    }

    #[test]
    fn simplex_min_norm_euclidean() {
        let l2 = NormedSpace::new(SpaceSpec::lp(2, 2.0)).unwrap();
        let pts = vec![vec![1.0, -1.0], vec![1.0, 1.0]];
        let w = min_norm_on_simplex(&l2, &[3.0, 0.0], &pts, None, 500);
        assert!((w[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn segment_minimum() {
        let linf = NormedSpace::new(SpaceSpec::lp(2, f64::INFINITY)).unwrap();
        let (t, v) = min_on_segment(&linf, &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]);
        assert!((v - 0.5).abs() < 1e-9 && (t - 0.5).abs() < 1e-6);
    }
}

//! Known values of C_n^alpha and of midpoint-hull distances.

use slicegeom_core::midpoints::{
    cn_alpha, combination_value, dist_to_midpoint_hull, oracle_dist_2d, HullMethod,
};
use slicegeom_core::{NormedSpace, SolverBudget, SpaceSpec};

fn space(spec: SpaceSpec) -> NormedSpace {
    NormedSpace::new(spec).unwrap()
}

fn euclid_c(alpha: f64) -> f64 {
    1.0 - (1.0 - alpha * alpha / 4.0).sqrt()
}

#[test]
fn euclidean_plane_is_constant_in_n() {
    let l2 = space(SpaceSpec::lp(2, 2.0));
    let b = SolverBudget { samples: 8, ..SolverBudget::default() };
    assert!((euclid_c(1.0) - 0.1339746).abs() < 1e-7);
    for alpha in [0.2, 1.0, 1.9] {
        for n in [1, 2, 3, 5] {
            let e = cn_alpha(&l2, n, alpha, &b).unwrap();
            let exact = euclid_c(alpha);
            assert!((e.value - exact).abs() < 1e-4, "a={alpha} n={n}: {} vs {exact}", e.value);
            combination_value(&l2, &e.witness).unwrap();
        }
    }
}

#[test]
fn max_norm_plane() {
    let linf = space(SpaceSpec::lp(2, f64::INFINITY));
    let b = SolverBudget::default();
    for (n, alpha, exact) in [(1, 2.0, 1.0), (2, 2.0, 0.5), (3, 2.0, 0.5), (7, 2.0, 0.5), (3, 1.0, 0.25), (3, 1.9, 0.475)] {
        let e = cn_alpha(&linf, n, alpha, &b).unwrap();
        assert!((e.value - exact).abs() < 1e-7, "n={n} a={alpha}: {}", e.value);
        let lower = e.lower.unwrap();
        assert!(lower <= exact + 1e-9 && lower > exact - 1e-6, "{lower}");
    }
}

#[test]
fn max_norm_distance_at_corner() {
    let linf = space(SpaceSpec::lp(2, f64::INFINITY));
    let b = SolverBudget::default();
    let d = dist_to_midpoint_hull(&linf, &[1.0, 1.0], 2, 2.0, &b).unwrap();
    assert!((d.value - 0.5).abs() < 1e-9);
    assert_eq!(d.method, HullMethod::PieceLp);
    let p = combination_value(&linf, &d.witness).unwrap();
    assert!((linf.norm(&[1.0 - p[0], 1.0 - p[1]]) - 0.5).abs() < 1e-9);
}

#[test]
fn lipschitz_grids_match_cube_values() {
    let b = SolverBudget::default();
    for (k, exact) in [(1u32, 0.475), (2, 0.2375), (3, 0.11875)] {
        let s = space(SpaceSpec::lip_dyadic_grid(k));
        let n = s.dim() + 1;
        let e = cn_alpha(&s, n, 1.9, &b).unwrap();
        assert!((e.value - exact).abs() < 1e-6, "k={k}: {}", e.value);
        assert!(e.upper.is_some());
    }
}

#[test]
fn oracle_agrees_with_solver() {
    let b = SolverBudget::default();
    let hex = space(SpaceSpec::symmetric_polygon(&[[1.0, 0.0], [0.5, 0.8], [-0.5, 0.8]]));
    let l3 = space(SpaceSpec::lp(2, 3.0));
    for s in [&hex, &l3] {
        for (n, alpha) in [(1, 1.0), (2, 1.0), (3, 1.5), (2, 0.4)] {
            let x = s.project_to_sphere(&[1.0, 0.3]).unwrap();
            let d = dist_to_midpoint_hull(s, &x, n, alpha, &b).unwrap();
            let o = oracle_dist_2d(s, &x, n, alpha, 1024).unwrap();
            assert!(d.value <= o.upper + 1e-6);
            assert!(d.value >= o.lower - 1e-6);
        }
    }
}

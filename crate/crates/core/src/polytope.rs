//! Vertex enumeration for bounded polyhedra `{x : A x <= b}` by the
//! double-description method on the homogenized cone
//! `{(x, t) : A x - b t <= 0, t >= 0}`.
//!
//! Adjacency of extreme rays uses the combinatorial test: two rays are
//! adjacent iff no third ray is tight on every constraint they share.

use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs, max_abs_diff, rank, solve};

/// Rays and constraint rows are scaled to max-abs 1; this is the zero test.
const TIGHT: f64 = 1e-9;
pub const DEDUP_TOL: f64 = 1e-10;

#[derive(Clone)]
struct Ray {
    v: Vec<f64>,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

fn normalize(v: &mut [f64]) {
    let m = max_abs(v);
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
}

/// Vertices of the bounded polyhedron `{x : normals[i] . x <= offsets[i]}`.
///
/// Fails when the system is empty, unbounded, or not full rank.
pub fn vertices(normals: &[Vec<f64>], offsets: &[f64], dim: usize) -> Result<Vec<Vec<f64>>> {
    let big_d = dim + 1;
    // t >= 0 first, then the given rows.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(normals.len() + 1);
    let mut t_row = vec![0.0; big_d];
    t_row[dim] = -1.0;
    rows.push(t_row);
    for (a, &b) in normals.iter().zip(offsets) {
        if a.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: a.len() });
        }
        let mut r = a.clone();
        r.push(-b);
        normalize(&mut r);
        rows.push(r);
    }
    let words = rows.len().div_ceil(64);

    // Greedy choice of big_d independent rows for the initial simplicial cone.
    let mut basis: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<f64>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        basis_rows.push(r.clone());
        if rank(&basis_rows, 1e-10) == basis_rows.len() {
            basis.push(i);
            if basis.len() == big_d {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    if basis.len() < big_d {
        return Err(Error::InvalidArgument("constraint system is not full rank".into()));
    }
    let mut rays: Vec<Ray> = Vec::with_capacity(big_d);
    for j in 0..big_d {
        let mut rhs = vec![0.0; big_d];
        rhs[j] = -1.0;
        let mut v = solve(&basis_rows, &rhs, 1e-12)
            .ok_or_else(|| Error::InvalidArgument("singular initial basis".into()))?;
        normalize(&mut v);
        let mut zeros = vec![0u64; words];
        for (k, &bi) in basis.iter().enumerate() {
            if k != j {
                bit_set(&mut zeros, bi);
            }
        }
        rays.push(Ray { v, zeros });
    }

    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > TIGHT).collect();
        if pos.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].abs() <= TIGHT {
                    bit_set(&mut r.zeros, i);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -TIGHT).collect();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for &p in &pos {
            for &n in &neg {
                let common = bits_and(&rays[p].zeros, &rays[n].zeros);
                if popcount(&common) + 2 < big_d {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == n || !bits_subset(&common, &r.zeros));
                if !adjacent {
                    continue;
                }
                let (sp, sn) = (vals[p], vals[n]);
                let mut v: Vec<f64> =
                    rays[n].v.iter().zip(&rays[p].v).map(|(a, b)| sp * a - sn * b).collect();
                normalize(&mut v);
                let mut zeros = common;
                bit_set(&mut zeros, i);
                next.push(Ray { v, zeros });
            }
        }
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k] > TIGHT {
                continue;
            }
            if vals[k].abs() <= TIGHT {
                bit_set(&mut r.zeros, i);
            }
            next.push(r);
        }
        rays = next;
    }

    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in &rays {
        let t = r.v[dim];
        if t <= TIGHT {
            return Err(Error::InvalidArgument("polyhedron is unbounded".into()));
        }
        let x: Vec<f64> = r.v[..dim].iter().map(|c| c / t).collect();
        if !out.iter().any(|y| max_abs_diff(y, &x) <= DEDUP_TOL) {
            out.push(x);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("polyhedron is empty".into()));
    }
    Ok(out)
}

/// Facet normals (scaled to offset 1) of `conv(points)`, assuming the origin
/// is interior: the vertices of the polar body.
pub fn facets_of_hull(points: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    let ones = vec![1.0; points.len()];
    vertices(points, &ones, dim)
}

//! Browser bindings for the slicegeom demo page.
//!
//! Each export takes plain numbers plus a space preset name and returns a
//! JSON string; the page draws from that JSON. The `*_json` functions hold the
//! logic so they can be tested natively.

use serde::Serialize;
use serde_json::{json, Value};
use slicegeom_core::linalg::sub;
use slicegeom_core::midpoints::{dist_to_midpoint_hull, HullMethod};
use slicegeom_core::sandbox::{spike, spike_average_deficit_grid, spike_deficit_binomial};
use slicegeom_core::slices::{make_slice, slice_diameter};
use slicegeom_core::{NormedSpace, SolverBudget, SpaceSpec};
use wasm_bindgen::prelude::wasm_bindgen;

const OUTLINE_POINTS: usize = 240;
const CLOUD_POINTS: usize = 96;
const GRID_CELLS: f64 = (1u64 << 20) as f64;

pub const PRESETS: [&str; 5] = ["l2", "linf", "l1", "l3", "hexagon"];

pub fn preset(name: &str) -> Result<NormedSpace, String> {
    let spec = match name {
        "l2" => SpaceSpec::lp(2, 2.0),
        "linf" => SpaceSpec::lp(2, f64::INFINITY),
        "l1" => SpaceSpec::lp(2, 1.0),
        "l3" => SpaceSpec::lp(2, 3.0),
        "hexagon" => SpaceSpec::symmetric_polygon(&[[1.0, 0.0], [0.5, 0.8], [-0.5, 0.8]]),
        other => return Err(format!("unknown space {other:?}")),
    };
    NormedSpace::new(spec).map_err(|e| e.to_string())
}

fn budget() -> SolverBudget {
    SolverBudget { samples: 8, iterations: 200, ..SolverBudget::default() }
}

fn boundary(space: &NormedSpace, count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / count as f64;
            let r = space.norm(&[t.cos(), t.sin()]);
            [t.cos() / r, t.sin() / r]
        })
        .collect()
}

#[derive(Serialize)]
struct SliceView {
    outline: Vec<[f64; 2]>,
    functional: Vec<f64>,
    threshold: f64,
    diameter: f64,
    certified: bool,
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Slice `{x in B : <f, x> > sup f(B) - depth}` with `f = (cos t, sin t)`.
pub fn slice_json(space: &str, angle: f64, depth: f64) -> Result<String, String> {
    let s = preset(space)?;
    let slice = make_slice(&s, &[angle.cos(), angle.sin()], depth).map_err(|e| e.to_string())?;
    let d = slice_diameter(&s, &slice, &budget()).map_err(|e| e.to_string())?;
    let view = SliceView {
        outline: boundary(&s, OUTLINE_POINTS),
        threshold: slice.threshold(),
        functional: slice.functional,
        diameter: d.upper,
        certified: d.certified,
        u: d.witness.0,
        v: d.witness.1,
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

/// Distance from the sphere point in direction `angle` to the `n`-term hull
/// of `S^alpha`, with a sampled cloud of `S^alpha` for drawing.
pub fn midpoint_json(space: &str, angle: f64, n: usize, alpha: f64) -> Result<String, String> {
    let s = preset(space)?;
    let x = s.project_to_sphere(&[angle.cos(), angle.sin()]).map_err(|e| e.to_string())?;
    let d = dist_to_midpoint_hull(&s, &x, n, alpha, &budget()).map_err(|e| e.to_string())?;
    let rim = boundary(&s, CLOUD_POINTS);
    let mut cloud = Vec::new();
    for (i, a) in rim.iter().enumerate() {
        for b in &rim[i + 1..] {
            if s.norm(&sub(a, b)) >= alpha {
                cloud.push([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]);
            }
        }
    }
    let terms: Vec<_> = d
        .witness
        .terms
        .iter()
        .map(|t| json!({ "weight": t.weight, "u": t.u, "v": t.v, "m": t.midpoint() }))
        .collect();
    let method = match d.method {
        HullMethod::PieceLp => "piece_lp",
        HullMethod::SubsetLp => "subset_lp",
        HullMethod::ColumnGeneration => "column_generation",
        HullMethod::Heuristic => "heuristic",
    };
    Ok(json!({
        "outline": boundary(&s, OUTLINE_POINTS),
        "x": x,
        "distance": d.value,
        "lower": d.lower,
        "exact": d.exact,
        "method": method,
        "point": d.witness.point(),
        "terms": terms,
        "cloud": cloud,
    })
    .to_string())
}

/// `||(1/n) sum f_j - 1||` for `n` independent spikes of width `s`, for
/// `n = 1..=nmax`. The product grid is integrated only while it has at most
/// `2^20` cells.
pub fn spikes_json(s: f64, nmax: usize) -> Result<String, String> {
    let width = spike(s, 0, 1).map_err(|e| e.to_string())?.values().len();
    let rows: Vec<Value> = (1..=nmax.max(1))
        .map(|n| {
            let small = (width as f64).powi(n as i32) <= GRID_CELLS;
            let grid = if small { spike_average_deficit_grid(s, n).ok() } else { None };
            json!({ "n": n, "value": spike_deficit_binomial(s, n), "grid": grid })
        })
        .collect();
    Ok(Value::Array(rows).to_string())
}

#[wasm_bindgen]
pub fn slice_view(space: &str, angle: f64, depth: f64) -> Result<String, String> {
    slice_json(space, angle, depth)
}

#[wasm_bindgen]
pub fn midpoint_view(space: &str, angle: f64, n: usize, alpha: f64) -> Result<String, String> {
    midpoint_json(space, angle, n, alpha)
}

#[wasm_bindgen]
pub fn spike_view(s: f64, nmax: usize) -> Result<String, String> {
    spikes_json(s, nmax)
}

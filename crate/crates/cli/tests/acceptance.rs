//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use slicegeom_core::criterion::{
    decay_profile, sequence_criterion, uniform_verdict, FilterSurrogate, Verdict, DEFAULT_THETA,
};
use slicegeom_core::midpoints::{cn_alpha, combine_lp_sum, dist_to_midpoint_hull, oracle_dist_2d};
use slicegeom_core::rng::{stream, uniform};
use slicegeom_core::sandbox::{
    check_dm_calculus, dm, l1_norm, random_dyadic, spike, spike_average_deficit,
    spike_average_deficit_grid, spike_deficit_binomial, StepFunction,
};
use slicegeom_core::slices::{make_slice, separating_slice, slice_diameter, slice_spread_witness};
use slicegeom_core::{NormedSpace, SolverBudget, SpaceSpec};

type Outcome = Result<String, String>;

fn space(spec: SpaceSpec) -> NormedSpace {
    NormedSpace::new(spec).expect("valid test space")
}

fn budget() -> SolverBudget {
    SolverBudget { samples: 8, ..SolverBudget::default() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn euclid(alpha: f64) -> f64 {
    1.0 - (1.0 - alpha * alpha / 4.0).sqrt()
}

fn dist(s: &NormedSpace, a: &[f64], b: &[f64]) -> f64 {
    s.norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

/// Symmetric polygon through three seeded directions, sheared.
fn random_polygon(seed: u64, index: u64) -> SpaceSpec {
    let mut rng = stream(seed, 7, index);
    let mut t = 0.0;
    let (a, b, c) = (0.6 + 0.8 * uniform(&mut rng), 0.8 * uniform(&mut rng) - 0.4, 0.6 + 0.8 * uniform(&mut rng));
    let half: Vec<[f64; 2]> = (0..3)
        .map(|_| {
            t += 0.3 + 0.6 * uniform(&mut rng);
            [a * t.cos() + b * t.sin(), c * t.sin()]
        })
        .collect();
    SpaceSpec::symmetric_polygon(&half)
}

fn euclidean_closed_form() -> Outcome {
    let l2 = space(SpaceSpec::lp(2, 2.0));
    let b = budget();
    let x = [1.0, 0.0];
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let exact = euclid(alpha);
        for n in 1..=4 {
            let o = oracle_dist_2d(&l2, &x, n, alpha, 2048).map_err(|e| e.to_string())?;
            ensure(o.lower - 1e-9 <= exact && exact <= o.upper + 1e-9, || {
                format!("oracle [{}, {}] misses {exact} at a={alpha} n={n}", o.lower, o.upper)
            })?;
            let e = cn_alpha(&l2, n, alpha, &b).map_err(|e| e.to_string())?;
            worst = worst.max((e.value - exact).abs());
            ensure((e.value - exact).abs() <= 1e-3, || format!("a={alpha} n={n}: {} vs {exact}", e.value))?;
        }
    }
    Ok(format!("max |C - closed form| = {worst:.2e}, oracle brackets contain the closed form"))
}

fn max_norm_values() -> Outcome {
    let linf = space(SpaceSpec::lp(2, f64::INFINITY));
    let b = budget();
    for (n, exact) in [(1, 1.0), (2, 0.5), (3, 0.5), (4, 0.5)] {
        let e = cn_alpha(&linf, n, 2.0, &b).map_err(|e| e.to_string())?;
        ensure((e.value - exact).abs() <= 1e-3, || format!("n={n}: {}", e.value))?;
        let lower = e.lower.ok_or(format!("n={n}: no certified lower bound"))?;
        ensure(lower > exact - 1e-3 && lower <= exact + 1e-9, || format!("n={n}: lower {lower}"))?;
        let o = oracle_dist_2d(&linf, &e.argmax, n, 2.0, 16384).map_err(|e| e.to_string())?;
        ensure(o.lower > exact - 1e-3 && o.upper < exact + 1e-3, || {
            format!("n={n}: oracle [{}, {}]", o.lower, o.upper)
        })?;
    }
    Ok("C_1 = 1 and C_2..4 = 0.5, certified lower bounds and oracle brackets agree".into())
}

fn brute_slice_diameter(s: &NormedSpace, f: &[f64], threshold: f64, points: usize) -> f64 {
    let pts: Vec<Vec<f64>> = (0..points)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / points as f64;
            let d = [t.cos(), t.sin()];
            let r = s.norm(&d);
            vec![d[0] / r, d[1] / r]
        })
        .filter(|p| f[0] * p[0] + f[1] * p[1] >= threshold)
        .collect();
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(dist(s, &pts[i], &pts[j]));
        }
    }
    best
}

fn slice_chords() -> Outcome {
    let l2 = space(SpaceSpec::lp(2, 2.0));
    let b = SolverBudget::default();
    for depth in [0.1, 0.5, 1.0] {
        let d = slice_diameter(&l2, &make_slice(&l2, &[0.6, 0.8], depth).map_err(|e| e.to_string())?, &b)
            .map_err(|e| e.to_string())?;
        let exact = 2.0 * (2.0 * depth - depth * depth).sqrt();
        ensure((d.upper - exact).abs() <= 1e-6, || format!("depth {depth}: {} vs {exact}", d.upper))?;
    }
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let s = space(random_polygon(31, k));
        let mut rng = stream(31, 8, k);
        let t = std::f64::consts::TAU * uniform(&mut rng);
        let f = [t.cos(), t.sin()];
        let depth = 0.05 + 1.2 * uniform(&mut rng);
        let slice = make_slice(&s, &f, depth).map_err(|e| e.to_string())?;
        let exact = slice_diameter(&s, &slice, &b).map_err(|e| e.to_string())?;
        ensure(exact.certified, || format!("polygon {k}: exact path not taken"))?;
        let brute = brute_slice_diameter(&s, &slice.functional, slice.threshold(), 10_000);
        let mesh = 2.0 * std::f64::consts::TAU / 10_000.0 * 3.0;
        worst = worst.max(exact.upper - brute);
        ensure(brute <= exact.upper + 1e-9 && brute >= exact.upper - mesh, || {
            format!("polygon {k}: exact {} brute {brute}", exact.upper)
        })?;
    }
    Ok(format!("chord formula within 1e-6; 20 polygons, max exact - brute = {worst:.2e}"))
}

fn slice_witnesses() -> Outcome {
    let b = SolverBudget::default();
    let l2 = space(SpaceSpec::lp(2, 2.0));
    let sep = separating_slice(&l2, &[1.0, 0.0], 1.9, 0.1, &b).map_err(|e| e.to_string())?;
    ensure(sep.slice.contains(&l2, &[1.0, 0.0]), || "x0 not in the separating slice".into())?;
    // sup of <f, S^1.8> over the disc is sqrt(1 - 0.81) |f|_*
    let fnorm = l2.dual_norm(&sep.slice.functional);
    ensure(sep.slice.threshold() > 0.19f64.sqrt() * fnorm, || "threshold below the midpoint support".into())?;
    let diam = slice_diameter(&l2, &sep.slice, &b).map_err(|e| e.to_string())?;
    let depth = sep.slice.depth / fnorm;
    let chord = 2.0 * (2.0 * depth - depth * depth).sqrt();
    ensure(diam.upper <= 1.8 + 1e-3 && chord <= 1.8 + 1e-3, || {
        format!("slice diameter {} (chord {chord})", diam.upper)
    })?;
    let (u, v) = (&diam.witness.0, &diam.witness.1);
    ensure((dist(&l2, u, v) - diam.upper).abs() < 1e-9, || "diameter witness mismatch".into())?;

    let linf = space(SpaceSpec::lp(2, f64::INFINITY));
    let s = make_slice(&linf, &[1.0, 0.0], 0.2).map_err(|e| e.to_string())?;
    let (u, v) = slice_spread_witness(&linf, &s, 2.0, 0.01, &b).map_err(|e| e.to_string())?;
    let d = (u[0] - v[0]).abs().max((u[1] - v[1]).abs());
    ensure(d >= 1.99, || format!("spread {d}"))?;
    ensure(s.contains_closed(&linf, &u) && s.contains_closed(&linf, &v), || "witness outside slice".into())?;
    ensure(u.iter().chain(&v).all(|c| c.abs() <= 1.0 + 1e-12), || "witness outside ball".into())?;
    Ok(format!("separating slice diameter {:.6}, spread witness distance {d:.6}", diam.upper))
}

fn sum_combiner() -> Outcome {
    let b = SolverBudget { samples: 8, iterations: 200, ..SolverBudget::default() };
    let mut worst_slack = f64::INFINITY;
    for i in 0..100u64 {
        let mut rng = stream(2024, 9, i);
        let p = [1.0, 2.0, 3.0][(i % 3) as usize];
        let pick = |k: u64| match k % 3 {
            0 => SpaceSpec::lp(2, 2.0),
            1 => SpaceSpec::lp(2, f64::INFINITY),
            _ => random_polygon(2024, 1000 + k),
        };
        let (xs_spec, ys_spec) = (pick(i / 3), pick(i / 9 + i));
        let xs = space(xs_spec.clone());
        let ys = space(ys_spec.clone());
        let sum = space(SpaceSpec::sum(p, xs_spec, ys_spec));
        let raw: Vec<f64> = (0..4).map(|_| 2.0 * uniform(&mut rng) - 1.0).collect();
        let z: Vec<f64> = raw.iter().map(|v| v / sum.norm(&raw)).collect();
        let alpha = 0.2 + 1.7 * uniform(&mut rng);
        let n = 1 + (i % 3) as usize;
        let xh = xs.project_to_sphere(&z[..2]).map_err(|e| e.to_string())?;
        let yh = ys.project_to_sphere(&z[2..]).map_err(|e| e.to_string())?;
        let dx = dist_to_midpoint_hull(&xs, &xh, n, alpha, &b).map_err(|e| e.to_string())?;
        let dy = dist_to_midpoint_hull(&ys, &yh, n, alpha, &b).map_err(|e| e.to_string())?;
        let c = combine_lp_sum(&sum, &z, &dx.witness, &dy.witness).map_err(|e| format!("instance {i}: {e}"))?;
        c.check(&sum).map_err(|e| format!("instance {i}: {e}"))?;
        for t in &c.terms {
            ensure(sum.norm(&t.u) <= 1.0 + 1e-9 && sum.norm(&t.v) <= 1.0 + 1e-9, || format!("instance {i}: outside ball"))?;
            ensure(dist(&sum, &t.u, &t.v) >= alpha - 1e-9, || format!("instance {i}: separation"))?;
        }
        let err = dist(&sum, &z, &c.point());
        let ex = dist(&xs, &xh, &dx.witness.point());
        let ey = dist(&ys, &yh, &dy.witness.point());
        let bound = (ex.powf(p) + ey.powf(p)).powf(1.0 / p);
        worst_slack = worst_slack.min(bound - err);
        ensure(err <= bound + 1e-9, || format!("instance {i}: {err} > {bound}"))?;
    }
    Ok(format!("100 instances admissible, min slack of the error bound {worst_slack:.2e}"))
}

fn monotone_suite() -> Outcome {
    let b = budget();
    let suite = [
        ("l2", SpaceSpec::lp(2, 2.0)),
        ("linf", SpaceSpec::lp(2, f64::INFINITY)),
        ("l1", SpaceSpec::lp(2, 1.0)),
        ("l3", SpaceSpec::lp(2, 3.0)),
        ("hexagon", SpaceSpec::symmetric_polygon(&[[1.0, 0.0], [0.5, 0.8], [-0.5, 0.8]])),
        ("lip1", SpaceSpec::lip_dyadic_grid(1)),
        ("l1-3d", SpaceSpec::lp(3, 1.0)),
    ];
    let alphas = [0.5, 1.0, 1.5, 2.0];
    let mut raw_dips: f64 = 0.0;
    for (id, spec) in suite {
        let s = space(spec);
        let d = s.dim();
        let p = decay_profile(&s, id, &alphas, d + 2, &b).map_err(|e| e.to_string())?;
        for (i, row) in p.cleaned.iter().enumerate() {
            for j in 1..row.len() {
                ensure(row[j] <= row[j - 1] + 1e-3, || format!("{id}: not non-increasing in n at a={}", alphas[i]))?;
                raw_dips = raw_dips.max(p.raw[i][j] - p.raw[i][j - 1]);
            }
            let stable = row[d];
            for &v in &row[d + 1..] {
                ensure((v - stable).abs() <= 2e-3, || format!("{id}: C_n differs from C_(d+1) by {}", v - stable))?;
            }
        }
        for j in 0..p.ns.len() {
            for i in 1..alphas.len() {
                ensure(p.cleaned[i][j] >= p.cleaned[i - 1][j] - 1e-3, || {
                    format!("{id}: decreasing in alpha at n={}", p.ns[j])
                })?;
            }
        }
    }
    Ok(format!("7 spaces monotone in n and alpha, stable past dim + 1; largest raw increase in n {raw_dips:.1e}"))
}

fn verdicts() -> Outcome {
    let b = budget();
    for (id, spec) in [("l2", SpaceSpec::lp(2, 2.0)), ("linf", SpaceSpec::lp(2, f64::INFINITY))] {
        let s = space(spec);
        let p = decay_profile(&s, id, &[0.9, 1.0, 2.0], 3, &b).map_err(|e| e.to_string())?;
        for alpha in [1.0, 2.0] {
            let i = p.alpha_index(alpha).expect("alpha on grid");
            let single = slicegeom_core::criterion::DecayProfile {
                alphas: vec![alpha],
                estimates: vec![p.estimates[i].clone()],
                raw: vec![p.raw[i].clone()],
                cleaned: vec![p.cleaned[i].clone()],
                ..p.clone()
            };
            let v = uniform_verdict(&single, DEFAULT_THETA).map_err(|e| e.to_string())?;
            ensure(v.verdict == Verdict::CertifiedFailure, || format!("{id} at a={alpha}: {:?}", v.verdict))?;
        }
        let family = vec![p.clone(); 8];
        let seq = sequence_criterion(&family, 1.0, 0.1, &[DEFAULT_THETA, 0.05, 0.2], FilterSurrogate::Frechet)
            .map_err(|e| e.to_string())?;
        ensure(seq.rows[0].n.is_none() && seq.rows[1].n.is_none(), || format!("{id}: small deltas qualified"))?;
        ensure(!seq.satisfied, || format!("{id}: constant family satisfies the hypothesis"))?;
    }
    Ok("l2 and linf certified_failure at alpha 1 and 2; constant families fail the sequence test".into())
}

fn lipschitz_trend() -> Outcome {
    let b = budget();
    let eps = 0.1;
    let mut prev = f64::INFINITY;
    let mut notes = Vec::new();
    for k in 1..=3u32 {
        let s = space(SpaceSpec::lip_dyadic_grid(k));
        let n = s.dim() + 1;
        let e = cn_alpha(&s, n, 1.9, &b).map_err(|e| e.to_string())?;
        ensure(e.value <= prev + 5e-3, || format!("k={k}: {} after {prev}", e.value))?;
        notes.push(format!("k={k}: C_{n} = {:.5} vs 4/n + eps = {:.5}", e.value, 4.0 / n as f64 + eps));
        prev = e.value;
    }
    Ok(notes.join("; "))
}

fn sandbox_exactness() -> Outcome {
    let zero = StepFunction::zero(1);
    let f = StepFunction::new(vec![2], vec![2.0, 0.0, 0.0, 0.0]).map_err(|e| e.to_string())?;
    ensure(dm(&f, &zero).map_err(|e| e.to_string())? == 0.25, || "dm(2 1[0,1/4], 0) != 0.25".into())?;
    for c in [0.125, 0.3, 0.75] {
        let d = dm(&StepFunction::constant(1, c), &zero).map_err(|e| e.to_string())?;
        ensure(d == c, || format!("dm(const {c}) = {d}"))?;
    }
    let mut violations = 0;
    for i in 0..1000 {
        let mut rng = stream(77, 3, i);
        let f = random_dyadic(&mut rng, 2, 3);
        let g = random_dyadic(&mut rng, 2, 3);
        let h = random_dyadic(&mut rng, 2, 3);
        let r = check_dm_calculus(&[f.clone(), g.clone(), h.clone()], &[(i % 17) as f64 / 16.0])
            .map_err(|e| e.to_string())?;
        violations += r.violations;
        let fg = dm(&f, &g).map_err(|e| e.to_string())?;
        let tri = dm(&f, &h).map_err(|e| e.to_string())? + dm(&h, &g).map_err(|e| e.to_string())?;
        if fg > tri || fg != dm(&g, &f).map_err(|e| e.to_string())? {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} calculus/metric violations"))?;
    for s in [0.5, 0.25, 0.125] {
        for n in 1..=8 {
            let g = spike_average_deficit_grid(s, n).map_err(|e| e.to_string())?;
            let o = spike_deficit_binomial(s, n);
            ensure((g - o).abs() <= 1e-12, || format!("s={s} n={n}: {g} vs {o}"))?;
        }
        let gap = l1_norm(&spike(s, 0, 1).map_err(|e| e.to_string())?.sub(&StepFunction::constant(1, 1.0)).map_err(|e| e.to_string())?);
        ensure(gap == 2.0 - 2.0 * s, || format!("||spike({s}) - 1|| = {gap}"))?;
    }
    let d4 = spike_average_deficit(0.25, 4).map_err(|e| e.to_string())?.value;
    let d64 = spike_average_deficit(0.25, 64).map_err(|e| e.to_string())?.value;
    ensure(d64 < d4, || format!("deficit {d64} at n=64 not below {d4} at n=4"))?;
    Ok(format!("hand values exact, 1000 instances clean, grid = binomial to 1e-12, deficit {d4:.4} -> {d64:.4}"))
}

fn csv_body(args: &[&str], threads: usize, out: &std::path::Path) -> Result<String, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_slicegeom"))
        .args(args)
        .args(["--threads", &threads.to_string()])
        .env("SLICEGEOM_OUT", out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(output.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&output.stderr))
    })?;
    let text = String::from_utf8(output.stdout).map_err(|e| e.to_string())?;
    Ok(text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n"))
}

fn reproducibility() -> Outcome {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../spaces");
    let l2 = format!("{root}/l2-2d.json");
    let hex = format!("{root}/hexagon.json");
    let lip = format!("{root}/lip-grid-2.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["cn-alpha", "--space", &l2, "--alpha", "1", "--n", "1..2", "--samples", "4", "--seed", "7"],
        vec!["decay", "--space", &hex, "--alpha", "1,2", "--samples", "6", "--seed", "3"],
        vec!["cn-alpha", "--space", &lip, "--alpha", "1.9", "--n", "5", "--samples", "4", "--seed", "11"],
        vec!["slice", "min-diam", "--space", &l2, "--depth", "0.3", "--seed", "5"],
        vec!["sandbox", "spikes", "--s", "0.5,0.125", "--n", "1..8"],
        vec!["sandbox", "calculus", "--count", "200", "--seed", "9"],
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for args in &commands {
        let base = csv_body(args, 1, dir.path())?;
        for threads in [4, 8] {
            let other = csv_body(args, threads, dir.path())?;
            ensure(other == base, || format!("{} differs at {threads} threads", args[..2].join(" ")))?;
        }
    }
    Ok(format!("{} commands byte-identical at 1, 4 and 8 threads", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("euclidean closed form", euclidean_closed_form),
        ("max-norm exact values", max_norm_values),
        ("slice diameter chord formula", slice_chords),
        ("slice witnesses", slice_witnesses),
        ("lp-sum combiner", sum_combiner),
        ("monotonicity and stabilization", monotone_suite),
        ("verdict engine", verdicts),
        ("lipschitz trend", lipschitz_trend),
        ("sandbox exactness", sandbox_exactness),
        ("reproducibility across threads", reproducibility),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

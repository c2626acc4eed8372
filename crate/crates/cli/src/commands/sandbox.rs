use std::path::{Path, PathBuf};

use serde_json::json;
use slicegeom_core::rng::stream;
use slicegeom_core::sandbox::{
    check_dm_calculus, dm, l1_norm, near_disjointness_scan, random_dyadic, spike,
    spike_average_deficit, spike_probes, StepFunction,
};
use slicegeom_core::SolverBudget;

use super::read;
use crate::output::{Report, Row};
use crate::{CliError, SandboxCmd};

const CALCULUS_TAG: u32 = 0xca1c;

pub fn run(cmd: SandboxCmd, budget: &SolverBudget) -> Result<Report, CliError> {
    match cmd {
        SandboxCmd::Dm { f, g } => {
            let f1 = load_one(&f)?;
            let g1 = match &g {
                Some(p) => load_one(p)?,
                None => StepFunction::zero(1),
            };
            let d = dm(&f1, &g1)?;
            let mut row = Row::new("l1", "sandbox_dm");
            row.value = Some(d);
            row.lower = Some(d);
            row.upper = Some(d);
            row.certified = true;
            let mut report = Report::new("sandbox_dm");
            report.rows.push(row);
            Ok(report.with_sidecar(json!({ "f": f, "g": g, "dm": d })))
        }
        SandboxCmd::Calculus { count } => calculus(count, budget),
        SandboxCmd::Spikes { s, n } => spikes(&s.0, &n.0),
        SandboxCmd::NearDisjoint { family, one, eps, probes } => {
            let mut h = Vec::new();
            for p in &family {
                h.extend(load_many(p)?);
            }
            if one {
                h.push(StepFunction::constant(1, 1.0));
            }
            let probes = spike_probes(probes, budget.seed)?;
            let r = near_disjointness_scan(&h, eps, &probes)?;
            let mut row = Row::new("l1", "near_disjoint");
            row.eps = Some(eps);
            row.value = Some(r.delta);
            let mut report = Report::new("near_disjoint");
            report.rows.push(row);
            if r.collapsed {
                eprintln!("delta collapsed to the probe floor: the family is not uniformly integrable at this eps");
            }
            Ok(report.with_sidecar(r))
        }
    }
}

fn load_many(path: &Path) -> Result<Vec<StepFunction>, CliError> {
    let text = read(path)?;
    let bad = |e: serde_json::Error| CliError::Validation(format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if value.is_array() {
        serde_json::from_value(value).map_err(bad)
    } else {
        Ok(vec![serde_json::from_value(value).map_err(bad)?])
    }
}

fn load_one(path: &PathBuf) -> Result<StepFunction, CliError> {
    let mut fs = load_many(path)?;
    if fs.len() != 1 {
        return Err(CliError::Validation(format!("{}: expected one step function", path.display())));
    }
    Ok(fs.remove(0))
}

fn calculus(count: usize, budget: &SolverBudget) -> Result<Report, CliError> {
    let zero = StepFunction::zero(1);
    let mut calc_violations = 0;
    let mut triangle_violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut min_triangle = f64::INFINITY;
    for i in 0..count as u64 {
        let mut rng = stream(budget.seed, CALCULUS_TAG, i);
        let f = random_dyadic(&mut rng, 2, 3);
        let g = random_dyadic(&mut rng, 2, 3);
        let h = random_dyadic(&mut rng, 2, 3);
        let lambda = (i % 17) as f64 / 16.0;
        let r = check_dm_calculus(&[f.clone(), g.clone()], &[lambda])?;
        calc_violations += r.violations;
        min_margin = min_margin.min(r.min_margin);
        let margin = dm(&f, &h)? + dm(&h, &g)? - dm(&f, &g)?;
        let symmetric = dm(&f, &g)? == dm(&g, &f)?;
        let translated = dm(&f, &g)? == dm(&f.sub(&g)?, &zero)?;
        if margin < 0.0 || !symmetric || !translated {
            triangle_violations += 1;
        }
        min_triangle = min_triangle.min(margin);
    }
    let mut report = Report::new("sandbox_calculus");
    for (op, v) in [
        ("calculus_violations", calc_violations as f64),
        ("calculus_min_margin", min_margin),
        ("metric_violations", triangle_violations as f64),
        ("metric_min_margin", min_triangle),
    ] {
        let mut row = Row::new("l1", op);
        row.n = Some(count);
        row.value = Some(v);
        row.certified = true;
        report.rows.push(row);
    }
    let total = calc_violations + triangle_violations;
    if total > 0 {
        report.failure = Some(CliError::Invariant(format!("{total} violations in {count} instances")));
    }
    Ok(report.with_sidecar(json!({
        "instances": count,
        "calculus_violations": calc_violations,
        "metric_violations": triangle_violations,
        "calculus_min_margin": min_margin,
        "metric_min_margin": min_triangle,
    })))
}

fn spikes(widths: &[f64], ns: &[usize]) -> Result<Report, CliError> {
    let mut report = Report::new("sandbox_spikes");
    let mut side = Vec::new();
    for &s in widths {
        let f = spike(s, 0, 1)?;
        let gap = l1_norm(&f.sub(&StepFunction::constant(1, 1.0))?);
        let mut row = Row::new("l1", "spike_gap");
        row.depth = Some(s);
        row.value = Some(gap);
        row.certified = gap == 2.0 - 2.0 * s;
        if !row.certified {
            report.failure = Some(CliError::Invariant(format!("||spike({s}) - 1|| = {gap}, expected {}", 2.0 - 2.0 * s)));
        }
        report.rows.push(row);
        for &n in ns {
            let d = spike_average_deficit(s, n)?;
            let mut row = Row::new("l1", "spike_deficit");
            row.n = Some(n);
            row.depth = Some(s);
            row.value = Some(d.value);
            row.certified = d.grid.is_some();
            if let Some(g) = d.grid {
                row.lower = Some(g.min(d.oracle));
                row.upper = Some(g.max(d.oracle));
            }
            report.rows.push(row);
            side.push(d);
        }
    }
    Ok(report.with_sidecar(side))
}

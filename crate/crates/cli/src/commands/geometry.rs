use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use slicegeom_core::criterion::{
    decay_profile, sequence_criterion, uniform_verdict, DecayProfile, FilterSurrogate, Verdict,
};
use slicegeom_core::linalg::sub;
use slicegeom_core::midpoints::cn_alpha as estimate;
use slicegeom_core::slices::{
    make_slice, min_slice_diameter, separating_slice, slice_diameter, slice_spread_witness,
};
use slicegeom_core::{Error, NormedSpace, SolverBudget};

use super::{load_space, read};
use crate::output::{Report, Row};
use crate::{CliError, SliceCmd, SurrogateArg};

pub fn slice(cmd: SliceCmd, budget: &SolverBudget) -> Result<Report, CliError> {
    match cmd {
        SliceCmd::Diam { space, functional, depth } => {
            let (id, space) = load_space(&space)?;
            let mut report = Report::new("slice_diam");
            let mut side = Vec::new();
            for &d in &depth.0 {
                let s = make_slice(&space, &functional.0, d)?;
                let r = slice_diameter(&space, &s, budget)?;
                let mut row = Row::new(&id, "slice_diam");
                row.depth = Some(d);
                row.value = Some(r.upper);
                if r.certified {
                    row.lower = Some(r.lower);
                    row.upper = Some(r.upper);
                }
                row.certified = r.certified;
                report.rows.push(row);
                side.push(json!({ "slice": s, "diameter": r }));
            }
            Ok(report.with_sidecar(side))
        }
        SliceCmd::MinDiam { space, depth } => {
            let (id, space) = load_space(&space)?;
            let mut report = Report::new("slice_min_diam");
            let mut side = Vec::new();
            for &d in &depth.0 {
                let r = min_slice_diameter(&space, d, budget)?;
                let mut row = Row::new(&id, "slice_min_diam");
                row.depth = Some(d);
                row.value = Some(r.upper);
                if r.diameter.certified {
                    row.upper = Some(r.upper);
                }
                row.lower = r.lower;
                row.certified = row.lower.is_some() && row.upper.is_some();
                report.rows.push(row);
                side.push(r);
            }
            Ok(report.with_sidecar(side))
        }
        SliceCmd::WitnessSpread { space, functional, depth, alpha, eps } => {
            let (id, space) = load_space(&space)?;
            let s = make_slice(&space, &functional.0, depth)?;
            let mut row = Row::new(&id, "witness_spread");
            row.depth = Some(depth);
            row.alpha = Some(alpha);
            row.eps = Some(eps);
            let side = match slice_spread_witness(&space, &s, alpha, eps, budget) {
                Ok((u, v)) => {
                    let dist = space.norm(&sub(&u, &v));
                    let inside = s.contains_closed(&space, &u) && s.contains_closed(&space, &v);
                    row.value = Some(dist);
                    row.lower = inside.then_some(dist);
                    row.certified = inside && dist >= alpha - eps;
                    json!({ "slice": s, "found": true, "u": u, "v": v, "distance": dist, "inside": inside })
                }
                Err(Error::NotFound) => json!({ "slice": s, "found": false }),
                Err(e) => return Err(e.into()),
            };
            let mut report = Report::new("witness_spread");
            report.rows.push(row);
            Ok(report.with_sidecar(side))
        }
        SliceCmd::WitnessSeparate { space, point, alpha, eps } => {
            let (id, space) = load_space(&space)?;
            let mut report = Report::new("witness_separate");
            let mut row = Row::new(&id, "witness_separate");
            row.alpha = Some(alpha);
            row.eps = Some(eps);
            let side = match separating_slice(&space, &point.0, alpha, eps, budget) {
                Ok(sep) => {
                    row.depth = Some(sep.slice.depth);
                    row.value = Some(sep.gap);
                    row.certified = sep.certified;
                    if sep.certified {
                        row.lower = Some(sep.gap);
                    }
                    report.rows.push(row);
                    let diam = slice_diameter(&space, &sep.slice, budget)?;
                    let mut drow = Row::new(&id, "witness_separate_diam");
                    drow.alpha = Some(alpha);
                    drow.eps = Some(eps);
                    drow.depth = Some(sep.slice.depth);
                    drow.value = Some(diam.upper);
                    if diam.certified {
                        drow.lower = Some(diam.lower);
                        drow.upper = Some(diam.upper);
                    }
                    drow.certified = diam.certified;
                    report.rows.push(drow);
                    json!({ "separated": true, "separation": sep, "diameter": diam })
                }
                Err(Error::NotSeparated { gap, margin }) => {
                    row.value = Some(gap);
                    report.rows.push(row);
                    json!({ "separated": false, "gap": gap, "margin": margin })
                }
                Err(e) => return Err(e.into()),
            };
            Ok(report.with_sidecar(side))
        }
    }
}

pub fn cn_alpha(path: &Path, alphas: &[f64], ns: &[usize], budget: &SolverBudget) -> Result<Report, CliError> {
    let (id, space) = load_space(path)?;
    let mut report = Report::new("cn_alpha");
    let mut side = Vec::new();
    for &alpha in alphas {
        for &n in ns {
            let e = estimate(&space, n, alpha, budget)?;
            let mut row = Row::new(&id, "cn_alpha");
            row.n = Some(n);
            row.alpha = Some(alpha);
            row.value = Some(e.value);
            row.lower = e.lower;
            row.upper = e.upper;
            row.certified = e.lower.is_some() && e.upper.is_some();
            report.rows.push(row);
            side.push(e);
        }
    }
    Ok(report.with_sidecar(side))
}

fn profile_rows(report: &mut Report, p: &DecayProfile, op: &'static str, cleaned: bool) {
    for (i, &alpha) in p.alphas.iter().enumerate() {
        for (j, &n) in p.ns.iter().enumerate() {
            let e = &p.estimates[i][j];
            let mut row = Row::new(&p.space_id, op);
            row.n = Some(n);
            row.alpha = Some(alpha);
            row.value = Some(if cleaned { p.cleaned[i][j] } else { p.raw[i][j] });
            row.lower = e.lower;
            row.upper = e.upper;
            row.certified = e.lower.is_some() && e.upper.is_some();
            report.rows.push(row);
        }
    }
}

fn default_nmax(space: &NormedSpace) -> usize {
    (space.dim() + 1).max(2)
}

pub fn decay(path: &Path, alphas: &[f64], nmax: Option<usize>, budget: &SolverBudget) -> Result<Report, CliError> {
    let (id, space) = load_space(path)?;
    let nmax = nmax.unwrap_or_else(|| default_nmax(&space));
    let p = decay_profile(&space, &id, alphas, nmax, budget)?;
    let mut report = Report::new("decay");
    profile_rows(&mut report, &p, "decay", true);
    Ok(report.with_sidecar(p))
}

#[derive(Serialize)]
struct VerdictJson<'a> {
    space: &'a str,
    surrogate: Option<FilterSurrogate>,
    theta: f64,
    table: &'a DecayProfile,
    verdict: Verdict,
    evidence: &'a [slicegeom_core::criterion::Evidence],
}

pub fn verdict(path: &Path, alphas: &[f64], theta: f64, budget: &SolverBudget) -> Result<Report, CliError> {
    let (id, space) = load_space(path)?;
    let p = decay_profile(&space, &id, alphas, default_nmax(&space), budget)?;
    let v = uniform_verdict(&p, theta)?;
    let mut report = Report::new("verdict");
    for e in &v.evidence {
        let mut row = Row::new(&id, "verdict_evidence");
        row.n = Some(e.n);
        row.alpha = Some(e.alpha);
        row.value = Some(e.value);
        row.lower = e.certified_lower;
        row.certified = e.certified_lower.is_some_and(|l| l > theta);
        report.rows.push(row);
    }
    let name = serde_json::to_value(v.verdict).expect("verdict serializes");
    eprintln!("verdict: {}", name.as_str().unwrap_or("?"));
    let json = VerdictJson {
        space: &id,
        surrogate: None,
        theta,
        table: &p,
        verdict: v.verdict,
        evidence: &v.evidence,
    };
    Ok(report.with_sidecar(json))
}

#[allow(clippy::too_many_arguments)]
pub fn sequence(
    paths: &[PathBuf],
    alpha: f64,
    eps: f64,
    deltas: &[f64],
    surrogate: SurrogateArg,
    cut: f64,
    nmax: usize,
    budget: &SolverBudget,
) -> Result<Report, CliError> {
    if !(eps > 0.0 && eps < alpha) {
        return Err(CliError::Validation(format!("need 0 < eps < alpha, got eps = {eps}, alpha = {alpha}")));
    }
    let surrogate = match surrogate {
        SurrogateArg::Frechet => FilterSurrogate::Frechet,
        SurrogateArg::Density => FilterSurrogate::Density { cut },
    };
    // Repeated files are computed once.
    let mut cache: Vec<(PathBuf, DecayProfile)> = Vec::new();
    let mut profiles = Vec::with_capacity(paths.len());
    for path in paths {
        let p = match cache.iter().find(|(q, _)| q == path) {
            Some((_, p)) => p.clone(),
            None => {
                let (id, space) = load_space(path)?;
                let p = decay_profile(&space, &id, &[alpha - eps], nmax, budget)?;
                cache.push((path.clone(), p.clone()));
                p
            }
        };
        profiles.push(p);
    }
    let r = sequence_criterion(&profiles, alpha, eps, deltas, surrogate)?;
    let family = format!("family[{}]", profiles.len());
    let mut report = Report::new("sequence");
    for s in &r.rows {
        let mut row = Row::new(&family, "sequence");
        row.n = s.n;
        row.alpha = Some(alpha);
        row.eps = Some(eps);
        row.value = Some(s.delta);
        report.rows.push(row);
    }
    eprintln!("hypothesis shape satisfied on sampled range: {}", r.satisfied);
    let ids: Vec<&str> = profiles.iter().map(|p| p.space_id.as_str()).collect();
    Ok(report.with_sidecar(json!({ "spaces": ids, "report": r })))
}

pub fn plot_data(path: &Path) -> Result<Report, CliError> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let data = value.get("data").cloned().unwrap_or(value);
    let p: DecayProfile = serde_json::from_value(data)
        .map_err(|e| CliError::Validation(format!("{}: not a decay profile: {e}", path.display())))?;
    let mut report = Report::new("plot_data");
    report.budget = p.estimates.first().and_then(|r| r.first()).map(|e| e.budget.clone());
    profile_rows(&mut report, &p, "decay_raw", false);
    profile_rows(&mut report, &p, "decay_cleaned", true);
    Ok(report)
}

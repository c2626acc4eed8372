mod geometry;
mod sandbox;

use std::fs;
use std::path::Path;

use serde::Serialize;
use slicegeom_core::space::{validate, SpaceFile};
use slicegeom_core::{Error, NormedSpace, SolverBudget};

use crate::output::{Report, Row};
use crate::{CliError, Command, ReportCmd, SpaceCmd};

pub fn run(command: Command, budget: &SolverBudget) -> Result<Report, CliError> {
    match command {
        Command::Space(SpaceCmd::Validate { files }) => space_validate(&files),
        Command::Space(SpaceCmd::Info { file }) => space_info(&file, budget),
        Command::Slice(cmd) => geometry::slice(cmd, budget),
        Command::CnAlpha { space, alpha, n } => geometry::cn_alpha(&space, &alpha.0, &n.0, budget),
        Command::Decay { space, alpha, nmax } => geometry::decay(&space, &alpha.0, nmax, budget),
        Command::Verdict { space, alpha, theta } => geometry::verdict(&space, &alpha.0, theta, budget),
        Command::Sequence { space, alpha, eps, delta, surrogate, cut, nmax } => {
            geometry::sequence(&space, alpha, eps, &delta.0, surrogate, cut, nmax, budget)
        }
        Command::Sandbox(cmd) => sandbox::run(cmd, budget),
        Command::Report(ReportCmd::PlotData { profile }) => geometry::plot_data(&profile),
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn parse_space_file(path: &Path) -> Result<SpaceFile, CliError> {
    SpaceFile::from_json(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn space_id(path: &Path, file: &SpaceFile) -> String {
    file.id.clone().unwrap_or_else(|| {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "space".into())
    })
}

/// Loads and validates a space file.
pub(crate) fn load_space(path: &Path) -> Result<(String, NormedSpace), CliError> {
    let file = parse_space_file(path)?;
    let id = space_id(path, &file);
    let space = NormedSpace::new(file.spec).map_err(|e| CliError::Validation(format!("{id}: {e}")))?;
    Ok((id, space))
}

#[derive(Serialize)]
struct ValidationEntry {
    file: String,
    id: Option<String>,
    valid: bool,
    messages: Vec<String>,
}

fn space_validate(files: &[std::path::PathBuf]) -> Result<Report, CliError> {
    if files.is_empty() {
        return Err(CliError::Validation("no files given".into()));
    }
    let mut report = Report::new("space_validate");
    let mut entries = Vec::new();
    for path in files {
        let file = path.display().to_string();
        let (id, messages) = match parse_space_file(path) {
            Err(e) => (path.file_stem().map(|s| s.to_string_lossy().into_owned()), vec![e.to_string()]),
            Ok(f) => {
                let id = space_id(path, &f);
                let checks = validate(&f.spec);
                let messages = if !checks.is_valid() {
                    checks.violations.iter().map(|v| format!("[{}] {}", v.code, v.message)).collect()
                } else {
                    match NormedSpace::new(f.spec) {
                        Ok(_) => Vec::new(),
                        Err(e) => vec![e.to_string()],
                    }
                };
                (Some(id), messages)
            }
        };
        let valid = messages.is_empty();
        let mut row = Row::new(id.as_deref().unwrap_or(""), "validate");
        row.value = Some(if valid { 1.0 } else { 0.0 });
        row.certified = true;
        report.rows.push(row);
        for m in &messages {
            eprintln!("{file}: {m}");
        }
        entries.push(ValidationEntry { file, id, valid, messages });
    }
    let invalid = entries.iter().filter(|e| !e.valid).count();
    if invalid > 0 {
        report.failure = Some(CliError::Validation(format!("{invalid} of {} files invalid", entries.len())));
    }
    Ok(report.with_sidecar(entries))
}

#[derive(Serialize)]
struct SpaceInfo<'a> {
    id: &'a str,
    kind: &'static str,
    dim: usize,
    polytopal: bool,
    facets: Option<usize>,
    vertices: Option<&'a [Vec<f64>]>,
}

fn space_info(path: &Path, budget: &SolverBudget) -> Result<Report, CliError> {
    let (id, space) = load_space(path)?;
    let vertices = match space.ball_vertices_within(budget.vertex_dim) {
        Ok(v) => Some(v),
        Err(Error::NotPolytopal(_)) | Err(Error::DimensionBudgetExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut report = Report::new("space_info");
    let mut row = Row::new(&id, "dim");
    row.value = Some(space.dim() as f64);
    row.certified = true;
    report.rows.push(row);
    if let Some(v) = vertices {
        let mut row = Row::new(&id, "vertices");
        row.value = Some(v.len() as f64);
        row.certified = true;
        report.rows.push(row);
    }
    let info = SpaceInfo {
        id: &id,
        kind: space.spec().kind_name(),
        dim: space.dim(),
        polytopal: space.is_polytopal(),
        facets: space.facets().map(<[_]>::len),
        vertices,
    };
    Ok(report.with_sidecar(info))
}

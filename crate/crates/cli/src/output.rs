//! Results CSV and JSON sidecars.
//!
//! Column order is frozen:
//! `space_id,op,n,alpha,depth,eps,value,lower,upper,certified,seed,budget_samples`.
//! `lower` and `upper` only ever hold certified bounds; `certified` is true
//! when both are present, or when `value` is exact. Empty fields mean "not
//! applicable". The only line that varies between identical runs is the
//! leading `#` comment.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use slicegeom_core::SolverBudget;

use crate::CliError;

pub const HEADER: [&str; 12] = [
    "space_id", "op", "n", "alpha", "depth", "eps", "value", "lower", "upper", "certified", "seed",
    "budget_samples",
];

#[derive(Debug, Clone, Default)]
pub struct Row {
    pub space_id: String,
    pub op: &'static str,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub depth: Option<f64>,
    pub eps: Option<f64>,
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub certified: bool,
}

impl Row {
    pub fn new(space_id: &str, op: &'static str) -> Self {
        Self { space_id: space_id.to_string(), op, ..Self::default() }
    }
}

/// Twelve significant digits, fixed notation for moderate magnitudes.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub struct Report {
    pub name: &'static str,
    pub rows: Vec<Row>,
    pub sidecar: Value,
    /// Set when the report itself records a failed check; the report is still
    /// written before exiting with the matching status.
    pub failure: Option<CliError>,
    /// Budget recorded in place of the command-line one (reports over
    /// earlier artifacts).
    pub budget: Option<SolverBudget>,
}

impl Report {
    pub fn new(name: &'static str) -> Self {
        Self { name, rows: Vec::new(), sidecar: Value::Null, failure: None, budget: None }
    }

    pub fn with_sidecar(mut self, data: impl Serialize) -> Self {
        self.sidecar = serde_json::to_value(data).expect("reports serialize");
        self
    }

    pub fn csv_body(&self, budget: &SolverBudget) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER).map_err(io_err)?;
        for r in &self.rows {
            w.write_record([
                r.space_id.clone(),
                r.op.to_string(),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                opt(r.alpha),
                opt(r.depth),
                opt(r.eps),
                opt(r.value),
                opt(r.lower),
                opt(r.upper),
                r.certified.to_string(),
                budget.seed.to_string(),
                budget.samples.to_string(),
            ])
            .map_err(io_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Prints the CSV to stdout and writes `<name>.csv` and `<name>.json`
    /// into `out`.
    pub fn emit(&self, out: &Path, command: &[String], budget: &SolverBudget) -> Result<(), CliError> {
        let budget = self.budget.as_ref().unwrap_or(budget);
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let body = self.csv_body(budget)?;
        let text = format!("# slicegeom {} generated_unix={stamp}\n{body}", env!("CARGO_PKG_VERSION"));
        std::io::stdout().write_all(text.as_bytes()).map_err(io_err)?;
        fs::create_dir_all(out).map_err(io_err)?;
        fs::write(self.path(out, "csv"), &text).map_err(io_err)?;
        let sidecar = json!({
            "command": command,
            "generated_unix": stamp,
            "seed": budget.seed,
            "budget": budget,
            "data": self.sidecar,
        });
        let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        fs::write(self.path(out, "json"), json).map_err(io_err)?;
        Ok(())
    }

    fn path(&self, out: &Path, ext: &str) -> PathBuf {
        out.join(format!("{}.{ext}", self.name))
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.1339745962155614), "0.133974596216");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-1.25e-9), "-1.25e-9");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(1e15), "1e15");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn header_is_frozen() {
        let body = Report::new("t").csv_body(&SolverBudget::default()).unwrap();
        assert_eq!(
            body,
            "space_id,op,n,alpha,depth,eps,value,lower,upper,certified,seed,budget_samples\n"
        );
    }
}

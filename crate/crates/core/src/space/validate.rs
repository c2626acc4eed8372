use std::fmt;

use serde::{Deserialize, Serialize};

use super::spec::{Facet, SpaceSpec};
use crate::linalg::{max_abs_diff, rank};

const SYM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: &str, code: &str, message: String, indices: Vec<usize>) {
        let message = if path.is_empty() { message } else { format!("{path}: {message}") };
        self.violations.push(Violation { code: code.into(), message, indices });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> =
            self.violations.iter().map(|v| format!("[{}] {}", v.code, v.message)).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

pub fn validate(spec: &SpaceSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    check(spec, "", &mut report);
    report
}

fn check(spec: &SpaceSpec, path: &str, r: &mut ValidationReport) {
    let dim = spec.dim();
    if dim == 0 {
        r.push(path, "dim", "dimension must be positive".into(), vec![]);
        return;
    }
    match spec {
        SpaceSpec::PolytopeV { vertices, .. } => check_vertices(vertices, dim, path, r),
        SpaceSpec::PolytopeH { facets, .. } => check_facets(facets, dim, path, r),
        SpaceSpec::Lp { p, .. } => {
            if !(p.0 >= 1.0) {
                r.push(path, "exponent", format!("p = {} is below 1", p.0), vec![]);
            }
        }
        SpaceSpec::Lip { metric, base, .. } => check_metric(metric, *base, dim, path, r),
        SpaceSpec::Sum { p, left, right, .. } => {
            if !(p.0 >= 1.0) {
                r.push(path, "exponent", format!("p = {} is below 1", p.0), vec![]);
            }
            if left.dim() + right.dim() != dim {
                r.push(
                    path,
                    "sum-dim",
                    format!("dim {dim} != {} + {}", left.dim(), right.dim()),
                    vec![],
                );
            }
            check(left, &format!("{path}/left"), r);
            check(right, &format!("{path}/right"), r);
        }
    }
}

fn check_vertices(vertices: &[Vec<f64>], dim: usize, path: &str, r: &mut ValidationReport) {
    let bad: Vec<usize> = vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.len() != dim || v.iter().any(|x| !x.is_finite()))
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        r.push(path, "vertex-shape", format!("vertices of wrong length or non-finite"), bad);
        return;
    }
    let asym: Vec<usize> = vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            !vertices.iter().any(|w| max_abs_diff(w, &neg) <= SYM_TOL)
        })
        .map(|(i, _)| i)
        .collect();
    if !asym.is_empty() {
        r.push(path, "symmetry", "vertex set not closed under negation".into(), asym);
    }
    if rank(vertices, 1e-12) < dim {
        r.push(path, "full-dimensional", "vertex hull is not full-dimensional".into(), vec![]);
    }
}

fn check_facets(facets: &[Facet], dim: usize, path: &str, r: &mut ValidationReport) {
    let bad: Vec<usize> = facets
        .iter()
        .enumerate()
        .filter(|(_, f)| f.normal.len() != dim || f.normal.iter().any(|x| !x.is_finite()))
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        r.push(path, "facet-shape", "facet normals of wrong length or non-finite".into(), bad);
        return;
    }
    let nonpos: Vec<usize> = facets
        .iter()
        .enumerate()
        .filter(|(_, f)| !(f.offset > 0.0 && f.offset.is_finite()))
        .map(|(i, _)| i)
        .collect();
    if !nonpos.is_empty() {
        r.push(path, "offset", "facet offsets must be positive".into(), nonpos);
        return;
    }
    let scaled: Vec<Vec<f64>> =
        facets.iter().map(|f| f.normal.iter().map(|x| x / f.offset).collect()).collect();
    let asym: Vec<usize> = scaled
        .iter()
        .enumerate()
        .filter(|(_, a)| {
            let neg: Vec<f64> = a.iter().map(|x| -x).collect();
            !scaled.iter().any(|b| max_abs_diff(b, &neg) <= SYM_TOL)
        })
        .map(|(i, _)| i)
        .collect();
    if !asym.is_empty() {
        r.push(path, "symmetry", "facet set not closed under negation".into(), asym);
    }
    if rank(&scaled, 1e-12) < dim {
        r.push(path, "bounded", "facet normals do not span the space".into(), vec![]);
    }
}

fn check_metric(metric: &[Vec<f64>], base: usize, dim: usize, path: &str, r: &mut ValidationReport) {
    let n = metric.len();
    if n != dim + 1 || metric.iter().any(|row| row.len() != n) {
        r.push(path, "metric-shape", format!("metric must be {0}x{0}", dim + 1), vec![]);
        return;
    }
    if base >= n {
        r.push(path, "base", format!("base point {base} out of range"), vec![base]);
    }
    for i in 0..n {
        if metric[i][i] != 0.0 {
            r.push(path, "diagonal", format!("d({i},{i}) != 0"), vec![i, i]);
        }
        for j in 0..n {
            let d = metric[i][j];
            if i != j && !(d > 0.0 && d.is_finite()) {
                r.push(path, "positive", format!("d({i},{j}) = {d} is not positive"), vec![i, j]);
            }
            if d != metric[j][i] {
                r.push(path, "symmetric", format!("d({i},{j}) != d({j},{i})"), vec![i, j]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (ab, ac, cb) = (metric[a][b], metric[a][c], metric[c][b]);
                if ab > ac + cb + 1e-12 * ab.abs() {
                    r.push(
                        path,
                        "triangle",
                        format!("d({a},{b}) = {ab} > d({a},{c}) + d({c},{b}) = {}", ac + cb),
                        vec![a, b, c],
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::spec::Exponent;

    #[test]
    fn square_is_valid() {
        let s = SpaceSpec::PolytopeV {
            dim: 2,
            vertices: vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]],
        };
        assert!(validate(&s).is_valid());
    }

    #[test]
    fn asymmetric_vertices_rejected() {
        let s = SpaceSpec::PolytopeV { dim: 2, vertices: vec![vec![1.0, 0.0], vec![0.0, 1.0]] };
        let r = validate(&s);
        assert!(!r.is_valid());
        assert!(r.violations.iter().any(|v| v.code == "symmetry" && v.indices == vec![0, 1]));
    }

    #[test]
    fn triangle_inequality_checked() {
        // points a=0, b=1, c=2
        let s = SpaceSpec::Lip {
            dim: 2,
            metric: vec![vec![0.0, 5.0, 1.0], vec![5.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
            base: 0,
        };
        let r = validate(&s);
        assert!(r.violations.iter().any(|v| v.code == "triangle" && v.indices == vec![0, 1, 2]));
    }

    #[test]
    fn facet_checks() {
        let f = |n: [f64; 2], o: f64| Facet { normal: n.to_vec(), offset: o };
        let ok = SpaceSpec::PolytopeH {
            dim: 2,
            facets: vec![f([1.0, 0.0], 1.0), f([-1.0, 0.0], 1.0), f([0.0, 2.0], 2.0), f([0.0, -1.0], 1.0)],
        };
        assert!(validate(&ok).is_valid());
        let unbounded =
            SpaceSpec::PolytopeH { dim: 2, facets: vec![f([1.0, 0.0], 1.0), f([-1.0, 0.0], 1.0)] };
        assert!(validate(&unbounded).violations.iter().any(|v| v.code == "bounded"));
        let zero = SpaceSpec::PolytopeH { dim: 1, facets: vec![f([1.0, 0.0], 0.0)] };
        assert!(!validate(&zero).is_valid());
    }

    #[test]
    fn sum_dimension_checked() {
        let s = SpaceSpec::Sum {
            dim: 3,
            p: Exponent(2.0),
            left: Box::new(SpaceSpec::lp(1, 2.0)),
            right: Box::new(SpaceSpec::lp(1, 2.0)),
        };
        assert!(validate(&s).violations.iter().any(|v| v.code == "sum-dim"));
        assert!(!validate(&SpaceSpec::lp(2, 0.5)).is_valid());
    }
}

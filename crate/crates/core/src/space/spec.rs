use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exponent `p` in `[1, inf]`. Serialized as a JSON number, or the string
/// `"inf"` for the max-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INF
        } else if self.is_inf() {
            Exponent(1.0)
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    /// p-combination of nonnegative numbers.
    pub fn combine(self, values: &[f64]) -> f64 {
        let p = self.0;
        if self.is_inf() {
            values.iter().fold(0.0, |m, v| m.max(v.abs()))
        } else if p == 1.0 {
            values.iter().map(|v| v.abs()).sum()
        } else {
            let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m == 0.0 {
                return 0.0;
            }
            m * values.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_inf() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent(p)),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "Inf" | "infinity") => Ok(Exponent::INF),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("invalid exponent {s:?}"))),
        }
    }
}

/// `B_X = {x : <normal, x> <= offset}` contributes one such row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Description of a finite-dimensional real normed space by its unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// Unit ball given as the convex hull of `vertices`.
    PolytopeV { dim: usize, vertices: Vec<Vec<f64>> },
    /// Unit ball given as an intersection of half-spaces.
    PolytopeH { dim: usize, facets: Vec<Facet> },
    Lp { dim: usize, p: Exponent },
    /// `Lip_0(M)` over a finite metric; coordinates are values at the
    /// non-base points in index order.
    Lip { dim: usize, metric: Vec<Vec<f64>>, base: usize },
    /// `left (+)_p right`.
    Sum { dim: usize, p: Exponent, left: Box<SpaceSpec>, right: Box<SpaceSpec> },
}

impl SpaceSpec {
    pub fn dim(&self) -> usize {
        match self {
            SpaceSpec::PolytopeV { dim, .. }
            | SpaceSpec::PolytopeH { dim, .. }
            | SpaceSpec::Lp { dim, .. }
            | SpaceSpec::Lip { dim, .. }
            | SpaceSpec::Sum { dim, .. } => *dim,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpaceSpec::PolytopeV { .. } => "polytope_v",
            SpaceSpec::PolytopeH { .. } => "polytope_h",
            SpaceSpec::Lp { .. } => "lp",
            SpaceSpec::Lip { .. } => "lip",
            SpaceSpec::Sum { .. } => "sum",
        }
    }

    pub fn lp(dim: usize, p: f64) -> Self {
        SpaceSpec::Lp { dim, p: Exponent(p) }
    }

    pub fn sum(p: f64, left: SpaceSpec, right: SpaceSpec) -> Self {
        SpaceSpec::Sum {
            dim: left.dim() + right.dim(),
            p: Exponent(p),
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// `Lip_0` over `points` on the real line with the first point as base.
    pub fn lip_on_line(points: &[f64]) -> Self {
        let metric = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        SpaceSpec::Lip { dim: points.len() - 1, metric, base: 0 }
    }

    /// Grid metric `{0, 2^-k, ..., 1}` with base point 0.
    pub fn lip_dyadic_grid(k: u32) -> Self {
        let m = 1usize << k;
        let pts: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        Self::lip_on_line(&pts)
    }

    /// Symmetric polygon with vertices `±v_i` for the given half set.
    pub fn symmetric_polygon(half: &[[f64; 2]]) -> Self {
        let mut vertices: Vec<Vec<f64>> = half.iter().map(|v| v.to_vec()).collect();
        vertices.extend(half.iter().map(|v| vec![-v[0], -v[1]]));
        SpaceSpec::PolytopeV { dim: 2, vertices }
    }
}

/// On-disk space file: a spec plus an optional identifier used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub spec: SpaceSpec,
}

impl SpaceFile {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("space specs always serialize")
    }
}

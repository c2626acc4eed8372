//! Midpoint sets `S^a = {(u + v)/2 : u, v in B_X, ||u - v|| >= a}`, their
//! n-term convex hulls and the sphere suprema `C_n^a`.

mod cn;
mod hull;
mod oracle;
mod sum;
mod support;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, midpoint, sub};
use crate::space::NormedSpace;

pub use cn::{cn_alpha, cn_alpha_warm, sample_points, CnAlphaEstimate};
pub use hull::{dist_to_midpoint_hull, dist_to_midpoint_hull_warm, HullDistance, HullMethod};
pub use oracle::{oracle_dist_2d, OracleBracket};
pub use sum::combine_lp_sum;
pub use support::{midpoint_support, Atom, MidpointSet};

/// Tolerance for the ball and separation invariants.
pub const INVARIANT_TOL: f64 = 1e-9;
/// Tolerance for the weights summing to one.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointTerm {
    pub weight: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl MidpointTerm {
    pub fn midpoint(&self) -> Vec<f64> {
        midpoint(&self.u, &self.v)
    }
}

/// A convex combination `sum w_i (u_i + v_i)/2` of points of `S^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointCombination {
    pub alpha: f64,
    pub terms: Vec<MidpointTerm>,
}

impl MidpointCombination {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The represented point, without invariant checks.
    pub fn point(&self) -> Vec<f64> {
        let dim = self.terms.first().map_or(0, |t| t.u.len());
        let mut z = vec![0.0; dim];
        for t in &self.terms {
            axpy(&mut z, t.weight, &t.midpoint());
        }
        z
    }

    /// Checks every invariant within [`INVARIANT_TOL`].
    pub fn check(&self, space: &NormedSpace) -> Result<()> {
        let bad = |msg: String| Err(Error::InvariantViolation(msg));
        if self.terms.is_empty() {
            return bad("empty combination".into());
        }
        let mut total = 0.0;
        for (i, t) in self.terms.iter().enumerate() {
            if t.u.len() != space.dim() || t.v.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    got: t.u.len().max(t.v.len()),
                });
            }
            if !(t.weight >= -INVARIANT_TOL) {
                return bad(format!("term {i}: negative weight {}", t.weight));
            }
            total += t.weight;
            let (nu, nv) = (space.norm(&t.u), space.norm(&t.v));
            if nu > 1.0 + INVARIANT_TOL || nv > 1.0 + INVARIANT_TOL {
                return bad(format!("term {i}: point outside the ball ({nu}, {nv})"));
            }
            let sep = space.norm(&sub(&t.u, &t.v));
            if sep < self.alpha - INVARIANT_TOL {
                return bad(format!("term {i}: separation {sep} below {}", self.alpha));
            }
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return bad(format!("weights sum to {total}"));
        }
        Ok(())
    }
}

/// The point represented by `c`, after checking its invariants in `space`.
pub fn combination_value(space: &NormedSpace, c: &MidpointCombination) -> Result<Vec<f64>> {
    c.check(space)?;
    Ok(c.point())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("separation level {alpha} outside (0, 2]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;

    fn linf() -> NormedSpace {
        NormedSpace::new(SpaceSpec::lp(2, f64::INFINITY)).unwrap()
    }

    #[test]
    fn value_of_valid_combination() {
        let c = MidpointCombination {
            alpha: 2.0,
            terms: vec![
                MidpointTerm { weight: 0.5, u: vec![1.0, 1.0], v: vec![-1.0, 1.0] },
                MidpointTerm { weight: 0.5, u: vec![1.0, 1.0], v: vec![1.0, -1.0] },
            ],
        };
        assert_eq!(combination_value(&linf(), &c).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn invariant_failures() {
        let space = linf();
        let mut c = MidpointCombination {
            alpha: 2.0,
            terms: vec![MidpointTerm { weight: 1.0, u: vec![1.0, 1.0], v: vec![0.0, 1.0] }],
        };
        assert!(matches!(combination_value(&space, &c), Err(Error::InvariantViolation(_))));
        c.terms[0].v = vec![-1.0, 1.2];
        assert!(matches!(combination_value(&space, &c), Err(Error::InvariantViolation(_))));
        c.terms[0].v = vec![-1.0, 1.0];
        c.terms[0].weight = 0.9;
        assert!(matches!(combination_value(&space, &c), Err(Error::InvariantViolation(_))));
    }
}

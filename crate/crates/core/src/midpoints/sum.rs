use crate::error::{Error, Result};
use crate::linalg::scale;
use crate::space::NormedSpace;

use super::{MidpointCombination, MidpointTerm, INVARIANT_TOL};

/// Lifts combinations approximating the normalized components of a unit
/// vector `z = (x, y)` of `X (+)_p Y` to a combination approximating `z`.
///
/// Terms are indexed by pairs `(i, j)` with weight `l_i m_j` and generating
/// points `(|x| u_i, |y| a_j)`, `(|x| v_i, |y| b_j)`; separation and ball
/// membership follow from monotonicity of the p-norm, and the error is at
/// most the larger of the component errors.
pub fn combine_lp_sum(
    space: &NormedSpace,
    z: &[f64],
    left: &MidpointCombination,
    right: &MidpointCombination,
) -> Result<MidpointCombination> {
    let (_, xs, ys) = space
        .components()
        .ok_or_else(|| Error::UnsupportedSpace(format!("{} is not a sum", space.spec().kind_name())))?;
    let norm = space.checked_norm(z)?;
    if (norm - 1.0).abs() > INVARIANT_TOL {
        return Err(Error::InvalidPoint(norm));
    }
    if left.alpha != right.alpha {
        return Err(Error::LevelMismatch { left: left.alpha, right: right.alpha });
    }
    let (x, y) = z.split_at(xs.dim());
    let (nx, ny) = (xs.norm(x), ys.norm(y));
    if nx == 0.0 {
        return Err(Error::DegenerateComponent("left"));
    }
    if ny == 0.0 {
        return Err(Error::DegenerateComponent("right"));
    }
    left.check(xs)?;
    right.check(ys)?;
    let mut terms = Vec::with_capacity(left.len() * right.len());
    for s in &left.terms {
        for t in &right.terms {
            let w = s.weight * t.weight;
            if w == 0.0 {
                continue;
            }
            terms.push(MidpointTerm {
                weight: w,
                u: [scale(&s.u, nx), scale(&t.u, ny)].concat(),
                v: [scale(&s.v, nx), scale(&t.v, ny)].concat(),
            });
        }
    }
    Ok(MidpointCombination { alpha: left.alpha, terms })
}

use nalgebra::{DMatrix, DVector};

use super::lp::{self, LpOutcome};
use super::{HRep, PolytopeError};

/// Drop every inequality row implied by the others (one LP per row).
/// Rows are examined in order, so of two identical rows the later survives.
pub fn remove_redundancy(h: &HRep) -> Result<HRep, PolytopeError> {
    remove_redundancy_tol(h, 1e-9)
}

pub fn remove_redundancy_tol(h: &HRep, tol: f64) -> Result<HRep, PolytopeError> {
    if lp::feasible_point(h).is_none() {
        return Err(PolytopeError::EmptySet);
    }
    let mut work = h.clone();
    let mut i = 0;
    while i < work.nrows() {
        let obj: Vec<f64> = work.a.row(i).iter().copied().collect();
        let implied = match lp::maximize(&work, &obj, Some(i)) {
            LpOutcome::Optimal(v) => v <= work.b[i] + tol,
            LpOutcome::Unbounded => false,
            // removing a row cannot make a feasible system infeasible
            LpOutcome::Infeasible => return Err(PolytopeError::EmptySet),
        };
        if implied {
            work = drop_row(&work, i);
        } else {
            i += 1;
        }
    }
    Ok(work)
}

fn drop_row(h: &HRep, i: usize) -> HRep {
    let a: DMatrix<f64> = h.a.clone().remove_row(i);
    let b: DVector<f64> = h.b.clone().remove_row(i);
    HRep {
        a,
        b,
        c: h.c.clone(),
        d: h.d.clone(),
    }
}

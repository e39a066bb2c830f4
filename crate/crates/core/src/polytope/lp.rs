//! Thin wrappers over a general simplex LP solver.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use nalgebra::DVector;

use super::{HRep, VRep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

fn free_vars(p: &mut Problem, obj: &[f64]) -> Vec<Variable> {
    obj.iter()
        .map(|&c| p.add_var(c, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect()
}

fn add_rows(p: &mut Problem, vars: &[Variable], h: &HRep, skip: Option<usize>) {
    for i in 0..h.nrows() {
        if Some(i) == skip {
            continue;
        }
        let expr: Vec<(Variable, f64)> = vars
            .iter()
            .zip(h.a.row(i).iter())
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        p.add_constraint(expr, ComparisonOp::Le, h.b[i]);
    }
    for i in 0..h.neq() {
        let expr: Vec<(Variable, f64)> = vars
            .iter()
            .zip(h.c.row(i).iter())
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        p.add_constraint(expr, ComparisonOp::Eq, h.d[i]);
    }
}

/// Maximize `obj . x` over the rows of `h`, optionally ignoring row `skip`.
pub(crate) fn maximize(h: &HRep, obj: &[f64], skip: Option<usize>) -> LpOutcome {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars = free_vars(&mut p, obj);
    add_rows(&mut p, &vars, h, skip);
    match p.solve() {
        Ok(s) if s.objective().is_finite() => LpOutcome::Optimal(s.objective()),
        Ok(_) => LpOutcome::Unbounded,
        Err(minilp::Error::Infeasible) => LpOutcome::Infeasible,
        Err(minilp::Error::Unbounded) => LpOutcome::Unbounded,
    }
}

/// Some point of `{A x <= b, C x = d}`, if any.
pub(crate) fn feasible_point(h: &HRep) -> Option<DVector<f64>> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars = free_vars(&mut p, &vec![0.0; h.dim()]);
    add_rows(&mut p, &vars, h, None);
    let s = p.solve().ok()?;
    Some(DVector::from_iterator(
        h.dim(),
        vars.iter().map(|v| *s.var_value(*v)),
    ))
}

/// `x in conv(vertices) + cone(rays)` up to `tol` per coordinate.
pub(crate) fn in_hull(v: &VRep, x: &DVector<f64>, tol: f64) -> bool {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let lam: Vec<Variable> = v
        .vertices
        .iter()
        .map(|_| p.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let mu: Vec<Variable> = v
        .rays
        .iter()
        .map(|_| p.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    p.add_constraint(
        lam.iter().map(|&l| (l, 1.0)).collect::<Vec<_>>(),
        ComparisonOp::Eq,
        1.0,
    );
    for k in 0..x.len() {
        let expr: Vec<(Variable, f64)> = lam
            .iter()
            .zip(&v.vertices)
            .map(|(&l, u)| (l, u[k]))
            .chain(mu.iter().zip(&v.rays).map(|(&m, r)| (m, r[k])))
            .collect();
        p.add_constraint(expr.clone(), ComparisonOp::Le, x[k] + tol);
        p.add_constraint(expr, ComparisonOp::Ge, x[k] - tol);
    }
    p.solve().is_ok()
}

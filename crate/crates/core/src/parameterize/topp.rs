use nalgebra::{DVector, Vector6};

use super::path::GeometricPath;
use super::seidel::{solve_ordered, Halfplane, LpError};
use super::ParamError;
use crate::contact::WrenchCone;
use crate::dynamics::{
    object_wrench, second_order_terms, DynamicsError, GraspPolytope, KinematicLimits, RigidBodyParams,
    SerialChain,
};

/// Robot, object and grasp wrench set: everything needed to evaluate the
/// suction cup constraint along a path.
#[derive(Debug, Clone)]
pub struct GraspModel {
    pub chain: SerialChain,
    pub object: RigidBodyParams,
    pub set: GraspPolytope,
}

impl GraspModel {
    pub fn new(chain: SerialChain, object: RigidBodyParams, cone: &WrenchCone) -> Self {
        let set = GraspPolytope::new(cone, &object.g_cb());
        GraspModel { chain, object, set }
    }

    /// `F_c G_cb w_b - g_c` at a joint state.
    pub fn residual(&self, q: &[f64], qd: &[f64], qdd: &[f64]) -> Result<DVector<f64>, DynamicsError> {
        let w: Vector6<f64> = object_wrench(&self.chain, &self.object, q, qd, qdd)?;
        Ok(self.set.residual(&w))
    }
}

/// Rows `a u + b x + c <= 0` per gridpoint, with `u = s''` and `x = s'^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedConstraints {
    pub grid: Vec<f64>,
    pub rows: Vec<Vec<[f64; 3]>>,
    pub x_max: Vec<f64>,
    /// Leading rows per gridpoint that come from the grasp constraint.
    pub scc_rows: usize,
}

impl DiscretizedConstraints {
    pub fn n_intervals(&self) -> usize {
        self.grid.len().saturating_sub(1)
    }

    pub fn rows_per_stage(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// Largest x allowed when no joint velocity bound applies.
pub const X_CAP: f64 = 1e12;

/// `n` uniform intervals over the path.
pub fn uniform_grid(path: &GeometricPath, n: usize) -> Vec<f64> {
    let s_end = path.s_end();
    if s_end == 0.0 {
        return vec![0.0];
    }
    let mut g: Vec<f64> = (0..=n).map(|i| s_end * i as f64 / n as f64).collect();
    g[n] = s_end;
    g
}

pub fn discretize(
    path: &GeometricPath,
    limits: &KinematicLimits,
    grasp: Option<&GraspModel>,
    n: usize,
) -> Result<DiscretizedConstraints, ParamError> {
    if n < 2 {
        return Err(ParamError::InvalidPath(format!("need at least 2 grid intervals, got {n}")));
    }
    discretize_grid(path, limits, grasp, &uniform_grid(path, n))
}

pub fn discretize_grid(
    path: &GeometricPath,
    limits: &KinematicLimits,
    grasp: Option<&GraspModel>,
    grid: &[f64],
) -> Result<DiscretizedConstraints, ParamError> {
    let dof = path.dof();
    if limits.n() != dof {
        return Err(ParamError::DimensionMismatch {
            expected: dof,
            got: limits.n(),
        });
    }
    if let Some(g) = grasp {
        if g.chain.n() != dof {
            return Err(ParamError::DimensionMismatch {
                expected: g.chain.n(),
                got: dof,
            });
        }
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ParamError::InvalidPath("grid must be strictly increasing".into()));
    }
    let scc_rows = grasp.map_or(0, |g| g.set.nrows());
    let mut rows = Vec::with_capacity(grid.len());
    let mut x_max = Vec::with_capacity(grid.len());
    for &s in grid {
        let p = path.eval(s);
        let mut stage = Vec::with_capacity(scc_rows + 2 * dof);
        if let Some(g) = grasp {
            let t = second_order_terms(&g.chain, &g.object, &p.q)?;
            let w1 = t.linear(&p.dq);
            let w2 = t.linear(&p.ddq) + t.quadratic(&p.dq);
            let fg = &g.set.fg;
            for r in 0..fg.nrows() {
                let row = fg.row(r);
                let dot = |w: &Vector6<f64>| (0..6).map(|k| row[k] * w[k]).sum::<f64>();
                stage.push([dot(&w1), dot(&w2), dot(&t.theta3) - g.set.g[r]]);
            }
        }
        let mut xm = X_CAP;
        for j in 0..dof {
            stage.push([p.dq[j], p.ddq[j], -limits.a_max[j]]);
            stage.push([-p.dq[j], -p.ddq[j], -limits.a_max[j]]);
            if p.dq[j].abs() > 0.0 {
                xm = xm.min((limits.v_max[j] / p.dq[j]).powi(2));
            }
        }
        rows.push(stage);
        x_max.push(xm);
    }
    Ok(DiscretizedConstraints {
        grid: grid.to_vec(),
        rows,
        x_max,
        scc_rows,
    })
}

/// Result of the reachability analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameterization {
    pub grid: Vec<f64>,
    pub x: Vec<f64>,
    /// Control on each interval.
    pub u: Vec<f64>,
    pub duration: f64,
    /// Backward controllable intervals `[lo, hi]`.
    pub controllable: Vec<[f64; 2]>,
}

/// Constraints tying the control on interval `i` to both of its endpoints:
/// the rows of gridpoint `i` at `(u, x)` and those of `i + 1` at
/// `(u, x + 2 delta u)`.
fn stage_halfplanes(c: &DiscretizedConstraints, i: usize, out: &mut Vec<Halfplane>) {
    out.clear();
    for r in &c.rows[i] {
        out.push(Halfplane::new(r[0], r[1], -r[2]));
    }
    if i + 1 < c.grid.len() {
        let two_d = 2.0 * (c.grid[i + 1] - c.grid[i]);
        for r in &c.rows[i + 1] {
            out.push(Halfplane::new(r[0] + two_d * r[1], r[1], -r[2]));
        }
    }
    out.push(Halfplane::new(0.0, -1.0, 0.0));
    out.push(Halfplane::new(0.0, 1.0, c.x_max[i]));
}

fn stage_seed(i: usize) -> u64 {
    0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1)
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    order
}

fn x_interval(hp: &[Halfplane], i: usize) -> Result<[f64; 2], ParamError> {
    let order = shuffled(hp.len(), stage_seed(i));
    let hi = match solve_ordered(hp, &order, [0.0, 1.0]) {
        Ok(s) => s.value,
        Err(LpError::Infeasible) => return Err(ParamError::Infeasible(i)),
        Err(LpError::Unbounded) => X_CAP,
    };
    let lo = match solve_ordered(hp, &order, [0.0, -1.0]) {
        Ok(s) => -s.value,
        Err(LpError::Infeasible) => return Err(ParamError::Infeasible(i)),
        Err(LpError::Unbounded) => 0.0,
    };
    let lo = lo.max(0.0);
    if hi < lo - 1e-12 {
        return Err(ParamError::Infeasible(i));
    }
    Ok([lo, hi.max(lo)])
}

/// Backward pass: controllable interval at every gridpoint.
pub fn controllable_sets(c: &DiscretizedConstraints, x_end: f64) -> Result<Vec<[f64; 2]>, ParamError> {
    let n = c.grid.len();
    if n == 0 {
        return Err(ParamError::InvalidPath("empty grid".into()));
    }
    if c.rows.len() != n || c.x_max.len() != n {
        return Err(ParamError::InvalidPath("constraint arrays do not match the grid".into()));
    }
    let mut k = vec![[0.0, 0.0]; n];
    let mut hp = Vec::new();
    stage_halfplanes(c, n - 1, &mut hp);
    hp.push(Halfplane::new(0.0, 1.0, x_end));
    hp.push(Halfplane::new(0.0, -1.0, -x_end));
    k[n - 1] = x_interval(&hp, n - 1)?;
    for i in (0..n - 1).rev() {
        stage_halfplanes(c, i, &mut hp);
        let two_d = 2.0 * (c.grid[i + 1] - c.grid[i]);
        let [lo, hi] = k[i + 1];
        hp.push(Halfplane::new(two_d, 1.0, hi));
        hp.push(Halfplane::new(-two_d, -1.0, -lo));
        k[i] = x_interval(&hp, i)?;
    }
    Ok(k)
}

/// Largest feasible control at a fixed `x`, or the least-violating one if
/// round-off left the interval empty.
fn greedy_control(hp: &[Halfplane], x: f64) -> f64 {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in hp {
        let rhs = h.b - h.a[1] * x;
        if h.a[0].abs() < 1e-14 {
            continue;
        }
        let t = rhs / h.a[0];
        if h.a[0] > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
    }
    if hi >= lo {
        hi
    } else {
        0.5 * (lo + hi)
    }
}

pub fn solve_topp(c: &DiscretizedConstraints, x_start: f64, x_end: f64) -> Result<Parameterization, ParamError> {
    if !(x_start >= 0.0 && x_end >= 0.0 && x_start.is_finite() && x_end.is_finite()) {
        return Err(ParamError::InvalidPath("boundary velocities must be finite and >= 0".into()));
    }
    let k = controllable_sets(c, x_end)?;
    let n = c.grid.len();
    let [lo0, hi0] = k[0];
    let slack = 1e-9 * (1.0 + hi0);
    if x_start > hi0 + slack || x_start < lo0 - slack {
        return Err(ParamError::BadBoundary {
            x_start,
            lo: lo0,
            hi: hi0,
        });
    }
    let mut x = vec![0.0; n];
    let mut u = vec![0.0; n - 1];
    x[0] = x_start.clamp(lo0, hi0);
    let mut hp = Vec::new();
    for i in 0..n - 1 {
        let two_d = 2.0 * (c.grid[i + 1] - c.grid[i]);
        stage_halfplanes(c, i, &mut hp);
        let [lo, hi] = k[i + 1];
        hp.push(Halfplane::new(two_d, 1.0, hi));
        hp.push(Halfplane::new(-two_d, -1.0, -lo));
        let ui = greedy_control(&hp, x[i]);
        x[i + 1] = (x[i] + two_d * ui).clamp(lo, hi);
        u[i] = (x[i + 1] - x[i]) / two_d;
    }
    let duration = profile_duration(&c.grid, &x)?;
    Ok(Parameterization {
        grid: c.grid.clone(),
        x,
        u,
        duration,
        controllable: k,
    })
}

/// `sum 2 delta / (sqrt x_i + sqrt x_{i+1})`; a zero denominator is only
/// allowed on a zero-length interval.
pub fn profile_duration(grid: &[f64], x: &[f64]) -> Result<f64, ParamError> {
    let mut t = 0.0;
    for i in 0..grid.len().saturating_sub(1) {
        let d = grid[i + 1] - grid[i];
        let den = x[i].max(0.0).sqrt() + x[i + 1].max(0.0).sqrt();
        if den > 0.0 {
            t += 2.0 * d / den;
        } else if d > 0.0 {
            return Err(ParamError::Infeasible(i));
        }
    }
    Ok(t)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::parameterize::build_path;

    pub fn line_1dof(len: f64) -> GeometricPath {
        build_path(&[vec![0.0], vec![len]]).unwrap()
    }

    #[test]
    fn identity_path_rows() {
        let p = line_1dof(1.0);
        let lim = KinematicLimits::new(vec![2.0], vec![1.0]).unwrap();
        let c = discretize(&p, &lim, None, 10).unwrap();
        assert_eq!(c.rows[3], vec![[1.0, 0.0, -1.0], [-1.0, 0.0, -1.0]]);
        assert_eq!(c.x_max[3], 4.0);
        assert_eq!(c.grid.len(), 11);
    }

    #[test]
    fn bang_bang() {
        let p = line_1dof(1.0);
        let lim = KinematicLimits::new(vec![100.0], vec![1.0]).unwrap();
        let c = discretize(&p, &lim, None, 100).unwrap();
        let r = solve_topp(&c, 0.0, 0.0).unwrap();
        assert!((r.duration - 2.0).abs() < 0.02 * 2.0, "{}", r.duration);
        assert!(r.x.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn cruise() {
        let len = 10.0;
        let p = line_1dof(len);
        let lim = KinematicLimits::new(vec![0.5], vec![1e9]).unwrap();
        let c = discretize(&p, &lim, None, 400).unwrap();
        let r = solve_topp(&c, 0.0, 0.0).unwrap();
        assert!((r.duration - len / 0.5).abs() < 0.02 * len / 0.5, "{}", r.duration);
        // flying start and finish at cruise speed
        let c = discretize(&p, &KinematicLimits::new(vec![0.5], vec![0.0]).unwrap(), None, 100).unwrap();
        let x = (0.5f64 / len).powi(2);
        let r = solve_topp(&c, x, x).unwrap();
        assert!((r.duration - 20.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_located() {
        let p = line_1dof(1.0);
        let lim = KinematicLimits::new(vec![1.0], vec![1.0]).unwrap();
        let mut c = discretize(&p, &lim, None, 20).unwrap();
        c.rows[7].push([1.0, 0.0, 1.0]);
        c.rows[7].push([-1.0, 0.0, 1.0]);
        assert!(matches!(solve_topp(&c, 0.0, 0.0), Err(ParamError::Infeasible(7))));
    }

    #[test]
    fn bad_start() {
        let p = line_1dof(1.0);
        let lim = KinematicLimits::new(vec![1.0], vec![1.0]).unwrap();
        let c = discretize(&p, &lim, None, 20).unwrap();
        assert!(matches!(solve_topp(&c, 4.0, 0.0), Err(ParamError::BadBoundary { .. })));
    }

    #[test]
    fn duration_edge_cases() {
        assert_eq!(profile_duration(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(profile_duration(&[0.0, 1.0], &[0.0, 0.0]).is_err());
        assert_eq!(profile_duration(&[0.0], &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn single_gridpoint() {
        let p = build_path(&[vec![0.3, 0.1]]).unwrap();
        let lim = KinematicLimits::new(vec![1.0; 2], vec![1.0; 2]).unwrap();
        let c = discretize_grid(&p, &lim, None, &uniform_grid(&p, 100)).unwrap();
        let r = solve_topp(&c, 0.0, 0.0).unwrap();
        assert_eq!(r.duration, 0.0);
        assert!(r.u.is_empty());
    }
}

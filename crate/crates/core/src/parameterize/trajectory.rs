use std::time::Instant;

use serde::Serialize;

use super::path::GeometricPath;
use super::topp::{discretize_grid, solve_topp, uniform_grid, GraspModel, Parameterization};
use super::ParamError;
use crate::dynamics::KinematicLimits;

/// Time-sampled joint trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub qd: Vec<Vec<f64>>,
    pub qdd: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dof(&self) -> usize {
        self.q.first().map_or(0, Vec::len)
    }

    pub fn duration(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }

    /// Play back `kappa` times faster: `t / kappa`, `kappa qd`, `kappa^2 qdd`.
    pub fn time_scaled(&self, kappa: f64) -> Trajectory {
        let scale = |v: &Vec<Vec<f64>>, f: f64| v.iter().map(|r| r.iter().map(|x| x * f).collect()).collect();
        Trajectory {
            t: self.t.iter().map(|t| t / kappa).collect(),
            q: self.q.clone(),
            qd: scale(&self.qd, kappa),
            qdd: scale(&self.qdd, kappa * kappa),
        }
    }
}

/// Path parameter state `(s, s', s'')` on interval `i` after `tau` seconds.
fn interval_state(p: &Parameterization, i: usize, tau: f64) -> (f64, f64, f64) {
    let sd0 = p.x[i].max(0.0).sqrt();
    let u = p.u[i];
    let s = (p.grid[i] + sd0 * tau + 0.5 * u * tau * tau).clamp(p.grid[i], p.grid[i + 1]);
    let sd = (sd0 + u * tau).max(0.0);
    (s, sd, u)
}

/// Interval start times of a profile.
pub fn interval_times(p: &Parameterization) -> Vec<f64> {
    let mut t = Vec::with_capacity(p.grid.len());
    let mut acc = 0.0;
    t.push(0.0);
    for i in 0..p.u.len() {
        let den = p.x[i].max(0.0).sqrt() + p.x[i + 1].max(0.0).sqrt();
        if den > 0.0 {
            acc += 2.0 * (p.grid[i + 1] - p.grid[i]) / den;
        }
        t.push(acc);
    }
    t
}

fn joint_state(path: &GeometricPath, s: f64, sd: f64, sdd: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let e = path.eval(s);
    let qd = e.dq.iter().map(|d| d * sd).collect();
    let qdd = e.dq.iter().zip(&e.ddq).map(|(d, dd)| d * sdd + dd * sd * sd).collect();
    (e.q, qd, qdd)
}

/// Sample at a uniform rate, with the last sample exactly at the end.
pub fn sample_trajectory(p: &Parameterization, path: &GeometricPath, rate_hz: f64) -> Trajectory {
    assert!(rate_hz > 0.0, "sampling rate must be positive");
    let times = interval_times(p);
    let total = *times.last().unwrap_or(&0.0);
    let mut out = Trajectory {
        t: Vec::new(),
        q: Vec::new(),
        qd: Vec::new(),
        qdd: Vec::new(),
    };
    let dt = 1.0 / rate_hz;
    let steps = (total / dt).floor() as usize;
    let mut stamps: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).filter(|&t| t < total).collect();
    stamps.push(total);
    let mut i = 0;
    for t in stamps {
        let (s, sd, sdd) = if p.u.is_empty() {
            (p.grid[0], p.x[0].max(0.0).sqrt(), 0.0)
        } else {
            while i + 1 < p.u.len() && t >= times[i + 1] {
                i += 1;
            }
            interval_state(p, i, t - times[i])
        };
        let (q, qd, qdd) = joint_state(path, s, sd, sdd);
        out.t.push(t);
        out.q.push(q);
        out.qd.push(qd);
        out.qdd.push(qdd);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub duration_s: f64,
    /// Largest `F_c G_cb w_b - g_c` over all samples; `None` without samples.
    pub max_violation: Option<f64>,
    pub violating_indices: Vec<usize>,
    /// `(row, count)`: how often each row was the most active one.
    pub row_activity: Vec<(usize, usize)>,
    pub tol: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.max_violation.is_none_or(|v| v <= self.tol)
    }
}

pub fn validate_trajectory(
    traj: &Trajectory,
    grasp: &GraspModel,
    tol: f64,
) -> Result<ValidationReport, ParamError> {
    let mut max_violation: Option<f64> = None;
    let mut violating = Vec::new();
    let mut activity = vec![0usize; grasp.set.nrows()];
    for k in 0..traj.len() {
        let r = grasp.residual(&traj.q[k], &traj.qd[k], &traj.qdd[k])?;
        if r.is_empty() {
            continue;
        }
        let (row, v) = r.argmax();
        activity[row] += 1;
        max_violation = Some(max_violation.map_or(v, |m| m.max(v)));
        if v > tol {
            violating.push(k);
        }
    }
    Ok(ValidationReport {
        samples: traj.len(),
        duration_s: traj.duration(),
        max_violation,
        violating_indices: violating,
        row_activity: activity.into_iter().enumerate().filter(|(_, c)| *c > 0).collect(),
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetimeOptions {
    pub gridpoints: usize,
    pub x_start: f64,
    pub x_end: f64,
    /// Intersample tolerance on the grasp rows before a grid interval is
    /// split.
    pub refine_tol: f64,
    pub max_refinements: usize,
    /// Interior check points per interval.
    pub checks_per_interval: usize,
}

impl Default for RetimeOptions {
    fn default() -> Self {
        RetimeOptions {
            gridpoints: 100,
            x_start: 0.0,
            x_end: 0.0,
            refine_tol: 1e-7,
            max_refinements: 20,
            checks_per_interval: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retimed {
    pub param: Parameterization,
    /// Kinematic-limits-only profile on the same grid (when a grasp model
    /// was given).
    pub reference: Option<Parameterization>,
    pub rows_per_stage: usize,
    pub refinements: usize,
    pub intersample_violation: Option<f64>,
    pub discretize_s: f64,
    pub solve_s: f64,
}

impl Retimed {
    /// Time extension over the kinematic-only reference, percent.
    pub fn extension_pct(&self) -> Option<f64> {
        let r = self.reference.as_ref()?;
        if r.duration > 0.0 {
            Some(100.0 * (self.param.duration - r.duration) / r.duration)
        } else {
            Some(0.0)
        }
    }
}

const GOLDEN_STEPS: usize = 30;

/// Worst grasp-row residual inside each interval, evaluated along the
/// first-order profile: a uniform scan, then a golden-section search in
/// the bracket around the worst scan point.
fn intersample_violations(
    p: &Parameterization,
    path: &GeometricPath,
    grasp: &GraspModel,
    checks: usize,
) -> Result<Vec<f64>, ParamError> {
    let mut worst = vec![f64::NEG_INFINITY; p.u.len()];
    for (i, w) in worst.iter_mut().enumerate() {
        let (s0, s1) = (p.grid[i], p.grid[i + 1]);
        let at = |s: f64| -> Result<f64, ParamError> {
            let x = (p.x[i] + 2.0 * p.u[i] * (s - s0)).max(0.0);
            let (q, qd, qdd) = joint_state(path, s, x.sqrt(), p.u[i]);
            Ok(grasp.residual(&q, &qd, &qdd)?.max())
        };
        let n = checks + 1;
        let step = (s1 - s0) / n as f64;
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 1..=n {
            let r = at(s0 + step * j as f64)?;
            if r > best.0 {
                best = (r, j);
            }
        }
        let (mut a, mut b) = (s0 + step * (best.1 - 1) as f64, (s0 + step * (best.1 + 1) as f64).min(s1));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
        let (mut fc, mut fd) = (at(c)?, at(d)?);
        let mut top = best.0.max(fc).max(fd);
        for _ in 0..GOLDEN_STEPS {
            if fc > fd {
                (b, d, fd) = (d, c, fc);
                c = b - g * (b - a);
                fc = at(c)?;
                top = top.max(fc);
            } else {
                (a, c, fc) = (c, d, fd);
                d = a + g * (b - a);
                fd = at(d)?;
                top = top.max(fd);
            }
        }
        *w = top;
    }
    Ok(worst)
}

/// Retime `path` under joint limits and, optionally, the grasp constraint.
/// Grid intervals whose interior violates the grasp rows by more than
/// `refine_tol` are split and the problem solved again.
pub fn retime(
    path: &GeometricPath,
    limits: &KinematicLimits,
    grasp: Option<&GraspModel>,
    opts: &RetimeOptions,
) -> Result<Retimed, ParamError> {
    let mut grid = uniform_grid(path, opts.gridpoints.max(2));
    let mut refinements = 0;
    loop {
        let t0 = Instant::now();
        let c = discretize_grid(path, limits, grasp, &grid)?;
        let discretize_s = t0.elapsed().as_secs_f64();
        let Some(g) = grasp else {
            let t1 = Instant::now();
            let param = solve_topp(&c, opts.x_start, opts.x_end)?;
            return Ok(Retimed {
                param,
                reference: None,
                rows_per_stage: c.rows_per_stage(),
                refinements: 0,
                intersample_violation: None,
                discretize_s,
                solve_s: t1.elapsed().as_secs_f64(),
            });
        };
        let kin = discretize_grid(path, limits, None, &grid)?;
        let reference = solve_topp(&kin, opts.x_start, opts.x_end)?;
        // the kinematic profile bounds the constrained one from above;
        // passing it in keeps round-off from inverting the comparison
        let mut capped = c;
        for (xm, xr) in capped.x_max.iter_mut().zip(&reference.x) {
            *xm = xm.min(*xr);
        }
        let t1 = Instant::now();
        let param = solve_topp(&capped, opts.x_start, opts.x_end)?;
        let solve_s = t1.elapsed().as_secs_f64();
        let worst = intersample_violations(&param, path, g, opts.checks_per_interval)?;
        let overall = worst.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bad: Vec<usize> = (0..worst.len()).filter(|&i| worst[i] > opts.refine_tol).collect();
        if bad.is_empty() || refinements >= opts.max_refinements {
            return Ok(Retimed {
                param,
                reference: Some(reference),
                rows_per_stage: capped.rows_per_stage(),
                refinements,
                intersample_violation: (!worst.is_empty()).then_some(overall),
                discretize_s,
                solve_s,
            });
        }
        let mut next = Vec::with_capacity(grid.len() + bad.len());
        let mut b = bad.iter().peekable();
        for i in 0..grid.len() {
            next.push(grid[i]);
            if b.peek() == Some(&&i) {
                b.next();
                next.push(0.5 * (grid[i] + grid[i + 1]));
            }
        }
        grid = next;
        refinements += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parameterize::topp::{discretize, tests::line_1dof};
    use crate::parameterize::build_path;

    fn bang_bang() -> (GeometricPath, Parameterization) {
        let p = line_1dof(1.0);
        let lim = KinematicLimits::new(vec![100.0], vec![1.0]).unwrap();
        let c = discretize(&p, &lim, None, 100).unwrap();
        let r = solve_topp(&c, 0.0, 0.0).unwrap();
        (p, r)
    }

    #[test]
    fn samples_follow_the_chain_rule() {
        let (p, r) = bang_bang();
        let tr = sample_trajectory(&r, &p, 125.0);
        assert!((tr.duration() - r.duration).abs() < 1e-15);
        assert_eq!(tr.t[0], 0.0);
        assert!((tr.q.last().unwrap()[0] - 1.0).abs() < 1e-9);
        for k in 0..tr.len() {
            assert!(tr.qdd[k][0].abs() <= 1.0 + 1e-9);
        }
        let w = build_path(&[vec![0.0, 1.0], vec![1.0, 0.5], vec![0.2, 0.2]]).unwrap();
        let lim = KinematicLimits::new(vec![1.0; 2], vec![2.0; 2]).unwrap();
        let c = discretize(&w, &lim, None, 50).unwrap();
        let r = solve_topp(&c, 0.0, 0.0).unwrap();
        let tr = sample_trajectory(&r, &w, 125.0);
        let times = interval_times(&r);
        for k in 0..tr.len() {
            let i = times.partition_point(|t| *t <= tr.t[k]).saturating_sub(1).min(r.u.len() - 1);
            let (s, sd, _) = interval_state(&r, i, tr.t[k] - times[i]);
            let e = w.eval(s);
            for j in 0..2 {
                assert!((tr.qd[k][j] - e.dq[j] * sd).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_profile_moves_uniformly() {
        let p = line_1dof(2.0);
        let lim = KinematicLimits::new(vec![0.5], vec![0.0]).unwrap();
        let c = discretize(&p, &lim, None, 10).unwrap();
        let r = solve_topp(&c, 0.0625, 0.0625).unwrap();
        let tr = sample_trajectory(&r, &p, 10.0);
        for k in 0..tr.len() {
            assert!((tr.q[k][0] - 0.5 * tr.t[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_length_path() {
        let p = build_path(&[vec![0.1, 0.2]]).unwrap();
        let lim = KinematicLimits::new(vec![1.0; 2], vec![1.0; 2]).unwrap();
        let r = retime(&p, &lim, None, &RetimeOptions::default()).unwrap();
        let tr = sample_trajectory(&r.param, &p, 125.0);
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.t, vec![0.0]);
    }

    #[test]
    fn time_scaling() {
        let (p, r) = bang_bang();
        let tr = sample_trajectory(&r, &p, 50.0);
        let fast = tr.time_scaled(1.2);
        assert!((fast.duration() - tr.duration() / 1.2).abs() < 1e-12);
        assert!((fast.qdd[3][0] - 1.44 * tr.qdd[3][0]).abs() < 1e-12);
    }
}

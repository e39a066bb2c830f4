use super::ParamError;

/// Natural cubic spline through joint-space waypoints, parameterized by
/// waypoint index: `s` runs over `[0, waypoints - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricPath {
    waypoints: Vec<Vec<f64>>,
    /// Second derivatives at the knots, per waypoint.
    m: Vec<Vec<f64>>,
}

/// `(q, q', q'')` at one path parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub ddq: Vec<f64>,
}

pub fn build_path(waypoints: &[Vec<f64>]) -> Result<GeometricPath, ParamError> {
    let first = waypoints.first().ok_or_else(|| ParamError::InvalidPath("no waypoints".into()))?;
    let dof = first.len();
    if dof == 0 {
        return Err(ParamError::InvalidPath("waypoints have no joints".into()));
    }
    for w in waypoints {
        if w.len() != dof {
            return Err(ParamError::DimensionMismatch {
                expected: dof,
                got: w.len(),
            });
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(ParamError::InvalidPath("non-finite waypoint value".into()));
        }
    }
    for (i, pair) in waypoints.windows(2).enumerate() {
        if pair[0].iter().zip(&pair[1]).all(|(a, b)| (a - b).abs() <= 1e-12) {
            return Err(ParamError::DuplicateWaypoints(i + 1));
        }
    }
    let k = waypoints.len();
    let mut m = vec![vec![0.0; dof]; k];
    if k > 2 {
        // tridiagonal system M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1])
        let n = k - 2;
        for j in 0..dof {
            let rhs: Vec<f64> = (1..k - 1)
                .map(|i| 6.0 * (waypoints[i + 1][j] - 2.0 * waypoints[i][j] + waypoints[i - 1][j]))
                .collect();
            let mut cp = vec![0.0; n];
            let mut dp = vec![0.0; n];
            for i in 0..n {
                let denom = 4.0 - if i > 0 { cp[i - 1] } else { 0.0 };
                cp[i] = 1.0 / denom;
                dp[i] = (rhs[i] - if i > 0 { dp[i - 1] } else { 0.0 }) / denom;
            }
            for i in (0..n).rev() {
                let next = if i + 1 < n { m[i + 2][j] } else { 0.0 };
                m[i + 1][j] = dp[i] - cp[i] * next;
            }
        }
    }
    Ok(GeometricPath {
        waypoints: waypoints.to_vec(),
        m,
    })
}

impl GeometricPath {
    pub fn dof(&self) -> usize {
        self.waypoints[0].len()
    }

    pub fn s_end(&self) -> f64 {
        (self.waypoints.len() - 1) as f64
    }

    pub fn waypoints(&self) -> &[Vec<f64>] {
        &self.waypoints
    }

    /// Evaluate at `s`, clamped into `[0, s_end]`.
    pub fn eval(&self, s: f64) -> PathPoint {
        let dof = self.dof();
        if self.waypoints.len() == 1 {
            return PathPoint {
                q: self.waypoints[0].clone(),
                dq: vec![0.0; dof],
                ddq: vec![0.0; dof],
            };
        }
        let s = s.clamp(0.0, self.s_end());
        let seg = (s.floor() as usize).min(self.waypoints.len() - 2);
        let t = s - seg as f64;
        let u = 1.0 - t;
        let (y0, y1) = (&self.waypoints[seg], &self.waypoints[seg + 1]);
        let (m0, m1) = (&self.m[seg], &self.m[seg + 1]);
        let mut p = PathPoint {
            q: vec![0.0; dof],
            dq: vec![0.0; dof],
            ddq: vec![0.0; dof],
        };
        for j in 0..dof {
            p.q[j] = u * y0[j] + t * y1[j] + ((u * u * u - u) * m0[j] + (t * t * t - t) * m1[j]) / 6.0;
            p.dq[j] = y1[j] - y0[j] + ((1.0 - 3.0 * u * u) * m0[j] + (3.0 * t * t - 1.0) * m1[j]) / 6.0;
            p.ddq[j] = u * m0[j] + t * m1[j];
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_waypoints_make_a_line() {
        let p = build_path(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        for s in [0.0, 0.3, 0.9, 1.0] {
            let e = p.eval(s);
            assert_eq!(e.ddq, vec![0.0, 0.0]);
            assert_eq!(e.dq, vec![2.0, -2.0]);
        }
    }

    #[test]
    fn collinear_waypoints_keep_direction() {
        let w: Vec<Vec<f64>> = [0.0, 1.0, 3.0, 3.5].iter().map(|&a| vec![a, 2.0 * a, -a]).collect();
        let p = build_path(&w).unwrap();
        for i in 0..=30 {
            let d = p.eval(i as f64 * 0.1).dq;
            assert!((d[1] - 2.0 * d[0]).abs() < 1e-12 && (d[2] + d[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolates_and_is_c2() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let p = build_path(&w).unwrap();
        for (i, wi) in w.iter().enumerate() {
            let q = p.eval(i as f64).q;
            for j in 0..3 {
                assert!((q[j] - wi[j]).abs() < 1e-12);
            }
        }
        let eps = 1e-9;
        for knot in 1..4 {
            let (a, b) = (p.eval(knot as f64 - eps), p.eval(knot as f64 + eps));
            for j in 0..3 {
                assert!((a.dq[j] - b.dq[j]).abs() < 1e-7);
                assert!((a.ddq[j] - b.ddq[j]).abs() < 1e-7);
            }
        }
        // natural end conditions
        assert!(p.eval(0.0).ddq.iter().all(|v| v.abs() < 1e-15));
        assert!(p.eval(4.0).ddq.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn derivatives_match_differences() {
        let w = vec![vec![0.0, 1.0], vec![0.5, -1.0], vec![2.0, 0.0], vec![1.0, 1.0]];
        let p = build_path(&w).unwrap();
        let h = 1e-6;
        for s in [0.2, 0.7, 1.4, 2.9] {
            let (a, b, c) = (p.eval(s - h), p.eval(s), p.eval(s + h));
            for j in 0..2 {
                assert!(((c.q[j] - a.q[j]) / (2.0 * h) - b.dq[j]).abs() < 1e-7);
                assert!(((c.dq[j] - a.dq[j]) / (2.0 * h) - b.ddq[j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_path(&[vec![1.0], vec![1.0]]),
            Err(ParamError::DuplicateWaypoints(1))
        ));
        assert!(build_path(&[]).is_err());
        assert!(build_path(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        let single = build_path(&[vec![0.5, 0.5]]).unwrap();
        assert_eq!(single.s_end(), 0.0);
    }
}

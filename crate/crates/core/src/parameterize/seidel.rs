use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Half-plane `a . v <= b` in the `(u, x)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfplane {
    pub a: [f64; 2],
    pub b: f64,
}

impl Halfplane {
    pub fn new(a0: f64, a1: f64, b: f64) -> Self {
        Halfplane { a: [a0, a1], b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lp2Solution {
    pub point: [f64; 2],
    pub value: f64,
}

/// Working box; an optimum pinned to it triggers the recession check.
pub const BOX: f64 = 1e9;

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Maximize `objective . v` over the half-planes with Seidel's randomized
/// incremental algorithm. The insertion order is drawn from `seed`.
pub fn seidel_lp(rows: &[Halfplane], objective: [f64; 2], seed: u64) -> Result<Lp2Solution, LpError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut rng);
    solve_ordered(rows, &order, objective)
}

/// Same as [`seidel_lp`] with a caller-provided insertion order.
pub(crate) fn solve_ordered(rows: &[Halfplane], order: &[usize], c: [f64; 2]) -> Result<Lp2Solution, LpError> {
    let norm: Vec<Halfplane> = normalize(rows)?;
    let v = solve_box(&norm, order, c, BOX)?;
    if v[0].abs().max(v[1].abs()) >= BOX * (1.0 - 1e-9) {
        // pinned to the box: is there a ray of improvement?
        let cone: Vec<Halfplane> = norm.iter().map(|h| Halfplane { a: h.a, b: 0.0 }).collect();
        let r = solve_box(&cone, order, c, 1.0)?;
        let cn = c[0].hypot(c[1]);
        if dot(c, r) > 1e-9 * cn {
            return Err(LpError::Unbounded);
        }
    }
    Ok(Lp2Solution {
        point: v,
        value: dot(c, v),
    })
}

fn normalize(rows: &[Halfplane]) -> Result<Vec<Halfplane>, LpError> {
    rows.iter()
        .map(|h| {
            let n = h.a[0].hypot(h.a[1]);
            if n < 1e-14 {
                // 0 <= b: either always true or never
                if h.b < -1e-12 {
                    return Err(LpError::Infeasible);
                }
                Ok(Halfplane::new(0.0, 0.0, 0.0))
            } else {
                Ok(Halfplane::new(h.a[0] / n, h.a[1] / n, h.b / n))
            }
        })
        .collect()
}

fn solve_box(rows: &[Halfplane], order: &[usize], c: [f64; 2], m: f64) -> Result<[f64; 2], LpError> {
    let corner = |ck: f64| {
        if ck > 0.0 {
            m
        } else if ck < 0.0 {
            -m
        } else {
            0.0
        }
    };
    let mut v = [corner(c[0]), corner(c[1])];
    for (k, &i) in order.iter().enumerate() {
        let h = rows[i];
        if h.a == [0.0, 0.0] {
            continue;
        }
        let lhs = dot(h.a, v);
        if lhs <= h.b + 1e-12 * (1.0 + h.b.abs() + v[0].abs().max(v[1].abs())) {
            continue;
        }
        // the new optimum lies on the line a . v = b
        let d = [-h.a[1], h.a[0]];
        let p0 = [h.a[0] * h.b, h.a[1] * h.b];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for j in 0..2 {
            if d[j].abs() < 1e-15 {
                if p0[j].abs() > m * (1.0 + 1e-12) {
                    return Err(LpError::Infeasible);
                }
            } else {
                let (t1, t2) = ((-m - p0[j]) / d[j], (m - p0[j]) / d[j]);
                lo = lo.max(t1.min(t2));
                hi = hi.min(t1.max(t2));
            }
        }
        for &jj in &order[..k] {
            let g = rows[jj];
            let den = dot(g.a, d);
            let num = g.b - dot(g.a, p0);
            if den.abs() < 1e-12 {
                if num < -1e-9 * (1.0 + g.b.abs()) {
                    return Err(LpError::Infeasible);
                }
            } else if den > 0.0 {
                hi = hi.min(num / den);
            } else {
                lo = lo.max(num / den);
            }
        }
        let t = if lo > hi {
            if lo - hi > 1e-9 * (1.0 + lo.abs().min(hi.abs())) {
                return Err(LpError::Infeasible);
            }
            0.5 * (lo + hi)
        } else {
            let cd = dot(c, d);
            if cd > 0.0 {
                hi
            } else if cd < 0.0 {
                lo
            } else {
                0.0f64.clamp(lo, hi)
            }
        };
        v = [p0[0] + t * d[0], p0[1] + t * d[1]];
    }
    Ok(v)
}

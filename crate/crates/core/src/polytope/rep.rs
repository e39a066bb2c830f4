use nalgebra::{DMatrix, DVector};

use super::{lp, PolytopeError};

/// Row norms below this are treated as zero rows.
const ZERO_ROW: f64 = 1e-14;

/// Halfspace description `{x | A x <= b, C x = d}`.
///
/// Every stored row `(a_i, b_i)` is scaled so that `|a_i| = 1`, which makes
/// the absolute tolerances used elsewhere meaningful when axes carry mixed
/// units.
#[derive(Debug, Clone, PartialEq)]
pub struct HRep {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
    pub d: DVector<f64>,
}

impl HRep {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, PolytopeError> {
        let dim = a.ncols();
        Self::with_equalities(a, b, DMatrix::zeros(0, dim), DVector::zeros(0))
    }

    pub fn with_equalities(
        mut a: DMatrix<f64>,
        mut b: DVector<f64>,
        mut c: DMatrix<f64>,
        mut d: DVector<f64>,
    ) -> Result<Self, PolytopeError> {
        if a.nrows() != b.len() || c.nrows() != d.len() || c.ncols() != a.ncols() {
            return Err(PolytopeError::DimensionMismatch {
                expected: a.ncols(),
                got: c.ncols(),
            });
        }
        normalize_rows(&mut a, &mut b, false)?;
        normalize_rows(&mut c, &mut d, true)?;
        Ok(HRep { a, b, c, d })
    }

    /// Build from row vectors `(a_i, b_i)`.
    pub fn from_rows(dim: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self, PolytopeError> {
        let mut a = DMatrix::zeros(rows.len(), dim);
        let mut b = DVector::zeros(rows.len());
        for (i, (r, bi)) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            for (j, v) in r.iter().enumerate() {
                a[(i, j)] = *v;
            }
            b[i] = *bi;
        }
        Self::new(a, b)
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn neq(&self) -> usize {
        self.c.nrows()
    }

    /// Largest violation over all rows: `max(A x - b)` and `max |C x - d|`.
    /// Negative when `x` is strictly inside and there are no equalities.
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        if self.nrows() > 0 {
            let r = &self.a * x - &self.b;
            worst = r.max();
        }
        if self.neq() > 0 {
            let e = (&self.c * x - &self.d).amax();
            worst = worst.max(e);
        }
        worst
    }

    /// `A x <= b + tol` (rows are unit norm, so `tol` is a distance).
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.nrows() + self.neq() == 0 || self.violation(x) <= tol
    }

    pub fn row(&self, i: usize) -> (Vec<f64>, f64) {
        (self.a.row(i).iter().copied().collect(), self.b[i])
    }

    /// Rows as `(a_i, b_i)` pairs, equalities excluded.
    pub fn rows(&self) -> Vec<(Vec<f64>, f64)> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    /// The same set with each inequality row repeated `counts[i]` times.
    pub fn repeat_rows(&self, counts: &[usize]) -> HRep {
        let total: usize = counts.iter().sum();
        let mut a = DMatrix::zeros(total, self.dim());
        let mut b = DVector::zeros(total);
        let mut k = 0;
        for (i, &n) in counts.iter().enumerate() {
            for _ in 0..n {
                a.set_row(k, &self.a.row(i));
                b[k] = self.b[i];
                k += 1;
            }
        }
        HRep {
            a,
            b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }
}

fn normalize_rows(
    a: &mut DMatrix<f64>,
    b: &mut DVector<f64>,
    equality: bool,
) -> Result<(), PolytopeError> {
    for i in 0..a.nrows() {
        let n = a.row(i).norm();
        if !n.is_finite() || !b[i].is_finite() {
            return Err(PolytopeError::InvalidRow(i));
        }
        if n < ZERO_ROW {
            return Err(PolytopeError::InvalidRow(i));
        }
        let mut row = a.row_mut(i);
        // already-unit rows are left bit-identical so text round-trips are exact
        if (n - 1.0).abs() > 4.0 * f64::EPSILON {
            row /= n;
            b[i] /= n;
        }
        if equality {
            // canonical sign: first nonzero coefficient positive
            if let Some(first) = row.iter().find(|v| v.abs() > 1e-12).copied() {
                if first < 0.0 {
                    row.neg_mut();
                    b[i] = -b[i];
                }
            }
        }
    }
    Ok(())
}

/// Generator description `conv(vertices) + cone(rays)`. Rays are unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct VRep {
    pub vertices: Vec<DVector<f64>>,
    pub rays: Vec<DVector<f64>>,
}

impl VRep {
    pub fn new(
        vertices: Vec<DVector<f64>>,
        rays: Vec<DVector<f64>>,
    ) -> Result<Self, PolytopeError> {
        let dim = vertices
            .first()
            .or(rays.first())
            .map(|v| v.len())
            .ok_or(PolytopeError::DegenerateInput)?;
        let mut out_rays = Vec::with_capacity(rays.len());
        for v in vertices.iter().chain(&rays) {
            if v.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(PolytopeError::DegenerateInput);
            }
        }
        for r in rays {
            let n = r.norm();
            if n < ZERO_ROW {
                continue;
            }
            out_rays.push(r / n);
        }
        if vertices.is_empty() {
            return Err(PolytopeError::DegenerateInput);
        }
        Ok(VRep {
            vertices,
            rays: out_rays,
        })
    }

    pub fn from_points(points: &[DVector<f64>]) -> Result<Self, PolytopeError> {
        Self::new(points.to_vec(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }
}

/// A convex set holding one or both representations.
#[derive(Debug, Clone)]
pub struct Polytope {
    h: Option<HRep>,
    v: Option<VRep>,
    dim: usize,
}

impl Polytope {
    pub fn from_h(h: HRep) -> Self {
        let dim = h.dim();
        Polytope {
            h: Some(h),
            v: None,
            dim,
        }
    }

    pub fn from_v(v: VRep) -> Self {
        let dim = v.dim();
        Polytope {
            h: None,
            v: Some(v),
            dim,
        }
    }

    /// Pair two representations after a cheap consistency check: every
    /// generator satisfies the rows and every inequality row is supported
    /// by some vertex (both within `tol`).
    pub fn from_both(h: HRep, v: VRep, tol: f64) -> Result<Self, PolytopeError> {
        if h.dim() != v.dim() {
            return Err(PolytopeError::DimensionMismatch {
                expected: h.dim(),
                got: v.dim(),
            });
        }
        for x in &v.vertices {
            if !h.contains(x, tol) {
                return Err(PolytopeError::Inconsistent);
            }
        }
        for r in &v.rays {
            if (&h.a * r).max() > tol || (h.neq() > 0 && (&h.c * r).amax() > tol) {
                return Err(PolytopeError::Inconsistent);
            }
        }
        for i in 0..h.nrows() {
            let row = h.a.row(i);
            let best = v
                .vertices
                .iter()
                .map(|x| row.dot(&x.transpose()) - h.b[i])
                .fold(f64::NEG_INFINITY, f64::max);
            if best < -tol {
                return Err(PolytopeError::Inconsistent);
            }
        }
        Ok(Polytope {
            dim: h.dim(),
            h: Some(h),
            v: Some(v),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> Option<&HRep> {
        self.h.as_ref()
    }

    pub fn v(&self) -> Option<&VRep> {
        self.v.as_ref()
    }

    /// Membership test. Uses the rows when present, otherwise a feasibility
    /// LP over the generators.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match (&self.h, &self.v) {
            (Some(h), _) => h.contains(x, tol),
            (None, Some(v)) => lp::in_hull(v, x, tol),
            (None, None) => unreachable!("polytope without representation"),
        }
    }

    /// Sampled agreement between the two stored representations: `n` points
    /// drawn around the vertex bounding box are classified by both.
    pub fn verify_agreement(&self, n: usize, seed: u64, tol: f64) -> Result<(), PolytopeError> {
        use rand::{Rng, SeedableRng};
        let (Some(h), Some(v)) = (&self.h, &self.v) else {
            return Ok(());
        };
        let mut lo = v.vertices[0].clone();
        let mut hi = v.vertices[0].clone();
        for x in &v.vertices {
            lo = lo.inf(x);
            hi = hi.sup(x);
        }
        let pad = (&hi - &lo) * 0.25;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..n {
            let x = DVector::from_fn(self.dim, |i, _| {
                rng.gen_range((lo[i] - pad[i])..=(hi[i] + pad[i]))
            });
            let margin = h.violation(&x);
            // points essentially on the boundary are not informative
            if margin.abs() < 10.0 * tol {
                continue;
            }
            if (margin <= 0.0) != lp::in_hull(v, &x, tol) {
                return Err(PolytopeError::Inconsistent);
            }
        }
        Ok(())
    }
}

/// Membership with `A x <= b + tol` per unit row.
pub fn contains(p: &Polytope, x: &DVector<f64>, tol: f64) -> bool {
    p.contains(x, tol)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    pub fn cube(dim: usize) -> HRep {
        let mut rows = Vec::new();
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut r = vec![0.0; dim];
                r[i] = s;
                rows.push((r, 1.0));
            }
        }
        HRep::from_rows(dim, &rows).unwrap()
    }
}

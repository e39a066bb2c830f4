//! Scalar abstraction for the double-description engine.
//!
//! Two instantiations exist: `f64` with an absolute sign tolerance on
//! normalized vectors, and `BigRational` for exact (slow) runs.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub(crate) trait Field: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Magnitude used only for pivot selection.
    fn magnitude(&self) -> f64;
    fn sign(&self, tol: f64) -> Ordering;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;

    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter()
            .zip(b)
            .fold(Self::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
    }

    /// Rescale a nonzero vector to a canonical positive multiple.
    fn normalize(v: &mut [Self]);
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn sign(&self, tol: f64) -> Ordering {
        if *self > tol {
            Ordering::Greater
        } else if *self < -tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
    fn normalize(v: &mut [Self]) {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
        }
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        Field::to_f64(self).abs()
    }
    fn sign(&self, _tol: f64) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn normalize(v: &mut [Self]) {
        // Primitive integer vector: clear denominators, divide out the gcd.
        let lcm = v
            .iter()
            .filter(|x| !x.is_zero())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v
            .iter()
            .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints
            .iter()
            .filter(|x| !x.is_zero())
            .fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return;
        }
        for (dst, n) in v.iter_mut().zip(ints) {
            *dst = BigRational::from_integer(n / &g);
        }
    }
}

/// Indices of rows (taken in `order`) forming a maximal independent set.
pub(crate) fn independent_rows<T: Field>(
    rows: &[Vec<T>],
    order: impl IntoIterator<Item = usize>,
    dim: usize,
    tol: f64,
) -> Vec<usize> {
    // Reduced copies of accepted rows with their pivot columns.
    let mut basis: Vec<(Vec<T>, usize)> = Vec::with_capacity(dim);
    let mut picked = Vec::with_capacity(dim);
    for idx in order {
        if picked.len() == dim {
            break;
        }
        let mut r = rows[idx].clone();
        for (b, piv) in &basis {
            if r[*piv].sign(0.0) == Ordering::Equal {
                continue;
            }
            let f = r[*piv].div(&b[*piv]);
            for (x, y) in r.iter_mut().zip(b) {
                *x = x.sub(&f.mul(y));
            }
        }
        let (piv, mag) = r
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.magnitude()))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let scale = rows[idx].iter().map(|x| x.magnitude()).fold(0.0, f64::max);
        let accept = match r[piv].sign(0.0) {
            Ordering::Equal => false,
            _ => mag > tol * scale.max(1e-300) || tol == 0.0,
        };
        if accept {
            basis.push((r, piv));
            picked.push(idx);
        }
    }
    picked
}

/// Solve `m * x = e_j` for every unit vector, returning the columns of the
/// inverse. `None` if `m` is singular.
pub(crate) fn inverse_columns<T: Field>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].magnitude().total_cmp(&a[y][col].magnitude()))?;
        if a[piv][col].sign(0.0) == Ordering::Equal {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.div(&p);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].sign(0.0) == Ordering::Equal {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(y));
            }
        }
    }
    Some((0..n).map(|j| (0..n).map(|i| a[i][n + j].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_normalize_is_primitive() {
        let mut v: Vec<BigRational> = [0.5, -1.5, 0.0]
            .iter()
            .map(|&x| <BigRational as Field>::from_f64(x).unwrap())
            .collect();
        Field::normalize(&mut v);
        let ints: Vec<f64> = v.iter().map(Field::to_f64).collect();
        assert_eq!(ints, vec![1.0, -3.0, 0.0]);
    }

    #[test]
    fn inverse_of_permutation() {
        let m = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        let inv = inverse_columns(&m).unwrap();
        // column 0 solves m x = e0 -> x = (0, 1)
        assert_eq!(inv[0], vec![0.0, 1.0]);
        assert_eq!(inv[1], vec![0.5, 0.0]);
    }

    #[test]
    fn rank_detects_dependence() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(independent_rows(&rows, 0..2, 3, 1e-12), vec![0]);
        assert_eq!(independent_rows(&rows, 0..3, 3, 1e-12), vec![0, 2]);
    }
}

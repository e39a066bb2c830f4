//! Incremental double-description method for pointed polyhedral cones
//! `{y | h_k . y >= 0}`.
//!
//! Rows that no current extreme ray violates are dropped on arrival: the
//! cone only shrinks, so such rows stay redundant. Zero sets therefore only
//! reference rows that actually cut, which keeps them short. Adjacency of a
//! positive/negative ray pair uses the combinatorial test (no third extreme
//! ray whose zero set contains the pair's common zero set), so degenerate
//! inputs need no perturbation.

use std::cmp::Ordering;

use super::field::{independent_rows, inverse_columns, Field};

#[derive(Debug, Clone)]
pub(crate) struct Ray<T> {
    pub v: Vec<T>,
    /// Sorted slots of stored rows this ray is tight on.
    pub zero: Vec<u32>,
}

#[derive(Debug)]
pub(crate) struct DoubleDescription<T> {
    dim: usize,
    tol: f64,
    rows: Vec<Vec<T>>,
    rays: Vec<Option<Ray<T>>>,
    /// Inverted index: row slot -> ray ids tight on it. Dead ids are skipped
    /// lazily and purged by `compact`.
    by_row: Vec<Vec<u32>>,
    alive: usize,
    index_entries: usize,
    live_entries: usize,
    // scratch
    sign: Vec<i8>,
    counts: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DdError {
    /// The cone contains a line: fewer than `dim` independent rows.
    NotPointed,
}

impl<T: Field> DoubleDescription<T> {
    /// Start from the simplicial cone of `dim` rows picked from `rows`
    /// (in the preference `order`). Returns the engine and the indices of
    /// rows consumed by the initial basis.
    pub fn start(
        dim: usize,
        rows: &[Vec<T>],
        order: &[usize],
        tol: f64,
    ) -> Result<(Self, Vec<usize>), DdError> {
        let rank_tol = if tol == 0.0 { 0.0 } else { 1e-9_f64.max(tol) };
        let picked = independent_rows(rows, order.iter().copied(), dim, rank_tol);
        if picked.len() < dim {
            return Err(DdError::NotPointed);
        }
        let basis: Vec<Vec<T>> = picked.iter().map(|&i| rows[i].clone()).collect();
        let cols = inverse_columns(&basis).ok_or(DdError::NotPointed)?;
        let mut dd = DoubleDescription {
            dim,
            tol,
            rows: basis,
            rays: Vec::with_capacity(dim * 4),
            by_row: vec![Vec::new(); dim],
            alive: 0,
            index_entries: 0,
            live_entries: 0,
            sign: Vec::new(),
            counts: Vec::new(),
        };
        for (j, mut v) in cols.into_iter().enumerate() {
            T::normalize(&mut v);
            let zero: Vec<u32> = (0..dim as u32).filter(|&k| k as usize != j).collect();
            dd.insert(Ray { v, zero });
        }
        Ok((dd, picked))
    }

    pub fn rays(&self) -> impl Iterator<Item = &Ray<T>> {
        self.rays.iter().flatten()
    }

    pub fn ray_count(&self) -> usize {
        self.alive
    }

    fn insert(&mut self, ray: Ray<T>) {
        let id = self.rays.len() as u32;
        for &z in &ray.zero {
            self.by_row[z as usize].push(id);
        }
        self.index_entries += ray.zero.len();
        self.live_entries += ray.zero.len();
        self.rays.push(Some(ray));
        self.alive += 1;
    }

    /// Intersect the cone with `row . y >= 0`. Returns `false` when the row
    /// is already implied (nothing stored).
    pub fn add_row(&mut self, row: Vec<T>) -> bool {
        let n = self.rays.len();
        self.sign.clear();
        self.sign.resize(n, 0);
        let mut values: Vec<Option<T>> = vec![None; n];
        let mut neg = Vec::new();
        let mut pos_count = 0usize;
        for (id, slot) in self.rays.iter().enumerate() {
            if let Some(r) = slot {
                let val = T::dot(&row, &r.v);
                let s = match val.sign(self.tol) {
                    Ordering::Greater => {
                        pos_count += 1;
                        1
                    }
                    Ordering::Less => {
                        neg.push(id as u32);
                        -1
                    }
                    Ordering::Equal => 0,
                };
                self.sign[id] = s;
                values[id] = Some(val);
            }
        }
        if neg.is_empty() {
            return false;
        }
        let slot = self.rows.len() as u32;
        self.rows.push(row);
        self.by_row.push(Vec::new());

        let mut fresh: Vec<Ray<T>> = Vec::new();
        if pos_count > 0 {
            self.counts.clear();
            self.counts.resize(n, 0);
            let need = self.dim.saturating_sub(2);
            let mut touched: Vec<u32> = Vec::new();
            for &ni in &neg {
                let candidates: Vec<u32> = if need == 0 {
                    (0..n as u32).filter(|&i| self.sign[i as usize] == 1).collect()
                } else {
                    let zn = &self.rays[ni as usize].as_ref().unwrap().zero;
                    for &z in zn {
                        for &id in &self.by_row[z as usize] {
                            let idu = id as usize;
                            if self.sign[idu] == 1 && self.rays[idu].is_some() {
                                if self.counts[idu] == 0 {
                                    touched.push(id);
                                }
                                self.counts[idu] += 1;
                            }
                        }
                    }
                    let c = touched
                        .iter()
                        .copied()
                        .filter(|&id| self.counts[id as usize] as usize >= need)
                        .collect();
                    for &id in &touched {
                        self.counts[id as usize] = 0;
                    }
                    touched.clear();
                    c
                };
                for pi in candidates {
                    let (p, q) = (
                        self.rays[pi as usize].as_ref().unwrap(),
                        self.rays[ni as usize].as_ref().unwrap(),
                    );
                    let common = intersect(&p.zero, &q.zero);
                    if common.len() < need || !self.adjacent(pi, ni, &common) {
                        continue;
                    }
                    let vp = values[pi as usize].as_ref().unwrap();
                    let vn = values[ni as usize].as_ref().unwrap();
                    // vp > 0, vn < 0: vp * q - vn * p is a positive combination
                    // with row . v == 0.
                    let mut v: Vec<T> = q
                        .v
                        .iter()
                        .zip(&p.v)
                        .map(|(a, b)| vp.mul(a).sub(&vn.mul(b)))
                        .collect();
                    T::normalize(&mut v);
                    let mut zero = common;
                    zero.push(slot);
                    fresh.push(Ray { v, zero });
                }
            }
        }

        for id in 0..n {
            if self.rays[id].is_none() {
                continue;
            }
            match self.sign[id] {
                0 => {
                    self.rays[id].as_mut().unwrap().zero.push(slot);
                    self.by_row[slot as usize].push(id as u32);
                    self.index_entries += 1;
                    self.live_entries += 1;
                }
                -1 => {
                    let dead = self.rays[id].take().unwrap();
                    self.live_entries -= dead.zero.len();
                    self.alive -= 1;
                }
                _ => {}
            }
        }
        for r in fresh {
            self.insert(r);
        }
        if self.index_entries > 2 * self.live_entries + 4096 {
            self.compact();
        }
        true
    }

    fn adjacent(&self, a: u32, b: u32, common: &[u32]) -> bool {
        if common.is_empty() {
            return self.alive == 2;
        }
        let shortest = common
            .iter()
            .min_by_key(|&&z| self.by_row[z as usize].len())
            .copied()
            .unwrap();
        for &id in &self.by_row[shortest as usize] {
            if id == a || id == b {
                continue;
            }
            if let Some(r) = &self.rays[id as usize] {
                if is_subset(common, &r.zero) {
                    return false;
                }
            }
        }
        true
    }

    fn compact(&mut self) {
        for list in &mut self.by_row {
            list.retain(|&id| self.rays[id as usize].is_some());
        }
        self.index_entries = self.live_entries;
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

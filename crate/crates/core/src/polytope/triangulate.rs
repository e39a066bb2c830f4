//! Simplex counts of a pulling triangulation of a hull boundary.
//!
//! Hull codes that triangulate their output report one row per boundary
//! simplex instead of one per facet; on highly degenerate point sets (such
//! as Minkowski sums of friction cones) the two counts differ by orders of
//! magnitude. The face lattice is read off the facet/vertex incidence.

use std::collections::HashMap;

use super::hull::Hull;

/// Number of boundary simplices contributed by each facet of `hull`, for
/// the pulling triangulation that pulls vertices in index order.
///
/// Unbounded hulls are not triangulated; every facet counts once.
pub fn pulling_simplex_counts(hull: &Hull) -> Vec<usize> {
    let facets: Vec<Vec<u32>> = hull
        .incidence
        .iter()
        .map(|f| f.iter().map(|&v| v as u32).collect())
        .collect();
    let mut by_vertex: Vec<Vec<u32>> = vec![Vec::new(); hull.vertices.len()];
    for (j, f) in facets.iter().enumerate() {
        for &v in f {
            by_vertex[v as usize].push(j as u32);
        }
    }
    let top = hull.affine_dim.saturating_sub(1);
    let mut ctx = Ctx {
        facets: &facets,
        by_vertex: &by_vertex,
        memo: HashMap::new(),
    };
    facets
        .iter()
        .map(|f| ctx.count(f, top) as usize)
        .collect()
}

struct Ctx<'a> {
    facets: &'a [Vec<u32>],
    by_vertex: &'a [Vec<u32>],
    memo: HashMap<Vec<u32>, u64>,
}

impl Ctx<'_> {
    /// Simplices of dimension `dim` in the pulling triangulation of `face`.
    fn count(&mut self, face: &[u32], dim: usize) -> u64 {
        if face.len() <= dim + 1 || dim == 0 {
            return 1;
        }
        if let Some(&c) = self.memo.get(face) {
            return c;
        }
        let pulled = face[0];
        let mut candidates: Vec<u32> = face
            .iter()
            .flat_map(|&v| self.by_vertex[v as usize].iter().copied())
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let mut subs: Vec<Vec<u32>> = Vec::new();
        for j in candidates {
            let s = intersect(face, &self.facets[j as usize]);
            if s.len() >= dim && s.len() < face.len() {
                subs.push(s);
            }
        }
        subs.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        subs.dedup();
        let mut ridges: Vec<Vec<u32>> = Vec::new();
        for s in subs {
            if !ridges.iter().any(|r| is_subset(&s, r)) {
                ridges.push(s);
            }
        }
        let mut total = 0;
        for r in &ridges {
            if r.binary_search(&pulled).is_err() {
                total += self.count(r, dim - 1);
            }
        }
        self.memo.insert(face.to_vec(), total);
        total
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    small.len() <= big.len() && small.iter().all(|x| big.binary_search(x).is_ok())
}

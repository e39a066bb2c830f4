use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::field::independent_rows;
use super::vertex::cone_rays;
use super::{dd::DdError, EnumOptions, HRep, PolytopeError, VRep};

/// Spread (rms, in range-scaled coordinates) below which a direction is
/// treated as flat and turned into an equality row.
const FLAT: f64 = 1e-10;
/// Slack (range-scaled, unit normals) under which a point counts as lying
/// on a facet.
const ON_FACET: f64 = 1e-8;

/// Convex hull of a point set with facet/vertex incidence.
#[derive(Debug, Clone)]
pub struct Hull {
    /// Irredundant facets, plus equality rows when the points are flat.
    pub h: HRep,
    /// Input indices of the extreme points, one per distinct location.
    pub vertices: Vec<usize>,
    /// For every facet row, the sorted positions (into `vertices`) of the
    /// extreme points on it.
    pub incidence: Vec<Vec<usize>>,
    /// Affine dimension of the input.
    pub affine_dim: usize,
}

/// V -> H conversion. See [`facet_enumeration_with`].
pub fn facet_enumeration(v: &VRep) -> Result<HRep, PolytopeError> {
    facet_enumeration_with(v, &EnumOptions::default())
}

/// V -> H conversion by double description on the cone of valid
/// inequalities `{(beta, a) | a . u_i <= beta, a . r_j <= 0}`.
pub fn facet_enumeration_with(v: &VRep, opts: &EnumOptions) -> Result<HRep, PolytopeError> {
    Ok(hull_with_rays(&v.vertices, &v.rays, opts)?.h)
}

/// Convex hull of `points` with default options.
pub fn convex_hull(points: &[DVector<f64>]) -> Result<Hull, PolytopeError> {
    hull_with_rays(points, &[], &EnumOptions::default())
}

pub fn convex_hull_with(points: &[DVector<f64>], opts: &EnumOptions) -> Result<Hull, PolytopeError> {
    hull_with_rays(points, &[], opts)
}

fn hull_with_rays(
    points: &[DVector<f64>],
    rays: &[DVector<f64>],
    opts: &EnumOptions,
) -> Result<Hull, PolytopeError> {
    let n = points.len();
    if n == 0 {
        return Err(PolytopeError::DegenerateInput);
    }
    let d = points[0].len();
    if points.iter().chain(rays).any(|p| p.len() != d) {
        return Err(PolytopeError::DimensionMismatch {
            expected: d,
            got: points.iter().chain(rays).find(|p| p.len() != d).unwrap().len(),
        });
    }

    // Center on the centroid and scale each axis to unit range.
    let centroid = points.iter().fold(DVector::zeros(d), |acc, p| acc + p) / n as f64;
    let mut scale = DVector::from_element(d, 0.0f64);
    for p in points {
        scale = scale.sup(&(p - &centroid).abs());
    }
    for r in rays {
        let rn = r.norm().max(f64::MIN_POSITIVE);
        scale = scale.sup(&(r.abs() / rn));
    }
    let max_scale = scale.max();
    for s in scale.iter_mut() {
        if *s <= max_scale * 1e-300 || *s == 0.0 {
            *s = 1.0;
        }
    }
    let z: Vec<DVector<f64>> = points
        .iter()
        .map(|p| (p - &centroid).component_div(&scale))
        .collect();
    let w: Vec<DVector<f64>> = rays
        .iter()
        .map(|r| {
            let s = r.component_div(&scale);
            let sn = s.norm();
            s / sn
        })
        .collect();

    // Affine rank from the second-moment matrix.
    let mut moment = DMatrix::<f64>::zeros(d, d);
    for p in z.iter().chain(&w) {
        moment += p * p.transpose();
    }
    let count = (z.len() + w.len()) as f64;
    let eig = SymmetricEigen::new(moment / count);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let k = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i].max(0.0).sqrt() > FLAT)
        .count();
    if k == 0 {
        return Err(PolytopeError::DegenerateInput);
    }
    let basis = DMatrix::from_fn(d, k, |r, c| eig.eigenvectors[(r, order[c])]);
    let full = k == d;

    // Working coordinates: projected onto the affine hull when flat.
    // The exact mode works on the raw input when it is full-dimensional.
    let raw_exact = opts.exact && full;
    let project = |p: &DVector<f64>| -> DVector<f64> {
        if full {
            p.clone()
        } else {
            basis.transpose() * p
        }
    };
    let pz: Vec<DVector<f64>> = if raw_exact {
        points.to_vec()
    } else {
        z.iter().map(project).collect()
    };
    let pw: Vec<DVector<f64>> = if raw_exact {
        rays.to_vec()
    } else {
        w.iter().map(project).collect()
    };

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(pw.len() + pz.len());
    for r in &pw {
        let mut row = vec![0.0];
        row.extend(r.iter().map(|x| -x));
        rows.push(row);
    }
    for p in &pz {
        let mut row = vec![1.0];
        row.extend(p.iter().map(|x| -x));
        rows.push(row);
    }
    if !opts.exact {
        for r in rows.iter_mut() {
            super::field::Field::normalize(r.as_mut_slice());
        }
    }
    // Rays first, then points from the outside in: far points are the
    // likeliest extreme points and settle the cone early.
    let mut ord: Vec<usize> = (0..pw.len()).collect();
    let mut by_dist: Vec<usize> = (0..pz.len()).collect();
    by_dist.sort_by(|&a, &b| z[b].norm().total_cmp(&z[a].norm()).then(a.cmp(&b)));
    ord.extend(by_dist.iter().map(|i| i + pw.len()));

    let cone = cone_rays(k + 1, &rows, &ord, opts).map_err(|e| match e {
        DdError::NotPointed => PolytopeError::NumericalDegeneracy(
            "inequality cone of the point set is not pointed".into(),
        ),
    })?;

    // Facets in working coordinates, unit normals.
    let mut facets: Vec<(DVector<f64>, f64)> = Vec::new();
    for ray in cone {
        let a = DVector::from_column_slice(&ray[1..]);
        let an = a.norm();
        if an < 1e-9 * ray[0].abs().max(1.0) {
            continue; // the trivial inequality 0 <= 1
        }
        facets.push((a / an, ray[0] / an));
    }
    if raw_exact {
        // Re-express in the scaled frame so that incidence uses one tolerance.
        facets = facets
            .into_iter()
            .map(|(a, beta)| {
                let az = a.component_mul(&scale);
                let bz = beta - a.dot(&centroid);
                let nz = az.norm();
                (az / nz, bz / nz)
            })
            .collect();
    }
    let zp: Vec<DVector<f64>> = z.iter().map(project).collect();

    // Incidence and extreme points.
    let on: Vec<Vec<u32>> = zp
        .iter()
        .map(|p| {
            facets
                .iter()
                .enumerate()
                .filter(|(_, (a, beta))| (beta - a.dot(p)).abs() <= ON_FACET)
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect();
    let normals: Vec<Vec<f64>> = facets.iter().map(|(a, _)| a.iter().copied().collect()).collect();
    let mut seen: HashMap<&[u32], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let needs = if rays.is_empty() { k } else { k.min(facets.len()) };
    for (i, inc) in on.iter().enumerate() {
        if inc.len() < needs || seen.contains_key(inc.as_slice()) {
            continue;
        }
        let r = independent_rows(&normals, inc.iter().map(|&j| j as usize), k, 1e-9).len();
        if r == k || (k == 1 && !inc.is_empty()) {
            seen.insert(inc.as_slice(), vertices.len());
            vertices.push(i);
        }
    }
    let mut incidence = vec![Vec::new(); facets.len()];
    for (pos, &i) in vertices.iter().enumerate() {
        for &j in &on[i] {
            incidence[j as usize].push(pos);
        }
    }

    // Back to input coordinates.
    let mut a = DMatrix::zeros(facets.len(), d);
    let mut b = DVector::zeros(facets.len());
    for (row, (an, beta)) in facets.iter().enumerate() {
        let az = if full { an.clone() } else { &basis * an };
        let ay = az.component_div(&scale);
        b[row] = beta + ay.dot(&centroid);
        a.set_row(row, &ay.transpose());
    }
    let flat = d - k;
    let mut c = DMatrix::zeros(flat, d);
    let mut dd = DVector::zeros(flat);
    for (row, &col) in order[k..].iter().enumerate() {
        let nz = eig.eigenvectors.column(col).into_owned();
        let ny = nz.component_div(&scale);
        dd[row] = ny.dot(&centroid);
        c.set_row(row, &ny.transpose());
    }
    let h = HRep::with_equalities(a, b, c, dd)?;
    Ok(Hull {
        h,
        vertices,
        incidence,
        affine_dim: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{rep::tests_support::cube, vertex_enumeration};
    use rand::{Rng, SeedableRng};

    fn pts(raw: &[&[f64]]) -> Vec<DVector<f64>> {
        raw.iter().map(|p| DVector::from_column_slice(p)).collect()
    }

    #[test]
    fn cube_facets() {
        let v = vertex_enumeration(&cube(3)).unwrap();
        let h = facet_enumeration(&v).unwrap();
        assert_eq!(h.nrows(), 6);
        for i in 0..6 {
            assert!((h.b[i] - 1.0).abs() < 1e-12);
            assert!((h.a.row(i).amax() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_facets() {
        let hull = convex_hull(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.2, 0.2]])).unwrap();
        assert_eq!(hull.h.nrows(), 3);
        assert_eq!(hull.vertices, vec![0, 1, 2]);
        let s = 0.5f64.sqrt();
        let mut found = [false; 3];
        for i in 0..3 {
            let r: Vec<f64> = hull.h.a.row(i).iter().copied().collect();
            if (r[0] + 1.0).abs() < 1e-12 && hull.h.b[i].abs() < 1e-12 {
                found[0] = true;
            }
            if (r[1] + 1.0).abs() < 1e-12 && hull.h.b[i].abs() < 1e-12 {
                found[1] = true;
            }
            if (r[0] - s).abs() < 1e-12 && (r[1] - s).abs() < 1e-12 && (hull.h.b[i] - s).abs() < 1e-12 {
                found[2] = true;
            }
        }
        assert_eq!(found, [true; 3]);
    }

    #[test]
    fn flat_square_in_space_gets_equality() {
        let hull = convex_hull(&pts(&[
            &[0.0, 0.0, 2.0],
            &[1.0, 0.0, 2.0],
            &[1.0, 1.0, 2.0],
            &[0.0, 1.0, 2.0],
        ]))
        .unwrap();
        assert_eq!(hull.affine_dim, 2);
        assert_eq!(hull.h.neq(), 1);
        assert_eq!(hull.h.nrows(), 4);
        assert!((hull.h.c[(0, 2)].abs() - 1.0).abs() < 1e-12);
        assert!((hull.h.d[0].abs() - 2.0).abs() < 1e-12);
        assert_eq!(hull.vertices.len(), 4);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let err = convex_hull(&pts(&[&[1.0, 2.0], &[1.0, 2.0]])).unwrap_err();
        assert_eq!(err, PolytopeError::DegenerateInput);
    }

    #[test]
    fn segment_in_plane() {
        let hull = convex_hull(&pts(&[&[0.0, 0.0], &[2.0, 2.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(hull.affine_dim, 1);
        assert_eq!(hull.h.nrows(), 2);
        assert_eq!(hull.vertices, vec![0, 1]);
    }

    #[test]
    fn duplicates_collapse() {
        let hull = convex_hull(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_eq!(hull.vertices.len(), 3);
    }

    #[test]
    fn rays_give_unbounded_rows() {
        let v = VRep::new(
            pts(&[&[0.0, 0.0]]),
            pts(&[&[1.0, 0.0], &[0.0, 1.0]]),
        )
        .unwrap();
        let h = facet_enumeration(&v).unwrap();
        assert_eq!(h.nrows(), 2);
        assert!(h.contains(&DVector::from_vec(vec![5.0, 7.0]), 1e-12));
        assert!(!h.contains(&DVector::from_vec(vec![-1.0, 7.0]), 1e-6));
    }

    #[test]
    fn random_cloud_six_d() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cloud: Vec<DVector<f64>> = (0..40)
            .map(|_| DVector::from_fn(6, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        let hull = convex_hull(&cloud).unwrap();
        for p in &cloud {
            assert!(hull.h.contains(p, 1e-9));
        }
        for inc in &hull.incidence {
            assert!(inc.len() >= 6);
        }
    }

    #[test]
    fn exact_mode_matches_float() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let cloud: Vec<DVector<f64>> = (0..25)
            .map(|_| DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        let f = convex_hull(&cloud).unwrap();
        let e = convex_hull_with(
            &cloud,
            &EnumOptions {
                exact: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(f.h.nrows(), e.h.nrows());
        assert_eq!(f.vertices.len(), e.vertices.len());
    }
}

//! Guided inner approximation of a wrench set: grow a hull from exact
//! vertices, each time pushing out the face that leaves the most guiding
//! samples uncovered.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cone::{ConeKind, WrenchCone};
use super::guide::GuidingSampleSet;
use super::ContactError;
use crate::polytope::{convex_hull, pulling_simplex_counts, Hull, VRep};

/// Guides within this distance (scaled units) of a face count as covered.
const COVER_TOL: f64 = 1e-9;
const SEED_VOLUME: f64 = 1e-12;
const SEED_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    /// Size of the point set Y hulled in this iteration.
    pub points: usize,
    pub hull_vertices: usize,
    pub facets: usize,
    pub covered: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ApproxReport {
    pub seed_attempts: usize,
    pub iterations: Vec<IterationStats>,
    /// Faces dropped from candidacy because no exact vertex lay beyond them.
    pub no_progress: usize,
    pub guides: usize,
}

impl ApproxReport {
    pub fn final_coverage(&self) -> f64 {
        self.iterations.last().map_or(0.0, |s| s.coverage)
    }
}

#[derive(Debug, Clone)]
pub struct ApproxHull {
    /// Hull of the selected points, in input coordinates.
    pub hull: Hull,
    /// The selected point set Y (seed first, then one point per iteration).
    pub points: Vec<DVector<f64>>,
    pub report: ApproxReport,
}

/// The approximation procedure in any dimension `d`: seed with a `d`-simplex
/// of guides, then add exact vertices until `max_points` are selected or
/// every guide is covered.
pub fn approximate_hull(
    exact_vertices: &[DVector<f64>],
    guides: &[DVector<f64>],
    max_points: usize,
    seed: u64,
) -> Result<ApproxHull, ContactError> {
    let d = exact_vertices
        .first()
        .map(|v| v.len())
        .ok_or_else(|| ContactError::InvalidParameter("no exact vertices".into()))?;
    if max_points < d + 1 {
        return Err(ContactError::InvalidParameter(format!(
            "vertex budget {max_points} is below the {} points of a simplex",
            d + 1
        )));
    }
    if guides.is_empty() {
        return Err(ContactError::TooFewRetained(0));
    }
    let scale = axis_scale(guides);
    let sc = |p: &DVector<f64>| p.component_div(&scale);
    let sg: Vec<DVector<f64>> = guides.iter().map(sc).collect();
    let sv: Vec<DVector<f64>> = exact_vertices.iter().map(sc).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ApproxReport {
        guides: guides.len(),
        ..Default::default()
    };
    let (mut y, mut from_exact) = seed_simplex(&sg, &sv, &mut rng, &mut report)?;

    let mut banned: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut iteration = 0;
    loop {
        let hull = convex_hull(&y).map_err(ContactError::Polytope)?;
        let slack: Vec<DVector<f64>> = sg.iter().map(|g| &hull.h.a * g - &hull.h.b).collect();
        let covered = slack.iter().filter(|s| s.max() <= COVER_TOL).count();
        report.iterations.push(IterationStats {
            iteration,
            points: y.len(),
            hull_vertices: hull.vertices.len(),
            facets: hull.h.nrows(),
            covered,
            coverage: covered as f64 / sg.len() as f64,
        });
        if covered == sg.len() || y.len() >= max_points {
            break;
        }

        // Face with the most guides beyond it; ties by the farthest guide,
        // then by index.
        let mut best: Option<(usize, usize, f64)> = None;
        for j in 0..hull.h.nrows() {
            let row = hull.h.a.row(j).transpose();
            if banned
                .iter()
                .any(|(a, b)| (a - &row).amax() < 1e-12 && (b - hull.h.b[j]).abs() < 1e-12)
            {
                continue;
            }
            let (mut n, mut far) = (0usize, 0.0f64);
            for s in &slack {
                if s[j] > COVER_TOL {
                    n += 1;
                    far = far.max(s[j]);
                }
            }
            if n == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, bn, bf)) => n > bn || (n == bn && far > bf),
            };
            if better {
                best = Some((j, n, far));
            }
        }
        let Some((j, _, _)) = best else {
            break;
        };

        let row = hull.h.a.row(j).transpose();
        let beta = hull.h.b[j];
        let mut pick: Option<(usize, f64)> = None;
        for (i, v) in sv.iter().enumerate() {
            if from_exact[i] {
                continue;
            }
            let dist = row.dot(v) - beta;
            if dist > COVER_TOL && pick.map_or(true, |(_, bd)| dist > bd) {
                pick = Some((i, dist));
            }
        }
        match pick {
            Some((i, _)) => {
                from_exact[i] = true;
                y.push(sv[i].clone());
                iteration += 1;
            }
            None => {
                report.no_progress += 1;
                banned.push((row, beta));
            }
        }
    }

    // Back to input units.
    let points: Vec<DVector<f64>> = y.iter().map(|p| p.component_mul(&scale)).collect();
    let hull = convex_hull(&points).map_err(ContactError::Polytope)?;
    Ok(ApproxHull {
        hull,
        points,
        report,
    })
}

/// Guided approximation of an exact wrench set (6-D, 7-point seed).
pub fn approximate_cone(
    exact: &WrenchCone,
    guides: &GuidingSampleSet,
    max_vertices: usize,
    seed: u64,
) -> Result<(WrenchCone, ApproxReport), ContactError> {
    let verts = exact
        .vertices
        .as_ref()
        .ok_or_else(|| ContactError::InvalidParameter("exact cone has no vertex list".into()))?;
    let g: Vec<DVector<f64>> = guides
        .samples
        .iter()
        .map(|w| DVector::from_column_slice(w.as_slice()))
        .collect();
    let out = approximate_hull(&verts.vertices, &g, max_vertices, seed)?;
    let simplex_counts = pulling_simplex_counts(&out.hull);
    let hv: Vec<DVector<f64>> = out.hull.vertices.iter().map(|&i| out.points[i].clone()).collect();
    Ok((
        WrenchCone {
            h: out.hull.h,
            kind: ConeKind::Approximate,
            vertices: Some(VRep::from_points(&hv).map_err(ContactError::Polytope)?),
            simplex_counts,
        },
        out.report,
    ))
}

fn axis_scale(points: &[DVector<f64>]) -> DVector<f64> {
    let d = points[0].len();
    let n = points.len() as f64;
    let mean = points.iter().fold(DVector::zeros(d), |a, p| a + p) / n;
    let var = points
        .iter()
        .fold(DVector::zeros(d), |a: DVector<f64>, p| a + (p - &mean).map(|x| x * x))
        / n;
    var.map(|v| if v.sqrt() > 1e-12 { v.sqrt() } else { 1.0 })
}

fn simplex_volume(pts: &[&DVector<f64>]) -> f64 {
    let d = pts[0].len();
    let m = DMatrix::from_fn(d, d, |r, c| pts[c + 1][r] - pts[0][r]);
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    m.determinant().abs() / fact
}

/// Step 2: a full-dimensional simplex of guides. When the guides are flat
/// no such simplex exists; the seed is then the exact vertices whose hull
/// contains the guide centroid (a basic solution of the convex-combination
/// LP), completed to full dimension with far exact vertices.
fn seed_simplex(
    sg: &[DVector<f64>],
    sv: &[DVector<f64>],
    rng: &mut ChaCha8Rng,
    report: &mut ApproxReport,
) -> Result<(Vec<DVector<f64>>, Vec<bool>), ContactError> {
    let d = sg[0].len();
    if affine_rank(sg) == d {
        for attempt in 1..=SEED_ATTEMPTS {
            let idx = sample(rng, sg.len(), d + 1).into_vec();
            let pts: Vec<&DVector<f64>> = idx.iter().map(|&i| &sg[i]).collect();
            if simplex_volume(&pts) > SEED_VOLUME {
                report.seed_attempts = attempt;
                return Ok((pts.into_iter().cloned().collect(), vec![false; sv.len()]));
            }
        }
        return Err(ContactError::DegenerateSeed);
    }

    report.seed_attempts = 1;
    let centroid = sg.iter().fold(DVector::zeros(d), |a, p| a + p) / sg.len() as f64;
    let mut chosen = support_of(sv, &centroid).ok_or(ContactError::DegenerateSeed)?;
    while chosen.len() < d + 1 {
        // farthest exact vertex from the affine hull of the chosen ones
        let base = &sv[chosen[0]];
        let dirs: Vec<DVector<f64>> = chosen[1..].iter().map(|&i| &sv[i] - base).collect();
        let q = orthonormal(&dirs);
        let mut far: Option<(usize, f64)> = None;
        for (i, v) in sv.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = v - base;
            for e in &q {
                r -= e * e.dot(&r);
            }
            let dist = r.norm();
            if far.map_or(true, |(_, fd)| dist > fd) {
                far = Some((i, dist));
            }
        }
        match far {
            Some((i, dist)) if dist > 1e-9 => chosen.push(i),
            _ => return Err(ContactError::DegenerateSeed),
        }
    }
    let mut used = vec![false; sv.len()];
    for &i in &chosen {
        used[i] = true;
    }
    Ok((chosen.iter().map(|&i| sv[i].clone()).collect(), used))
}

fn orthonormal(dirs: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut q: Vec<DVector<f64>> = Vec::new();
    for v in dirs {
        let mut r = v.clone();
        for e in &q {
            r -= e * e.dot(&r);
        }
        let n = r.norm();
        if n > 1e-12 {
            q.push(r / n);
        }
    }
    q
}

fn affine_rank(pts: &[DVector<f64>]) -> usize {
    let dirs: Vec<DVector<f64>> = pts[1..].iter().map(|p| p - &pts[0]).collect();
    let scale = dirs.iter().map(|v| v.amax()).fold(0.0, f64::max).max(1e-300);
    let scaled: Vec<DVector<f64>> = dirs.iter().map(|v| v / scale).collect();
    // Gram-Schmidt with a relative threshold
    let mut q: Vec<DVector<f64>> = Vec::new();
    for v in &scaled {
        let mut r = v.clone();
        for e in &q {
            r -= e * e.dot(&r);
        }
        let n = r.norm();
        if n > 1e-9 {
            q.push(r / n);
        }
    }
    q.len()
}

/// Indices of at most `d + 1` vertices whose hull contains `x`.
fn support_of(sv: &[DVector<f64>], x: &DVector<f64>) -> Option<Vec<usize>> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let lam: Vec<_> = sv.iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    p.add_constraint(lam.iter().map(|&l| (l, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    for k in 0..x.len() {
        let expr: Vec<_> = lam.iter().zip(sv).map(|(&l, v)| (l, v[k])).collect();
        p.add_constraint(expr, ComparisonOp::Eq, x[k]);
    }
    let s = p.solve().ok()?;
    let mut idx: Vec<usize> = lam
        .iter()
        .enumerate()
        .filter(|(_, l)| *s.var_value(**l) > 1e-12)
        .map(|(i, _)| i)
        .collect();
    idx.truncate(x.len() + 1);
    Some(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn polygon(k: usize, r: f64) -> Vec<DVector<f64>> {
        (0..k)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / k as f64;
                DVector::from_vec(vec![r * t.cos(), r * t.sin()])
            })
            .collect()
    }

    #[test]
    fn planar_cluster_needs_few_vertices() {
        // a 12-gon region and a blob of guides off to one side
        let exact = polygon(12, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let guides: Vec<DVector<f64>> = (0..200)
            .map(|_| {
                DVector::from_vec(vec![
                    0.45 + rng.gen_range(-0.2..0.2),
                    0.1 + rng.gen_range(-0.2..0.2),
                ])
            })
            .collect();
        let out = approximate_hull(&exact, &guides, 20, 1).unwrap();
        assert_eq!(out.report.final_coverage(), 1.0);
        assert!(out.hull.vertices.len() <= 5, "{} vertices", out.hull.vertices.len());
        for w in out.report.iterations.windows(2) {
            assert!(w[1].covered >= w[0].covered);
            assert_eq!(w[1].points, w[0].points + 1);
        }
    }

    #[test]
    fn single_guide_point_stops_after_seeding() {
        let exact = polygon(8, 1.0);
        let guides = vec![DVector::from_vec(vec![0.1, 0.2]); 10];
        let out = approximate_hull(&exact, &guides, 20, 0).unwrap();
        assert_eq!(out.report.iterations.len(), 1);
        assert_eq!(out.report.final_coverage(), 1.0);
    }

    #[test]
    fn budget_equal_to_simplex_means_no_iterations() {
        let exact = polygon(12, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let guides: Vec<DVector<f64>> = (0..50)
            .map(|_| DVector::from_vec(vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]))
            .collect();
        let out = approximate_hull(&exact, &guides, 3, 3).unwrap();
        assert_eq!(out.report.iterations.len(), 1);
        assert_eq!(out.points.len(), 3);
    }

    #[test]
    fn deterministic_under_seed() {
        let exact = polygon(16, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let guides: Vec<DVector<f64>> = (0..80)
            .map(|_| DVector::from_vec(vec![rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)]))
            .collect();
        let a = approximate_hull(&exact, &guides, 10, 5).unwrap();
        let b = approximate_hull(&exact, &guides, 10, 5).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.report, b.report);
    }
}

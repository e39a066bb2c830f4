use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suctopp::polytope::{facet_enumeration, vertex_enumeration, HRep, VRep};

/// Bounded polytope: a box cut by random halfspaces that keep the origin
/// strictly inside.
fn random_hrep(dim: usize, cuts: usize, seed: u64) -> HRep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * dim + cuts;
    let mut a = DMatrix::zeros(n, dim);
    let mut b = DVector::zeros(n);
    for j in 0..dim {
        a[(2 * j, j)] = 1.0;
        a[(2 * j + 1, j)] = -1.0;
        b[2 * j] = rng.gen_range(0.5..2.0);
        b[2 * j + 1] = rng.gen_range(0.5..2.0);
    }
    for i in 2 * dim..n {
        for j in 0..dim {
            a[(i, j)] = rng.gen_range(-1.0..1.0);
        }
        b[i] = rng.gen_range(0.3..1.5);
    }
    HRep::new(a, b).unwrap()
}

fn random_points(dim: usize, n: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0)))
        .collect()
}

fn same_points(p: &[DVector<f64>], q: &[DVector<f64>], tol: f64) -> bool {
    p.len() == q.len() && p.iter().all(|x| q.iter().any(|y| (x - y).amax() <= tol))
}

/// Rows are unit-normalized, so "equal up to positive scaling" reduces to
/// equal rows in some order.
fn same_rows(h: &HRep, k: &HRep, tol: f64) -> bool {
    let rows = |h: &HRep| h.rows();
    let (r, s) = (rows(h), rows(k));
    r.len() == s.len()
        && r.iter().all(|(a, b)| {
            s.iter()
                .any(|(c, d)| (b - d).abs() <= tol && a.iter().zip(c).all(|(x, y)| (x - y).abs() <= tol))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vertices_satisfy_input(dim in 2usize..=5, cuts in 0usize..8, seed in any::<u64>()) {
        let h = random_hrep(dim, cuts, seed);
        let v = vertex_enumeration(&h).unwrap();
        prop_assert!(v.rays.is_empty());
        for x in &v.vertices {
            prop_assert!(h.violation(x) <= 1e-9, "violation {}", h.violation(x));
        }
    }

    #[test]
    fn round_trip_membership(dim in 2usize..=5, cuts in 0usize..8, seed in any::<u64>()) {
        let h = random_hrep(dim, cuts, seed);
        let v = vertex_enumeration(&h).unwrap();
        let back = facet_enumeration(&v).unwrap();
        for x in random_points(dim, 200, seed ^ 0x5eed) {
            let x = 2.0 * x;
            let (m1, m2) = (h.violation(&x), back.violation(&x));
            // Points within the tolerance band of either boundary are ambiguous.
            if m1.abs() > 1e-7 && m2.abs() > 1e-7 {
                prop_assert_eq!(m1 <= 0.0, m2 <= 0.0);
            }
        }
    }

    #[test]
    fn duality_is_idempotent(dim in 2usize..=4, n in 8usize..20, seed in any::<u64>()) {
        let v = VRep::from_points(&random_points(dim, n, seed)).unwrap();
        let h1 = facet_enumeration(&v).unwrap();
        let v1 = vertex_enumeration(&h1).unwrap();
        let h2 = facet_enumeration(&v1).unwrap();
        let v2 = vertex_enumeration(&h2).unwrap();
        prop_assert!(same_rows(&h1, &h2, 1e-8));
        prop_assert!(same_points(&v1.vertices, &v2.vertices, 1e-8));
    }

    #[test]
    fn contains_is_monotone_in_tol(
        cuts in 0usize..6,
        seed in any::<u64>(),
        t1 in 0.0f64..1e-3,
        dt in 0.0f64..1e-3,
    ) {
        let h = random_hrep(3, cuts, seed);
        for x in random_points(3, 100, seed.wrapping_add(1)) {
            let x = 2.0 * x;
            if h.contains(&x, t1) {
                prop_assert!(h.contains(&x, t1 + dt));
            }
        }
    }
}

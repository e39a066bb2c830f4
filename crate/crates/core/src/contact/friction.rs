use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6x3, SMatrix, Vector3};

use super::model::{check_rotation, ContactModel};
use super::ContactError;
use crate::polytope::HRep;

/// Inscribed `k`-gon approximation of `|(f_x, f_y)| <= mu f_z` as rows
/// `n_j . (f_x, f_y) - mu cos(pi/k) f_z <= 0`. The edge normals start at
/// 225 degrees and turn clockwise, so `k = 4` gives the familiar
/// `(+-1, +-1, -mu)` rows in the order (-,-), (-,+), (+,+), (+,-).
pub fn linearize_friction_cone(mu: f64, k: usize) -> Result<HRep, ContactError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(ContactError::InvalidParameter("mu must be positive".into()));
    }
    if k < 4 || k % 2 != 0 {
        return Err(ContactError::InvalidParameter(format!(
            "facets per cone must be an even integer >= 4, got {k}"
        )));
    }
    let half = PI / k as f64;
    let mut a = DMatrix::zeros(k, 3);
    for j in 0..k {
        let th = PI + half - 2.0 * PI * j as f64 / k as f64;
        // divide by cos(pi/k) so the mu column is exactly -mu
        a[(j, 0)] = th.cos() / half.cos();
        a[(j, 1)] = th.sin() / half.cos();
        a[(j, 2)] = -mu;
    }
    // snap the 1e-16 residues of cos/sin so k = 4 reproduces +-1 exactly
    for v in a.iter_mut() {
        let r = v.round();
        if (*v - r).abs() < 1e-12 {
            *v = r;
        }
    }
    Ok(HRep::new(a, DVector::zeros(k))?)
}

/// Suction force in frame {0}: `(0, 0, P A)`.
pub fn suction_force(model: &ContactModel) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, model.pressure * model.area)
}

pub fn skew(p: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -p.z, p.y, p.z, 0.0, -p.x, -p.y, p.x, 0.0)
}

/// `G = [[p x] R; R]`: maps a force given in a frame at `(p, R)` to the
/// torque-first wrench it exerts about the origin of the parent frame.
pub fn wrench_transform(p: &Vector3<f64>, r: &Matrix3<f64>) -> Result<Matrix6x3<f64>, ContactError> {
    check_rotation(r)?;
    let mut g = Matrix6x3::zeros();
    g.fixed_view_mut::<3, 3>(0, 0).copy_from(&(skew(p) * r));
    g.fixed_view_mut::<3, 3>(3, 0).copy_from(r);
    Ok(g)
}

/// Rigid wrench transform from a frame at `(p, R)` to its parent, torque
/// first: `[[R, [p x] R]; [0, R]]`.
pub fn wrench_frame_transform(p: &Vector3<f64>, r: &Matrix3<f64>) -> SMatrix<f64, 6, 6> {
    let mut g = SMatrix::<f64, 6, 6>::zeros();
    g.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    g.fixed_view_mut::<3, 3>(0, 3).copy_from(&(skew(p) * r));
    g.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Rotation3, Vector6};
    use rand::{Rng, SeedableRng};

    #[test]
    fn four_rows_match_the_square_pyramid() {
        let h = linearize_friction_cone(0.3, 4).unwrap();
        let want: [[f64; 3]; 4] = [
            [-1.0, -1.0, -0.3],
            [-1.0, 1.0, -0.3],
            [1.0, 1.0, -0.3],
            [1.0, -1.0, -0.3],
        ];
        for (i, w) in want.iter().enumerate() {
            let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
            for j in 0..3 {
                assert!((h.a[(i, j)] - w[j] / n).abs() < 1e-15);
            }
            assert_eq!(h.b[i], 0.0);
        }
    }

    #[test]
    fn odd_or_small_k_rejected() {
        assert!(linearize_friction_cone(0.3, 3).is_err());
        assert!(linearize_friction_cone(0.3, 7).is_err());
        assert!(linearize_friction_cone(0.3, 2).is_err());
    }

    #[test]
    fn normal_force_is_feasible() {
        let h = linearize_friction_cone(0.5, 4).unwrap();
        assert!(h.contains(&DVector::from_vec(vec![0.0, 0.0, 10.0]), 0.0));
    }

    #[test]
    fn octagon_is_inside_the_circle() {
        let mu = 0.3;
        let h = linearize_friction_cone(mu, 8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut hits = 0;
        while hits < 1000 {
            let f = DVector::from_vec(vec![
                rng.gen_range(-0.4..0.4),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(0.0..1.0),
            ]);
            if h.contains(&f, 0.0) {
                hits += 1;
                assert!(f[0].hypot(f[1]) <= mu * f[2] + 1e-15);
            }
        }
    }

    #[test]
    fn suction_force_value() {
        let m = ContactModel::circular(0.3, 30e3, 0.0125, 3, 4, None).unwrap();
        let f = suction_force(&m);
        // 30e3 * pi * 0.0125^2
        assert!((f.z - 14.726_215_563_702_155).abs() < 1e-12);
        let mut m2 = m.clone();
        m2.area *= 2.0;
        assert!((suction_force(&m2).z - 2.0 * f.z).abs() < 1e-12);
    }

    #[test]
    fn transform_examples() {
        let g = wrench_transform(&Vector3::zeros(), &Matrix3::identity()).unwrap();
        assert_eq!(g.fixed_view::<3, 3>(0, 0).into_owned(), Matrix3::zeros());
        assert_eq!(g.fixed_view::<3, 3>(3, 0).into_owned(), Matrix3::identity());
        let g = wrench_transform(&Vector3::new(0.0, 0.0, 0.1), &Matrix3::identity()).unwrap();
        let w = g * Vector3::new(1.0, 0.0, 0.0);
        assert!((w - Vector6::new(0.0, 0.1, 0.0, 1.0, 0.0, 0.0)).norm() < 1e-15);
        let bad = Matrix3::identity() * 1.1;
        assert!(wrench_transform(&Vector3::zeros(), &bad).is_err());
    }

    #[test]
    fn transform_matches_screw_composition() {
        // oracle: move the force to world coordinates, then r x f about the origin
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let axis = nalgebra::Unit::new_normalize(Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
            let r = *Rotation3::from_axis_angle(&axis, rng.gen_range(-3.0..3.0)).matrix();
            let f = Vector3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let w = wrench_transform(&p, &r).unwrap() * f;
            let fw = r * f;
            let tau = p.cross(&fw);
            assert!((w.fixed_rows::<3>(0) - tau).norm() < 1e-12);
            assert!((w.fixed_rows::<3>(3) - fw).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_transform_agrees_with_point_transform() {
        let p = Vector3::new(0.1, -0.2, 0.3);
        let r = *Rotation3::from_euler_angles(0.3, -0.1, 1.2).matrix();
        let g6 = wrench_frame_transform(&p, &r);
        let g3 = wrench_transform(&p, &r).unwrap();
        let f = Vector3::new(1.0, 2.0, -3.0);
        let mut w = Vector6::zeros();
        w.fixed_rows_mut::<3>(3).copy_from(&f);
        assert!((g6 * w - g3 * f).norm() < 1e-14);
    }
}

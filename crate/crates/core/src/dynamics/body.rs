use std::path::Path;

use nalgebra::{DMatrix, DVector, Isometry3, Matrix3, SMatrix, SymmetricEigen, Vector3, Vector6};
use serde::Deserialize;

use super::chain::{rot_t, to_tensor, world_jacobian_derivatives, world_jacobians, SerialChain, TransformFile};
use super::DynamicsError;
use crate::contact::{wrench_frame_transform, WrenchCone};

/// Transported object: mass, inertia about the COM in {b}, the grasp
/// transform ({b} expressed in {c}) and world gravity.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBodyParams {
    pub mass: f64,
    pub inertia: Matrix3<f64>,
    pub grasp: Isometry3<f64>,
    pub gravity: Vector3<f64>,
}

pub const DEFAULT_GRAVITY: [f64; 3] = [0.0, 0.0, -9.81];

impl RigidBodyParams {
    pub fn new(mass: f64, inertia: Matrix3<f64>, grasp: Isometry3<f64>) -> Result<Self, DynamicsError> {
        let b = RigidBodyParams {
            mass,
            inertia,
            grasp,
            gravity: Vector3::from(DEFAULT_GRAVITY),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn with_gravity(mut self, g: Vector3<f64>) -> Self {
        self.gravity = g;
        self
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(DynamicsError::InvalidModel("mass must be positive".into()));
        }
        if (self.inertia - self.inertia.transpose()).norm() > 1e-12 * self.inertia.norm().max(1.0) {
            return Err(DynamicsError::InvalidModel("inertia is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(self.inertia).eigenvalues;
        if eig.iter().any(|e| !(*e > 0.0)) {
            return Err(DynamicsError::InvalidModel("inertia is not positive definite".into()));
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            return Err(DynamicsError::InvalidModel("gravity must be finite".into()));
        }
        Ok(())
    }

    /// `G_cb`: torque-first wrench transform from {b} to {c}.
    pub fn g_cb(&self) -> SMatrix<f64, 6, 6> {
        let r = self.grasp.rotation.to_rotation_matrix().into_inner();
        wrench_frame_transform(&self.grasp.translation.vector, &r)
    }
}

/// Body-frame velocity and acceleration of {b}: (omega, v, alpha, a).
/// `a` is the COM acceleration expressed in {b}.
pub fn body_motion(
    chain: &SerialChain,
    object: &RigidBodyParams,
    q: &[f64],
    qd: &[f64],
    qdd: &[f64],
) -> Result<[Vector3<f64>; 4], DynamicsError> {
    chain.check(qd)?;
    chain.check(qdd)?;
    let st = chain.state(q, &object.grasp)?;
    let (jv, jw) = world_jacobians(chain, &st);
    let (dv, dw) = world_jacobian_derivatives(chain, &st, &jv);
    let qd_v = DVector::from_column_slice(qd);
    let qdd_v = DVector::from_column_slice(qdd);
    let mut acc_v = &jv * &qdd_v;
    let mut acc_w = &jw * &qdd_v;
    for (k, qk) in qd.iter().enumerate() {
        acc_v += &dv[k] * &qd_v * *qk;
        acc_w += &dw[k] * &qd_v * *qk;
    }
    let rt = rot_t(&st.pose);
    let v3 = |m: DVector<f64>| Vector3::new(m[0], m[1], m[2]);
    Ok([
        v3(&rt * (&jw * &qd_v)),
        v3(&rt * (&jv * &qd_v)),
        v3(&rt * acc_w),
        v3(&rt * acc_v),
    ])
}

/// Newton-Euler wrench the gripper must apply to the object, in {b},
/// torque first.
pub fn object_wrench(
    chain: &SerialChain,
    object: &RigidBodyParams,
    q: &[f64],
    qd: &[f64],
    qdd: &[f64],
) -> Result<Vector6<f64>, DynamicsError> {
    let [w, _, alpha, a] = body_motion(chain, object, q, qd, qdd)?;
    let pose = chain.state(q, &object.grasp)?.pose;
    let g_b = pose.rotation.inverse() * object.gravity;
    let i = &object.inertia;
    let tau = i * alpha + w.cross(&(i * w));
    let f = object.mass * (a - g_b);
    Ok(Vector6::new(tau.x, tau.y, tau.z, f.x, f.y, f.z))
}

/// `w_b = theta1 q'' + q'^T theta2 q' + theta3` at a fixed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderTerms {
    /// 6 x n.
    pub theta1: DMatrix<f64>,
    /// One n x n matrix per wrench component.
    pub theta2: Vec<DMatrix<f64>>,
    pub theta3: Vector6<f64>,
}

impl SecondOrderTerms {
    pub fn n(&self) -> usize {
        self.theta1.ncols()
    }

    /// `q'^T theta2 q'` as a 6-vector.
    pub fn quadratic(&self, qd: &[f64]) -> Vector6<f64> {
        let v = DVector::from_column_slice(qd);
        Vector6::from_fn(|r, _| v.dot(&(&self.theta2[r] * &v)))
    }

    pub fn linear(&self, qdd: &[f64]) -> Vector6<f64> {
        let v = &self.theta1 * DVector::from_column_slice(qdd);
        Vector6::from_column_slice(v.as_slice())
    }

    pub fn evaluate(&self, qd: &[f64], qdd: &[f64]) -> Vector6<f64> {
        self.linear(qdd) + self.quadratic(qd) + self.theta3
    }
}

pub fn second_order_terms(
    chain: &SerialChain,
    object: &RigidBodyParams,
    q: &[f64],
) -> Result<SecondOrderTerms, DynamicsError> {
    let n = chain.n();
    let st = chain.state(q, &object.grasp)?;
    let (jv, jw) = world_jacobians(chain, &st);
    let (dv, dw) = world_jacobian_derivatives(chain, &st, &jv);
    let rt = rot_t(&st.pose);
    let jt = &rt * &jv;
    let jr = &rt * &jw;
    let ht = to_tensor(&rt, &dv);
    let hr = to_tensor(&rt, &dw);

    let i = DMatrix::from_fn(3, 3, |r, c| object.inertia[(r, c)]);
    let m = object.mass;
    let mut theta1 = DMatrix::zeros(6, n);
    theta1.rows_mut(0, 3).copy_from(&(&i * &jr));
    theta1.rows_mut(3, 3).copy_from(&(&jt * m));

    // gyroscopic term: (J_rot q') x I (J_rot q') = q'^T K_r q'
    let ijr = &i * &jr;
    let col = |mat: &DMatrix<f64>, j: usize| Vector3::new(mat[(0, j)], mat[(1, j)], mat[(2, j)]);
    let mut theta2 = Vec::with_capacity(6);
    for r in 0..3 {
        let mut k = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let iha = i[(r, 0)] * hr[0][(a, b)] + i[(r, 1)] * hr[1][(a, b)] + i[(r, 2)] * hr[2][(a, b)];
                k[(a, b)] = iha + col(&jr, a).cross(&col(&ijr, b))[r];
            }
        }
        theta2.push(k);
    }
    for h in &ht {
        theta2.push(h * m);
    }

    let g_b = st.pose.rotation.inverse() * object.gravity;
    let f = -m * g_b;
    Ok(SecondOrderTerms {
        theta1,
        theta2,
        theta3: Vector6::new(0.0, 0.0, 0.0, f.x, f.y, f.z),
    })
}

/// Fixed polytope `{w_b | F_c G_cb w_b <= g_c}` in the body frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspPolytope {
    /// `F_c G_cb`, rows x 6.
    pub fg: DMatrix<f64>,
    pub g: DVector<f64>,
}

impl GraspPolytope {
    pub fn new(cone: &WrenchCone, g_cb: &SMatrix<f64, 6, 6>) -> Self {
        let (f, g) = cone.inequalities();
        let gcb = DMatrix::from_fn(6, 6, |r, c| g_cb[(r, c)]);
        GraspPolytope { fg: f * gcb, g }
    }

    pub fn nrows(&self) -> usize {
        self.g.len()
    }

    /// `F_c G_cb w - g_c`.
    pub fn residual(&self, w: &Vector6<f64>) -> DVector<f64> {
        &self.fg * DVector::from_column_slice(w.as_slice()) - &self.g
    }

    pub fn violation(&self, w: &Vector6<f64>) -> f64 {
        self.residual(w).max()
    }
}

/// Second-order constraint `F_c G_cb (theta1 q'' + q'^T theta2 q' + theta3) <= g_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderConstraint {
    pub terms: SecondOrderTerms,
    pub set: GraspPolytope,
}

impl SecondOrderConstraint {
    pub fn residual(&self, qd: &[f64], qdd: &[f64]) -> DVector<f64> {
        self.set.residual(&self.terms.evaluate(qd, qdd))
    }

    pub fn max_violation(&self, qd: &[f64], qdd: &[f64]) -> f64 {
        self.residual(qd, qdd).max()
    }

    pub fn is_satisfied(&self, qd: &[f64], qdd: &[f64], tol: f64) -> bool {
        self.max_violation(qd, qdd) <= tol
    }
}

pub fn grasp_constraint(
    terms: SecondOrderTerms,
    cone: &WrenchCone,
    g_cb: &SMatrix<f64, 6, 6>,
) -> SecondOrderConstraint {
    SecondOrderConstraint {
        terms,
        set: GraspPolytope::new(cone, g_cb),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    mass_kg: f64,
    /// ixx, iyy, izz, ixy, ixz, iyz about the COM.
    inertia_kgm2: [f64; 6],
    #[serde(default)]
    grasp: TransformFile,
    #[serde(default = "default_gravity")]
    gravity_mps2: [f64; 3],
}

fn default_gravity() -> [f64; 3] {
    DEFAULT_GRAVITY
}

pub fn parse_object(text: &str) -> Result<RigidBodyParams, DynamicsError> {
    let f: ObjectFile = toml::from_str(text).map_err(|e| DynamicsError::Parse(e.to_string()))?;
    let [xx, yy, zz, xy, xz, yz] = f.inertia_kgm2;
    let inertia = Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz);
    let b = RigidBodyParams {
        mass: f.mass_kg,
        inertia,
        grasp: f.grasp.to_isometry("grasp")?,
        gravity: Vector3::from(f.gravity_mps2),
    };
    b.validate()?;
    Ok(b)
}

pub fn load_object(path: &Path) -> Result<RigidBodyParams, DynamicsError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DynamicsError::Io(format!("{}: {e}", path.display())))?;
    parse_object(&text)
}

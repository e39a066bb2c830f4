use std::path::Path;

use nalgebra::{
    DMatrix, Isometry3, Matrix3, Quaternion, Translation3, Unit, UnitQuaternion, Vector3,
};
use serde::Deserialize;

use super::DynamicsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

/// One joint: a fixed transform from the previous link frame, then a motion
/// along `axis` (expressed in the joint frame).
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub kind: JointKind,
    pub origin: Isometry3<f64>,
    pub axis: Unit<Vector3<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerialChain {
    pub joints: Vec<Joint>,
    /// Last link frame to the cup frame {c}.
    pub tool: Isometry3<f64>,
}

/// World-frame joint origins and axes at a configuration, plus the pose of
/// a frame attached to the last link.
#[derive(Debug, Clone)]
pub(crate) struct ChainState {
    pub origins: Vec<Vector3<f64>>,
    pub axes: Vec<Vector3<f64>>,
    pub pose: Isometry3<f64>,
}

impl SerialChain {
    pub fn new(joints: Vec<Joint>, tool: Isometry3<f64>) -> Result<Self, DynamicsError> {
        if joints.is_empty() {
            return Err(DynamicsError::InvalidModel("chain needs at least one joint".into()));
        }
        Ok(SerialChain { joints, tool })
    }

    pub fn n(&self) -> usize {
        self.joints.len()
    }

    pub(crate) fn check(&self, v: &[f64]) -> Result<(), DynamicsError> {
        if v.len() != self.n() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.n(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Pose of the cup frame {c} in the world.
    pub fn forward_kinematics(&self, q: &[f64]) -> Result<Isometry3<f64>, DynamicsError> {
        Ok(self.state(q, &Isometry3::identity())?.pose)
    }

    /// Joint frames and the pose of `body` (given in {c}).
    pub(crate) fn state(&self, q: &[f64], body: &Isometry3<f64>) -> Result<ChainState, DynamicsError> {
        self.check(q)?;
        let mut t = Isometry3::identity();
        let mut origins = Vec::with_capacity(self.n());
        let mut axes = Vec::with_capacity(self.n());
        for (j, qj) in self.joints.iter().zip(q) {
            t *= j.origin;
            origins.push(t.translation.vector);
            axes.push(t.rotation * j.axis.into_inner());
            t *= joint_motion(j, *qj);
        }
        Ok(ChainState {
            origins,
            axes,
            pose: t * self.tool * body,
        })
    }
}

fn joint_motion(j: &Joint, q: f64) -> Isometry3<f64> {
    match j.kind {
        JointKind::Revolute => Isometry3::from_parts(
            Translation3::identity(),
            UnitQuaternion::from_axis_angle(&j.axis, q),
        ),
        JointKind::Prismatic => Isometry3::from_parts(
            Translation3::from(j.axis.into_inner() * q),
            UnitQuaternion::identity(),
        ),
    }
}

/// World-frame linear and angular Jacobians of the point `p`.
pub(crate) fn world_jacobians(chain: &SerialChain, st: &ChainState) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = chain.n();
    let p = st.pose.translation.vector;
    let mut jv = DMatrix::zeros(3, n);
    let mut jw = DMatrix::zeros(3, n);
    for j in 0..n {
        let z = st.axes[j];
        match chain.joints[j].kind {
            JointKind::Revolute => {
                jv.set_column(j, &z.cross(&(p - st.origins[j])));
                jw.set_column(j, &z);
            }
            JointKind::Prismatic => jv.set_column(j, &z),
        }
    }
    (jv, jw)
}

/// `d Jv / d q_k` and `d Jw / d q_k` for every k (world frame).
pub(crate) fn world_jacobian_derivatives(
    chain: &SerialChain,
    st: &ChainState,
    jv: &DMatrix<f64>,
) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
    let n = chain.n();
    let p = st.pose.translation.vector;
    let col = |m: &DMatrix<f64>, j: usize| Vector3::new(m[(0, j)], m[(1, j)], m[(2, j)]);
    let mut dv = vec![DMatrix::zeros(3, n); n];
    let mut dw = vec![DMatrix::zeros(3, n); n];
    for k in 0..n {
        let zk = st.axes[k];
        let k_rev = chain.joints[k].kind == JointKind::Revolute;
        for j in 0..n {
            let zj = st.axes[j];
            // motion of joint j's axis and origin caused by joint k (only
            // joints earlier in the chain move it)
            let (dz, dorigin) = if k < j {
                if k_rev {
                    (zk.cross(&zj), zk.cross(&(st.origins[j] - st.origins[k])))
                } else {
                    (Vector3::zeros(), zk)
                }
            } else {
                (Vector3::zeros(), Vector3::zeros())
            };
            match chain.joints[j].kind {
                JointKind::Revolute => {
                    let v = dz.cross(&(p - st.origins[j])) + zj.cross(&(col(jv, k) - dorigin));
                    dv[k].set_column(j, &v);
                    dw[k].set_column(j, &dz);
                }
                JointKind::Prismatic => dv[k].set_column(j, &dz),
            }
        }
    }
    (dv, dw)
}

/// Jacobians of the body frame `body` (given in {c}), expressed in that
/// frame: `v_b = J_trans q'`, `w_b = J_rot q'`.
pub fn jacobians_at(
    chain: &SerialChain,
    body: &Isometry3<f64>,
    q: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>), DynamicsError> {
    let st = chain.state(q, body)?;
    let (jv, jw) = world_jacobians(chain, &st);
    let rt = rot_t(&st.pose);
    Ok((&rt * jv, &rt * jw))
}

/// Acceleration tensors in the body frame: `out[r]` is the `n x n` matrix
/// with `a_b[r] = J_trans[r] q'' + q'^T out[r] q'` (and likewise for
/// the rotational part).
pub fn hessians_at(
    chain: &SerialChain,
    body: &Isometry3<f64>,
    q: &[f64],
) -> Result<(Vec<DMatrix<f64>>, Vec<DMatrix<f64>>), DynamicsError> {
    let st = chain.state(q, body)?;
    let (jv, _) = world_jacobians(chain, &st);
    let (dv, dw) = world_jacobian_derivatives(chain, &st, &jv);
    let rt = rot_t(&st.pose);
    Ok((to_tensor(&rt, &dv), to_tensor(&rt, &dw)))
}

pub(crate) fn rot_t(pose: &Isometry3<f64>) -> DMatrix<f64> {
    let r: Matrix3<f64> = pose.rotation.to_rotation_matrix().into_inner().transpose();
    DMatrix::from_fn(3, 3, |i, j| r[(i, j)])
}

/// Rearrange `d[k][:, j]` (derivative of column j along q_k) into
/// per-component matrices `t[r][(j, k)]`, rotated by `rt`.
pub(crate) fn to_tensor(rt: &DMatrix<f64>, d: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let n = d.len();
    let mut t = vec![DMatrix::zeros(n, n); 3];
    for (k, dk) in d.iter().enumerate() {
        let rk = rt * dk;
        for j in 0..n {
            for r in 0..3 {
                t[r][(j, k)] = rk[(r, j)];
            }
        }
    }
    t
}

/// Per-joint kinematic bounds. Position bounds are only used to draw
/// random configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicLimits {
    pub v_max: Vec<f64>,
    pub a_max: Vec<f64>,
    pub q_min: Vec<f64>,
    pub q_max: Vec<f64>,
}

impl KinematicLimits {
    pub fn new(v_max: Vec<f64>, a_max: Vec<f64>) -> Result<Self, DynamicsError> {
        let n = v_max.len();
        let q_min = vec![-std::f64::consts::PI; n];
        let q_max = vec![std::f64::consts::PI; n];
        Self::with_positions(v_max, a_max, q_min, q_max)
    }

    pub fn with_positions(
        v_max: Vec<f64>,
        a_max: Vec<f64>,
        q_min: Vec<f64>,
        q_max: Vec<f64>,
    ) -> Result<Self, DynamicsError> {
        let n = v_max.len();
        for (name, v) in [("a_max", &a_max), ("q_min", &q_min), ("q_max", &q_max)] {
            if v.len() != n {
                return Err(DynamicsError::InvalidModel(format!(
                    "{name} has {} entries, v_max has {n}",
                    v.len()
                )));
            }
        }
        if v_max.iter().chain(&a_max).any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(DynamicsError::InvalidModel("limits must be finite and non-negative".into()));
        }
        if q_min.iter().zip(&q_max).any(|(a, b)| !(a <= b)) {
            return Err(DynamicsError::InvalidModel("q_min must not exceed q_max".into()));
        }
        Ok(KinematicLimits {
            v_max,
            a_max,
            q_min,
            q_max,
        })
    }

    pub fn n(&self) -> usize {
        self.v_max.len()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TransformFile {
    #[serde(default)]
    pub translation: [f64; 3],
    /// Quaternion (w, x, y, z).
    #[serde(default = "unit_quat")]
    pub rotation: [f64; 4],
}

fn unit_quat() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

impl Default for TransformFile {
    fn default() -> Self {
        TransformFile {
            translation: [0.0; 3],
            rotation: unit_quat(),
        }
    }
}

impl TransformFile {
    pub fn to_isometry(&self, what: &str) -> Result<Isometry3<f64>, DynamicsError> {
        let [w, x, y, z] = self.rotation;
        let q = Quaternion::new(w, x, y, z);
        if (q.norm() - 1.0).abs() > 1e-6 {
            return Err(DynamicsError::InvalidModel(format!(
                "{what}: quaternion norm {} is not 1",
                q.norm()
            )));
        }
        Ok(Isometry3::from_parts(
            Translation3::new(self.translation[0], self.translation[1], self.translation[2]),
            UnitQuaternion::from_quaternion(q),
        ))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointFile {
    #[serde(rename = "type")]
    kind: String,
    axis: [f64; 3],
    #[serde(flatten)]
    origin: TransformFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotFile {
    joints: Vec<JointFile>,
    #[serde(default)]
    tool: TransformFile,
}

pub fn parse_robot(text: &str) -> Result<SerialChain, DynamicsError> {
    let f: RobotFile = toml::from_str(text).map_err(|e| DynamicsError::Parse(e.to_string()))?;
    let mut joints = Vec::with_capacity(f.joints.len());
    for (i, j) in f.joints.iter().enumerate() {
        let kind = match j.kind.as_str() {
            "revolute" => JointKind::Revolute,
            "prismatic" => JointKind::Prismatic,
            other => {
                return Err(DynamicsError::InvalidModel(format!("joint {i}: unknown type `{other}`")));
            }
        };
        let axis = Vector3::from(j.axis);
        if axis.norm() < 1e-12 {
            return Err(DynamicsError::InvalidModel(format!("joint {i}: zero axis")));
        }
        joints.push(Joint {
            kind,
            origin: j.origin.to_isometry(&format!("joint {i}"))?,
            axis: Unit::new_normalize(axis),
        });
    }
    SerialChain::new(joints, f.tool.to_isometry("tool")?)
}

pub fn load_robot(path: &Path) -> Result<SerialChain, DynamicsError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DynamicsError::Io(format!("{}: {e}", path.display())))?;
    parse_robot(&text)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    pub fn revolute(t: [f64; 3], axis: [f64; 3]) -> Joint {
        Joint {
            kind: JointKind::Revolute,
            origin: Isometry3::translation(t[0], t[1], t[2]),
            axis: Unit::new_normalize(Vector3::from(axis)),
        }
    }

    fn planar_2r() -> SerialChain {
        SerialChain::new(
            vec![revolute([0.0; 3], [0.0, 0.0, 1.0]), revolute([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])],
            Isometry3::translation(1.0, 0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn home_pose_of_single_joint() {
        let c = SerialChain::new(vec![revolute([0.0; 3], [0.0, 0.0, 1.0])], Isometry3::translation(0.5, 0.0, 0.0))
            .unwrap();
        let p = c.forward_kinematics(&[0.0]).unwrap();
        assert_eq!(p, Isometry3::translation(0.5, 0.0, 0.0));
    }

    #[test]
    fn planar_two_link() {
        let p = planar_2r().forward_kinematics(&[FRAC_PI_2, 0.0]).unwrap();
        assert!((p.translation.vector - Vector3::new(0.0, 2.0, 0.0)).norm() < 1e-15);
        assert!(planar_2r().forward_kinematics(&[0.0]).is_err());
    }

    #[test]
    fn on_axis_point_has_zero_linear_column() {
        let c = SerialChain::new(vec![revolute([0.0; 3], [0.0, 0.0, 1.0])], Isometry3::translation(0.0, 0.0, 0.3))
            .unwrap();
        let (jt, jr) = jacobians_at(&c, &Isometry3::identity(), &[0.7]).unwrap();
        assert!(jt.norm() < 1e-15);
        assert!((jr.column(0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prismatic_has_zero_angular_column() {
        let c = SerialChain::new(
            vec![
                revolute([0.0; 3], [0.0, 0.0, 1.0]),
                Joint {
                    kind: JointKind::Prismatic,
                    origin: Isometry3::translation(0.2, 0.0, 0.0),
                    axis: Vector3::x_axis(),
                },
            ],
            Isometry3::identity(),
        )
        .unwrap();
        let (jt, jr) = jacobians_at(&c, &Isometry3::identity(), &[0.3, 0.1]).unwrap();
        assert!(jr.column(1).norm() < 1e-15);
        assert!((jt.column(1).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn centripetal_term_of_a_spinning_arm() {
        let r = 0.4;
        let c = SerialChain::new(vec![revolute([0.0; 3], [0.0, 0.0, 1.0])], Isometry3::translation(r, 0.0, 0.0))
            .unwrap();
        let (ht, _) = hessians_at(&c, &Isometry3::identity(), &[0.9]).unwrap();
        let qd = 2.5;
        let a: Vec<f64> = ht.iter().map(|h| h[(0, 0)] * qd * qd).collect();
        let mag = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        assert!((mag - r * qd * qd).abs() < 1e-12);
        // pointing back towards the axis: -x in the body frame
        assert!((a[0] + r * qd * qd).abs() < 1e-12);
    }

    #[test]
    fn robot_file() {
        let text = r#"
[[joints]]
type = "revolute"
axis = [0.0, 0.0, 1.0]
translation = [0.0, 0.0, 0.1]

[[joints]]
type = "prismatic"
axis = [1.0, 0.0, 0.0]
rotation = [0.7071067811865476, 0.7071067811865476, 0.0, 0.0]

[tool]
translation = [0.0, 0.0, 0.05]
"#;
        let c = parse_robot(text).unwrap();
        assert_eq!(c.n(), 2);
        let bad = text.replace("0.7071067811865476, 0.7071067811865476", "0.7, 0.7");
        assert!(matches!(parse_robot(&bad), Err(DynamicsError::InvalidModel(_))));
    }

    #[test]
    fn limits_validation() {
        assert!(KinematicLimits::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(KinematicLimits::new(vec![1.0, -2.0], vec![1.0, 1.0]).is_err());
        assert!(KinematicLimits::new(vec![1.0], vec![0.0]).is_ok());
    }

    #[test]
    fn matrix_chain_oracle() {
        // compose 4x4 homogeneous matrices directly
        let c = planar_2r();
        let q = [0.3, -1.1];
        let mut t = nalgebra::Matrix4::identity();
        for (j, qj) in c.joints.iter().zip(q) {
            t *= j.origin.to_homogeneous();
            t *= nalgebra::Rotation3::from_axis_angle(&j.axis, qj).to_homogeneous();
        }
        t *= c.tool.to_homogeneous();
        let fk = c.forward_kinematics(&q).unwrap().to_homogeneous();
        assert!((t - fk).norm() < 1e-14);
        let _ = Matrix3::<f64>::identity();
    }
}

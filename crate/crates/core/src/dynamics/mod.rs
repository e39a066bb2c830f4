//! Serial chain kinematics and the object wrench as a second-order path
//! constraint.

mod body;
mod chain;

pub use body::{
    body_motion, grasp_constraint, load_object, object_wrench, parse_object, second_order_terms,
    GraspPolytope, RigidBodyParams, SecondOrderConstraint, SecondOrderTerms, DEFAULT_GRAVITY,
};
pub use chain::{
    hessians_at, jacobians_at, load_robot, parse_robot, Joint, JointKind, KinematicLimits, SerialChain,
};

use std::f64::consts::PI;

use nalgebra::{Isometry3, Matrix3, Translation3, Unit, UnitQuaternion, Vector3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("expected {expected} joint values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Jacobians of the object frame {b}, expressed in {b}.
pub fn jacobians(
    chain: &SerialChain,
    object: &RigidBodyParams,
    q: &[f64],
) -> Result<(nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>), DynamicsError> {
    jacobians_at(chain, &object.grasp, q)
}

/// Hessian tensors of the object frame {b}; see [`hessians_at`].
pub fn hessians(
    chain: &SerialChain,
    object: &RigidBodyParams,
    q: &[f64],
) -> Result<(Vec<nalgebra::DMatrix<f64>>, Vec<nalgebra::DMatrix<f64>>), DynamicsError> {
    hessians_at(chain, &object.grasp, q)
}

fn rev(t: [f64; 3], axis: Unit<Vector3<f64>>) -> Joint {
    Joint {
        kind: JointKind::Revolute,
        origin: Isometry3::translation(t[0], t[1], t[2]),
        axis,
    }
}

/// Small 6R desk arm with a downward-facing cup at the flange.
pub fn desk_robot() -> SerialChain {
    let (x, y, z) = (Vector3::x_axis(), Vector3::y_axis(), Vector3::z_axis());
    SerialChain {
        joints: vec![
            rev([0.0, 0.0, 0.0], z),
            rev([0.0, 0.0, 0.35], y),
            rev([0.3, 0.0, 0.0], y),
            rev([0.0, 0.0, 0.0], x),
            rev([0.3, 0.0, 0.0], y),
            rev([0.0, 0.0, -0.08], z),
        ],
        tool: Isometry3::from_parts(
            Translation3::new(0.0, 0.0, -0.02),
            UnitQuaternion::from_axis_angle(&Vector3::x_axis(), PI),
        ),
    }
}

/// 0.551 kg notebook held 12.5 mm from its centre of mass.
pub fn notebook() -> RigidBodyParams {
    RigidBodyParams {
        mass: 0.551,
        inertia: Matrix3::from_diagonal(&Vector3::new(9.28e-4, 21.10e-4, 29.80e-4)),
        grasp: Isometry3::translation(0.0, 0.0, 0.0125),
        gravity: Vector3::from(DEFAULT_GRAVITY),
    }
}

/// Joint limits used for the desk arm examples.
pub fn desk_limits() -> KinematicLimits {
    KinematicLimits::new(
        vec![3.0, 3.0, 3.5, 5.0, 5.0, 7.0],
        vec![15.0, 15.0, 15.0, 25.0, 25.0, 30.0],
    )
    .expect("static limits are valid")
}

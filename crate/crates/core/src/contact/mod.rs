//! Suction cup contact model and its grasp wrench set.

mod approx;
mod cone;
mod friction;
mod guide;
mod model;

pub use approx::{approximate_cone, approximate_hull, ApproxHull, ApproxReport, IterationStats};
pub use cone::{
    contact_wrench, exact_wrench_cone, exact_wrench_cone_with, stacked_force_set, suction_wrench,
    wrench_cone_from_contacts, ConeKind, ConeOptions, WrenchCone, WRENCH_UNITS,
};
pub use friction::{linearize_friction_cone, skew, suction_force, wrench_frame_transform, wrench_transform};
pub use guide::{sample_guiding_wrenches, GuidingSampleSet, SampleSource};
pub use model::{load_cup, parse_cup, ContactModel, CupFile, LocalFrame};

use crate::dynamics::DynamicsError;
use crate::polytope::PolytopeError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContactError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rotation is not orthonormal (error {0:.3e})")]
    InvalidRotation(f64),
    #[error("contact force set is empty")]
    EmptySet,
    #[error("wrench set too large: {0}")]
    ScaleError(String),
    #[error("only {0} guiding samples retained, at least 8 needed")]
    TooFewRetained(usize),
    #[error("could not draw a non-degenerate seed simplex")]
    DegenerateSeed,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

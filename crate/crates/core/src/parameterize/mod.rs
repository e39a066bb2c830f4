//! Time-optimal path parameterization by reachability analysis.

mod io;
mod path;
mod seidel;
mod topp;
mod trajectory;

pub use io::{parse_path_file, parse_trajectory_csv, trajectory_header, write_path_file, write_trajectory_csv};
pub use path::{build_path, GeometricPath, PathPoint};
pub use seidel::{seidel_lp, Halfplane, Lp2Solution, LpError, BOX};
pub use topp::{
    controllable_sets, discretize, discretize_grid, profile_duration, solve_topp, uniform_grid,
    DiscretizedConstraints, GraspModel, Parameterization, X_CAP,
};
pub use trajectory::{
    interval_times, retime, sample_trajectory, validate_trajectory, RetimeOptions, Retimed, Trajectory,
    ValidationReport,
};

use crate::dynamics::DynamicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("waypoint {0} repeats the previous one")]
    DuplicateWaypoints(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no feasible velocity at gridpoint {0}")]
    Infeasible(usize),
    #[error("start velocity {x_start} outside the controllable interval [{lo}, {hi}]")]
    BadBoundary { x_start: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

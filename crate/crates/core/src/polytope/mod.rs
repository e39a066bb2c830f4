//! Low-dimensional polyhedral computation: H/V conversion, hulls,
//! membership and redundancy removal.

mod dd;
mod field;
pub mod format;
mod hull;
mod lp;
mod redundancy;
mod rep;
mod triangulate;
mod vertex;

use thiserror::Error;

pub use hull::{convex_hull, convex_hull_with, facet_enumeration, facet_enumeration_with, Hull};
pub use redundancy::{remove_redundancy, remove_redundancy_tol};
pub use rep::{contains, HRep, Polytope, VRep};
pub use triangulate::pulling_simplex_counts;
pub use vertex::{vertex_enumeration, vertex_enumeration_with};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolytopeError {
    #[error("the constraint system is infeasible")]
    EmptySet,
    #[error("the set contains a line; vertex enumeration needs a pointed set")]
    NotPointed,
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("all input points coincide")]
    DegenerateInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row {0} is zero or not finite")]
    InvalidRow(usize),
    #[error("representations disagree")]
    Inconsistent,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Conversion settings shared by vertex and facet enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOptions {
    /// Sign tolerance for classifying a generator against a unit row.
    pub tol: f64,
    /// Run the double-description stage in exact rational arithmetic.
    /// Slow; meant for cross-checking the floating-point path.
    pub exact: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            tol: 1e-9,
            exact: false,
        }
    }
}

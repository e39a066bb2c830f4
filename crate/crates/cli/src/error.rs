use suctopp::contact::ContactError;
use suctopp::dynamics::DynamicsError;
use suctopp::parameterize::ParamError;
use suctopp::polytope::PolytopeError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("io error: {0}")]
    Io(String),
    #[error("trajectory violates the grasp constraint (max violation {0:.3e})")]
    ValidationFailed(f64),
}

fn polytope_code(e: &PolytopeError) -> i32 {
    match e {
        PolytopeError::EmptySet => EXIT_INFEASIBLE,
        PolytopeError::NumericalDegeneracy(_) => EXIT_DEGENERATE,
        _ => EXIT_OTHER,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Param(ParamError::Infeasible(_) | ParamError::BadBoundary { .. }) => EXIT_INFEASIBLE,
            CliError::Contact(ContactError::EmptySet) => EXIT_INFEASIBLE,
            CliError::Contact(ContactError::DegenerateSeed) => EXIT_DEGENERATE,
            CliError::Contact(ContactError::Polytope(p)) | CliError::Polytope(p) => polytope_code(p),
            CliError::ValidationFailed(_) => EXIT_VALIDATION,
            _ => EXIT_OTHER,
        }
    }
}

pub fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

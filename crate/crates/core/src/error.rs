use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure classes, used for CLI exit codes and FFI status codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Precondition,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 1,
            ErrorClass::Precondition => 2,
            ErrorClass::Numerical => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error("invalid-kappa: curvature must be -1 or +1, got {0}")]
    InvalidKappa(String),

    #[error("unsupported-chart: {0}")]
    UnsupportedChart(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("class-violation: {0}")]
    ClassViolation(String),

    #[error("no-solution: {0}")]
    NoSolution(String),

    #[error("axis-singularity: profile evaluated at x = {x:e}")]
    AxisSingularity { x: f64 },

    #[error("step-rejected: local error {estimate:e} per unit arclength at s = {s}")]
    StepRejected { s: f64, estimate: f64 },

    #[error("non-closure: distance to axis {defect:e} at sigma = pi")]
    NonClosure { defect: f64 },

    #[error("vertical-point: graph turns vertical at r = {r_star} (cap depth {cap_depth})")]
    VerticalPoint { r_star: f64, cap_depth: f64 },

    #[error("non-convergence: residual {} after {} iterations", .history.last().copied().unwrap_or(f64::NAN), .history.len())]
    NonConvergence { history: Vec<f64> },

    #[error("residual-exceeded: max residual {max:e} above threshold {threshold:e}")]
    ResidualExceeded { max: f64, threshold: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Usage(_) | Error::Parse(_) | Error::InvalidKappa(_) | Error::UnsupportedChart(_) | Error::Io(_) => {
                ErrorClass::Usage
            }
            Error::Domain(_) | Error::Precondition(_) | Error::ClassViolation(_) | Error::NoSolution(_) => {
                ErrorClass::Precondition
            }
            Error::AxisSingularity { .. }
            | Error::StepRejected { .. }
            | Error::NonClosure { .. }
            | Error::VerticalPoint { .. }
            | Error::NonConvergence { .. }
            | Error::ResidualExceeded { .. } => ErrorClass::Numerical,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fractures {0} and {1} overlap in a two-dimensional region")]
    NonSegmentIntersection(usize, usize),
    #[error("trace assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("point lies {distance:e} off the fracture plane (tolerance {tolerance:e})")]
    OffPlane { distance: f64, tolerance: f64 },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fracture {0} does not intersect the tetrahedral mesh")]
    EmptyInterface(usize),
    #[error("singular operator: {0}")]
    SingularOperator(String),
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("inner solve missed tolerance: relative residual {residual:e} > {tolerance:e}")]
    InnerSolveFailure { residual: f64, tolerance: f64 },
    #[error("non-positive curvature d^T G d = {value:e} at iteration {iteration}")]
    NonPositiveCurvature { iteration: usize, value: f64 },
    #[error("singular matrix in direct solve (column {0})")]
    SingularMatrix(usize),
    #[error("system dimension {dim} exceeds direct-solve cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("network generation failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("{}", config_message(.path, *.line, .field, .message))]
    ConfigParse {
        path: String,
        line: usize,
        field: String,
        message: String,
    },
    #[error("mesh file {path}: {message}")]
    MeshFormat { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn config_message(path: &str, line: usize, field: &str, message: &str) -> String {
    match (line, field.is_empty()) {
        (0, _) => format!("{path}: {message}"),
        (_, true) => format!("{path}:{line}: {message}"),
        _ => format!("{path}:{line}: field `{field}`: {message}"),
    }
}

impl Error {
    /// True for errors caused by the problem description (configuration, geometry,
    /// parameters) rather than by a numerical failure or I/O.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonSegmentIntersection(..)
                | Error::AssumptionViolated(_)
                | Error::OffPlane { .. }
                | Error::InvalidGeometry(_)
                | Error::InvalidParameter(_)
                | Error::EmptyInterface(_)
                | Error::GenerationFailed(_)
                | Error::ConfigParse { .. }
                | Error::MeshFormat { .. }
        )
    }
}

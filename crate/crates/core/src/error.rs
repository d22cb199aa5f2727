//! Crate-wide error type.

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid argument or configuration value.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A text input (edge list, trajectory CSV) could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Scenario document failed schema validation.
    #[error("invalid scenario: {0}")]
    Scenario(String),

    /// A trajectory is too short for the requested embedding.
    #[error("trajectory too short: {actual} samples, need at least {required}")]
    DataLength { required: usize, actual: usize },

    /// The regression data spans a proper subspace; no unique fit exists.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Simulated state grew beyond any reasonable bound.
    #[error("state diverged at step {step} (norm {norm:.3e})")]
    Divergence { step: usize, norm: f64 },

    /// An eigenvalue of the unit matrix A was passed where the spectral map
    /// is undefined.
    #[error("mu = {mu} is an eigenvalue of A; the Laplacian map is undefined there")]
    ExcludedEigenvalue { mu: Complex64 },

    /// Transfer value Cᵀ(A−μI)⁻¹B is zero, so 1/· has no finite value.
    #[error("zero transfer value at mu = {mu}; Laplacian eigenvalue at infinity")]
    PoleAtInfinity { mu: Complex64 },

    /// Fewer than three non-collinear points; no two-dimensional hull exists.
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),

    /// Dense linear algebra failure (eigensolver, SVD, LU).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Numerical(e.to_string())
    }
}

impl Error {
    /// True for errors caused by bad inputs/files rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_)
                | Error::Parse { .. }
                | Error::Scenario(_)
                | Error::DataLength { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

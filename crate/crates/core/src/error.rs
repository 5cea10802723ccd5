use thiserror::Error;

/// Errors raised by the curvature library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector is singular: projection onto factor {factor} is (numerically) zero")]
    SingularVector { factor: usize },

    #[error("map is not positive definite (smallest eigenvalue {min_eigenvalue:e}, largest {max_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("plane is degenerate (relative Gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },

    #[error("t = {t} is outside the admissible interval ({t_min}, {t_max})")]
    HorizonExceeded { t: f64, t_min: f64, t_max: f64 },

    #[error("vectors do not commute (|[X,Y]| = {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("family constraint violated: {0}")]
    FamilyConstraintViolated(String),

    #[error("normal form unavailable: {0}")]
    NormalFormUnavailable(String),
}

pub type Result<T> = std::result::Result<T, CurvatureError>;

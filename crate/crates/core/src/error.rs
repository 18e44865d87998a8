use thiserror::Error;

/// Errors raised by the matrix, form, majorization and trial machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("entry count {got} does not match shape {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        got: usize,
    },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not an isometry (residual {0:e})")]
    NotIsometry(f64),

    #[error("matrix is not idempotent (residual {0:e})")]
    NotIdempotent(f64),

    #[error("matrix is singular or too ill-conditioned (smallest/largest singular value {0:e})")]
    Singular(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconsistent declaration: {0}")]
    InconsistentDeclaration(String),

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("resampling cap of {0} attempts exceeded")]
    ResampleCapExceeded(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

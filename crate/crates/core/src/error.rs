use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{0} did not converge")]
    ConvergenceFailure(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("source operator is not EP")]
    SourceNotEP,
    #[error("source operator is not hypo-EP")]
    SourceNotHypoEP,
    #[error("carrier-restricted solve failed (residual {residual:.3e})")]
    SolveFailure { residual: f64 },
    #[error("range of A is not contained in range of B (residual {residual:.3e})")]
    RangeNotIncluded { residual: f64 },
    #[error("AA* <= BB* fails (min eigenvalue of BB* - AA* is {min_eigenvalue:.3e})")]
    MajorizationFails { min_eigenvalue: f64 },
    #[error("bad operator spec: {0}")]
    BadSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid tolerance: {0}")]
    BadTolerance(String),
}

pub(crate) fn shape_mismatch(what: &str, lhs: (usize, usize), rhs: (usize, usize)) -> Error {
    Error::DimensionMismatch(format!(
        "{what}: {}x{} vs {}x{}",
        lhs.0, lhs.1, rhs.0, rhs.1
    ))
}

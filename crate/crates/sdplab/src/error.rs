use thiserror::Error;

/// Crate-wide error type. Solver runs that fail *numerically* (stalls,
/// iteration limits) are reported through trace status, not through this
/// enum; these variants are for contract violations and hard failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("no admissible step length: {0}")]
    Stall(String),

    #[error("affine constraint system is inconsistent: {0}")]
    InfeasibleAffine(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("inconsistent certificates: {0}")]
    Inconsistency(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

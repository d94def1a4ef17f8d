//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },
    #[error("parity-reduced mapping requires per-spin particle numbers")]
    MissingSector,
    #[error("operator does not preserve the parity sector: {0}")]
    NotSectorPreserving(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("invalid orbital partition: {0}")]
    InvalidPartition(String),
    #[error("CI dimension {dim} exceeds limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("degenerate occupied/virtual gap: denominator {0:.3e}")]
    DegenerateGap(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigensolver failed to converge: {0}")]
    EigsolverFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

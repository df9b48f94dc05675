use alloc::string::String;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("generator is not Hermitian (defect {defect:e} > tolerance {tol:e})")]
    NonHermitian { defect: f64, tol: f64 },
    #[error("dimension {dim} exceeds the configured limit {limit}")]
    Capacity { dim: usize, limit: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("degenerate shadow state: every expectation vanishes")]
    Degenerate,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invariance violated: leakage {leakage:e} exceeds tolerance {tol:e}")]
    Invariance { leakage: f64, tol: f64 },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("coupling restricted to the requested subset is zero")]
    ZeroCoupling,
    #[error("eigensolver failed to converge")]
    NoConvergence,
}

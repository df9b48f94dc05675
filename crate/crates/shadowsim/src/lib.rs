//! Problem files, the `run` driver and the acceptance suite behind the
//! `shadowsim` binary.

pub mod acceptance;
pub mod problem;
pub mod report;
pub mod run;
pub mod times;

use thiserror::Error;

/// Process exit codes. Every refusal path has its own code.
pub mod exit {
    pub const OK: i32 = 0;
    /// Malformed input file or flags.
    pub const SCHEMA: i32 = 1;
    /// Oracle comparison above the verification threshold.
    pub const VERIFY: i32 = 2;
    /// The operator set is not invariant (leakage above `tol`).
    pub const LEAKAGE: i32 = 3;
    pub const NON_HERMITIAN: i32 = 4;
    /// All expectations vanish, or a subset coupling is zero.
    pub const DEGENERATE: i32 = 5;
    /// A dense object would exceed the configured dimension cap.
    pub const CAPACITY: i32 = 6;
    /// Internal consistency check or eigensolver failure.
    pub const INTERNAL: i32 = 7;
    pub const IO: i32 = 8;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] shadowsim_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use shadowsim_core::Error as E;
        match self {
            CliError::Schema(_) => exit::SCHEMA,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                E::Invariance { .. } => exit::LEAKAGE,
                E::NonHermitian { .. } => exit::NON_HERMITIAN,
                E::Degenerate | E::ZeroCoupling => exit::DEGENERATE,
                E::Capacity { .. } => exit::CAPACITY,
                E::Consistency(_) | E::NoConvergence => exit::INTERNAL,
                E::Shape(_) | E::NotSquare { .. } | E::NonFinite | E::Config(_) | E::NotApplicable(_) => exit::SCHEMA,
            },
        }
    }
}

/// Reads `SHADOWSIM_DENSE_CUTOFF` and applies it to the core crate.
pub fn apply_env_cutoff() -> Result<(), CliError> {
    match std::env::var("SHADOWSIM_DENSE_CUTOFF") {
        Ok(v) => {
            let limit: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Schema(format!("SHADOWSIM_DENSE_CUTOFF={v:?} is not a positive integer")))?;
            if limit == 0 {
                return Err(CliError::Schema("SHADOWSIM_DENSE_CUTOFF must be positive".into()));
            }
            shadowsim_core::linalg::set_dense_cutoff(limit);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

//! Complex linear algebra used throughout the crate.
//!
//! Vectors are plain `[C64]` slices. [`DenseMatrix`] is row-major and is meant
//! for oracle-scale work; [`SparseMatrix`] keeps a canonical sorted triplet
//! list and an internal row index for products.

mod dense;
mod eigen;
mod expm;
mod sparse;
mod vector;

use core::sync::atomic::{AtomicUsize, Ordering};

pub use dense::DenseMatrix;
pub use eigen::{eigh, eigvalsh, HermitianEigen};
pub use expm::{dense_expm, expm_action, DEFAULT_EXPM_TOL};
pub use sparse::SparseMatrix;
pub use vector::{axpy, check_finite, inner, kron_vec, max_abs_diff, norm2, normalize, phase_aligned_distance, scale};

/// Default cap on the dimension of dense matrices passed to the
/// eigendecomposition-based routines (12 qubits).
pub const DEFAULT_DENSE_CUTOFF: usize = 4096;

static DENSE_CUTOFF: AtomicUsize = AtomicUsize::new(DEFAULT_DENSE_CUTOFF);

/// Current cap on dense (oracle-scale) dimensions.
pub fn dense_cutoff() -> usize {
    DENSE_CUTOFF.load(Ordering::Relaxed)
}

/// Overrides the dense dimension cap. Intended to be called once at start-up.
pub fn set_dense_cutoff(limit: usize) {
    DENSE_CUTOFF.store(limit.max(1), Ordering::Relaxed);
}

pub(crate) fn ensure_dense_capacity(dim: usize) -> crate::Result<()> {
    let limit = dense_cutoff();
    if dim > limit {
        return Err(crate::Error::Capacity { dim, limit });
    }
    Ok(())
}

//! Shadow Hamiltonian simulation on a classical machine.
//!
//! A *shadow state* of a quantum state `ρ` with respect to an operator set
//! `S = {O_1, …, O_M}` is the unit vector whose amplitudes are proportional to
//! the expectations `tr(ρ O_m)`. When the Hamiltonian `H` maps `span(S)` into
//! itself, `[H, O_m] = -Σ h_{mm'} O_{m'}`, the shadow state evolves under the
//! `M × M` matrix `H_S = (h_{mm'})` instead of the (possibly exponentially
//! larger) physical Hamiltonian.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`linalg`]: complex dense/sparse matrices, Hermitian eigendecomposition,
//!   dense `exp(-itH)` and a Lanczos `exp(-itH) v` kernel.
//! - [`shadow`]: operator sets, shadow states, shadow Hamiltonians built by
//!   trace projection or from Lie-algebra structure constants, evolution and
//!   overlap estimation.
//! - [`oracle`]: a brute-force full-Hilbert-space simulator used as ground truth.
//! - [`fermions`], [`bosons`], [`qubits`]: the free-fermion, coupled-oscillator
//!   and qubit instantiations.
//! - [`correlators`] and [`heisenberg`]: multi-time correlators, Heisenberg
//!   picture operator evolution, transfer matrices and light-cone metrics.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bosons;
pub mod circuit;
pub mod correlators;
mod error;
pub mod fermions;
pub mod heisenberg;
pub mod linalg;
pub mod oracle;
pub mod qubits;
pub mod sampling;
pub mod shadow;
pub mod structure;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Shorthand for the complex number `re + i·im`.
#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

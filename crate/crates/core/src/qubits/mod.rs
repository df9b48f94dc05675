//! Qubit systems: 1-local shadow Hamiltonians, Pauli operator sets and the
//! Bell-basis rotation relating shadow states to `ψ ⊗ ψ̄`.

mod bell;
mod pauli;

pub use bell::{
    bell_rotation, bell_rotation_circuit, conjugate_overlap, heisenberg_weyl_set, heisenberg_weyl_vs,
    incomplete_basis_shadow, orthonormal_basis_vs, swap_test_conjugate_overlap,
};
pub use pauli::{Pauli, PauliString, PauliTermSum};
pub(crate) use pauli::register_dim;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::shadow::{OperatorSet, ShadowHamiltonian, ShadowState};
use crate::{Error, Result, C64};

/// Slot of `σ_q` (`σ ∈ {X, Y, Z}`, `q` 0-based) in the 1-local set `(1, X₁, Y₁, Z₁, X₂, …)`.
pub fn one_local_index(q: usize, p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        _ => 1 + 3 * q + (p.index() - 1),
    }
}

/// The Pauli strings of the 1-local set, in slot order.
pub fn one_local_strings(n: usize) -> Vec<PauliString> {
    let mut out = vec![PauliString::identity(n)];
    for q in 0..n {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            out.push(PauliString::single(n, q, p).expect("qubit in range"));
        }
    }
    out
}

pub fn one_local_labels(n: usize) -> Vec<String> {
    one_local_strings(n).iter().map(PauliString::label).collect()
}

/// Dense 1-local operator set (needs `2^n` within the dense cutoff).
pub fn one_local_operator_set(n: usize) -> Result<OperatorSet> {
    let strings = one_local_strings(n);
    let ops = strings.iter().map(PauliString::to_dense).collect::<Result<Vec<_>>>()?;
    OperatorSet::dense(one_local_labels(n), ops)
}

/// `H_S` of a 1-local Hamiltonian on the `3n+1` element set, assembled from
/// the single-qubit algebra `[σ_a, σ_b] = 2i ε_abc σ_c`. Row sparsity is at most 2.
pub fn one_local_shadow_hamiltonian(h: &PauliTermSum) -> Result<ShadowHamiltonian> {
    if h.locality() > 1 {
        return Err(Error::NotApplicable(format!("Hamiltonian is {}-local, expected 1-local", h.locality())));
    }
    let n = h.n();
    let m = 3 * n + 1;
    let i = C64::new(0.0, 1.0);
    let mut triplets = Vec::new();
    for (string, c) in h.terms() {
        let Some(&q) = string.support().first() else { continue };
        let p = string.get(q);
        for other in [Pauli::X, Pauli::Y, Pauli::Z] {
            let (phase, r) = p.mul(other);
            if r == Pauli::I || p == other {
                continue;
            }
            // σ_p σ_o = i ε σ_r, so [c σ_p, σ_o] = 2 i c ε σ_r and h_or = −2 i c ε
            let eps = (phase / i).re;
            triplets.push((one_local_index(q, other), one_local_index(q, r), C64::new(0.0, -2.0 * c * eps)));
        }
    }
    let hs = SparseMatrix::from_triplets(m, m, triplets)?;
    if hs.max_row_nnz() > 2 {
        return Err(Error::Consistency(format!("1-local H_S has a row with {} entries", hs.max_row_nnz())));
    }
    ShadowHamiltonian::new(hs, 0.0)
}

/// Shadow of `|0…0⟩` on the 1-local set: uniform over `{1, Z₁, …, Z_n}`.
pub fn all_zero_shadow(n: usize) -> Result<ShadowState> {
    let mut e = vec![C64::new(0.0, 0.0); 3 * n + 1];
    e[0] = C64::new(1.0, 0.0);
    for q in 0..n {
        e[one_local_index(q, Pauli::Z)] = C64::new(1.0, 0.0);
    }
    ShadowState::from_expectations(&e)
}

/// `P_ij = X^{i₁}Z^{j₁} ⊗ ⋯ ⊗ X^{i_n}Z^{j_n}` with `i, j` read as `n`-bit
/// integers (qubit 1 most significant). The matrices are real.
pub fn xz_operator(i: usize, j: usize, n: usize) -> Result<DenseMatrix> {
    let dim = register_dim(n)?;
    if i >= dim || j >= dim {
        return Err(Error::Shape(format!("Pauli index ({i}, {j}) outside {n} qubits")));
    }
    let mut m = DenseMatrix::zeros(dim, dim);
    for x in 0..dim {
        let sign = if (j & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(x ^ i, x)] = C64::new(sign, 0.0);
    }
    Ok(m)
}

/// Label `x<bits>z<bits>` of `P_ij`.
pub fn xz_label(i: usize, j: usize, n: usize) -> String {
    let bits = |v: usize| -> String { (0..n).map(|q| if (v >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' }).collect() };
    format!("x{}z{}", bits(i), bits(j))
}

/// The full set `{P_ij}` of `4^n` operators, index `i·2^n + j`.
pub fn full_pauli_set(n: usize) -> Result<OperatorSet> {
    let dim = register_dim(n)?;
    crate::linalg::ensure_dense_capacity(dim * dim)?;
    let mut labels = Vec::with_capacity(dim * dim);
    let mut ops = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            labels.push(xz_label(i, j, n));
            ops.push(xz_operator(i, j, n)?);
        }
    }
    OperatorSet::dense(labels, ops)
}

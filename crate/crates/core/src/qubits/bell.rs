use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;
use rand::Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::linalg::{ensure_dense_capacity, DenseMatrix};
use crate::oracle::PureState;
use crate::sampling;
use crate::shadow::{OperatorSet, ShadowState};
use crate::{Error, Result, C64};

/// `V_S` for an orthogonal basis `{O_m}` of `N × N` matrices with
/// `tr(O_m† O_m') = λ δ_mm'`, defined column-wise by
/// `V_S† |m⟩ = (1 ⊗ Ō_m) Σ_k |k, k⟩ / √λ`, so that `V_S (ψ ⊗ ψ̄)` is the shadow
/// state of a pure `ψ`. Index `m` is read as the basis state `|m⟩` of `ℂ^N ⊗ ℂ^N`.
pub fn orthonormal_basis_vs(ops: &[DenseMatrix], lambda: f64) -> Result<DenseMatrix> {
    let n = ops.first().map(|o| o.rows()).ok_or_else(|| Error::Config("empty basis".into()))?;
    if ops.len() != n * n {
        return Err(Error::Shape(format!("{} operators cannot form a basis of {n}x{n} matrices", ops.len())));
    }
    ensure_dense_capacity(n * n)?;
    let scale = 1.0 / lambda.sqrt();
    let mut vdag = DenseMatrix::zeros(n * n, n * n);
    for (m, op) in ops.iter().enumerate() {
        if op.rows() != n || op.cols() != n {
            return Err(Error::Shape(format!("basis element {m} is {}x{}", op.rows(), op.cols())));
        }
        for k in 0..n {
            for l in 0..n {
                vdag[(k * n + l, m)] = op[(l, k)].conj() * scale;
            }
        }
    }
    let defect = vdag.unitarity_defect()?;
    if defect > 1e-10 {
        return Err(Error::Config(format!("operators are not an orthogonal basis (unitarity defect {defect:e})")));
    }
    Ok(vdag.adjoint())
}

/// `V_S` for the full Pauli set `{P_ij}` on `n` qubits, from its defining equation.
pub fn bell_rotation(n: usize) -> Result<DenseMatrix> {
    let set = super::full_pauli_set(n)?;
    let ops = set.dense_ops().expect("dense set");
    orthonormal_basis_vs(ops, set.lambda().expect("orthogonal set"))
}

/// `V_S` for the full Pauli set as a circuit on registers `A = (0..n)` and
/// `B = (n..2n)`: a CNOT from `A_q` to `B_q` followed by a Hadamard on `A_q`
/// for every pair (which lands on `|j, i⟩`), then a register swap.
pub fn bell_rotation_circuit(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(2 * n);
    for q in 0..n {
        c.push(Gate::cnot(q, n + q)?)?;
        c.push(Gate::h(q))?;
    }
    for q in 0..n {
        c.push(Gate::new(GateKind::Swap, vec![q, n + q])?)?;
    }
    Ok(c)
}

/// `X^a Z^b` on `ℂ^N` with `X|j⟩ = |j+1⟩` and `Z|j⟩ = e^{−2πij/N}|j⟩`,
/// index `a·N + b`.
pub fn heisenberg_weyl_set(dim: usize) -> Result<OperatorSet> {
    if dim == 0 {
        return Err(Error::Config("dimension must be positive".into()));
    }
    ensure_dense_capacity(dim * dim)?;
    let mut labels = Vec::with_capacity(dim * dim);
    let mut ops = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            labels.push(format!("X^{a}Z^{b}"));
            ops.push(DenseMatrix::from_fn(dim, dim, |r, c| {
                if r == (c + a) % dim {
                    C64::from_polar(1.0, -2.0 * PI * (b * c) as f64 / dim as f64)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    OperatorSet::dense(labels, ops)
}

/// `V_S` for [`heisenberg_weyl_set`], built as `SWAP · (F† ⊗ 1) · C†` from the
/// discrete Fourier transform `F` and the conditional shift `C = Σ_j |j⟩⟨j| ⊗ X^j`.
pub fn heisenberg_weyl_vs(dim: usize) -> Result<DenseMatrix> {
    if dim == 0 {
        return Err(Error::Config("dimension must be positive".into()));
    }
    let nn = dim * dim;
    ensure_dense_capacity(nn)?;
    let norm = 1.0 / (dim as f64).sqrt();
    let f_dag = DenseMatrix::from_fn(dim, dim, |r, c| {
        C64::from_polar(norm, -2.0 * PI * ((r * c) % dim) as f64 / dim as f64)
    });
    let c_dag = DenseMatrix::from_fn(nn, nn, |r, c| {
        let (j, k) = (c / dim, c % dim);
        if r == j * dim + (k + dim - j) % dim {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let swap = DenseMatrix::from_fn(nn, nn, |r, c| {
        if r == (c % dim) * dim + c / dim {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    swap.try_matmul(&f_dag.kron(&DenseMatrix::identity(dim)))?.try_matmul(&c_dag)
}

/// Shadow of a pure state on a possibly incomplete orthogonal set, through the
/// rows of `V_S` that belong to the set: `P_S V_S (ψ ⊗ ψ̄)`, normalised.
pub fn incomplete_basis_shadow(psi: &PureState, s: &OperatorSet) -> Result<ShadowState> {
    let (dim, ops) = s.require_dense()?;
    if dim != psi.dim() {
        return Err(Error::Shape(format!("operators on dimension {dim}, state of dimension {}", psi.dim())));
    }
    let lambda = s.lambda().ok_or_else(|| Error::Config("operator set is not orthogonal".into()))?;
    let scale = 1.0 / lambda.sqrt();
    let amp = psi.amplitudes();
    let projected: Vec<C64> = ops
        .iter()
        .map(|op| {
            // ⟨m| V_S |k, l⟩ = O_m[l, k] / √λ against (ψ ⊗ ψ̄)_{kl} = ψ_k ψ̄_l
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                for l in 0..dim {
                    acc += op[(l, k)] * amp[k] * amp[l].conj();
                }
            }
            acc * scale
        })
        .collect();
    ShadowState::from_expectations(&projected)
}

/// `⟨ψ|ψ̄⟩ = Σ_k ψ̄_k²`.
pub fn conjugate_overlap(psi: &PureState) -> C64 {
    psi.amplitudes().iter().map(|z| z.conj() * z.conj()).sum()
}

/// Swap-test estimate of `|⟨ψ|ψ̄⟩|` from one copy of `ψ ⊗ ψ̄` per shot.
pub fn swap_test_conjugate_overlap<R: Rng + ?Sized>(psi: &PureState, shots: u64, rng: &mut R) -> Result<f64> {
    sampling::swap_test(conjugate_overlap(psi).norm(), shots, rng)
}

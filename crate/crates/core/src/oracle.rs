//! Brute-force state-vector and density-matrix simulation.
//!
//! Everything here works on the full Hilbert space and is limited by
//! [`dense_cutoff`](crate::linalg::dense_cutoff). It serves as ground truth
//! for the shadow computations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;

use crate::linalg::{self, dense_expm, ensure_dense_capacity, DenseMatrix, SparseMatrix};
use crate::shadow::{OperatorSet, ShadowState};
use crate::{Error, Result, C64};

/// Above this dimension `evolve_full` switches from a full eigendecomposition
/// to the Lanczos kernel.
const DENSE_EVOLUTION_LIMIT: usize = 256;
const LANCZOS_TOL: f64 = 1e-13;

/// A normalised state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps a vector that already has unit norm (within `1e-12`).
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        linalg::check_finite(&amplitudes)?;
        let norm = linalg::norm2(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("state vector must have unit norm, got {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalises an arbitrary non-zero vector.
    pub fn normalized(amplitudes: &[C64]) -> Result<Self> {
        linalg::check_finite(amplitudes)?;
        let (amplitudes, _) = linalg::normalize(amplitudes).ok_or(Error::Degenerate)?;
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &DenseMatrix) -> Result<C64> {
        let a_psi = op.matvec(&self.amplitudes)?;
        linalg::inner(&self.amplitudes, &a_psi)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        ensure_dense_capacity(self.dim())?;
        Ok(DensityMatrix { m: DenseMatrix::outer(&self.amplitudes, &self.amplitudes) })
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DenseMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace (within `1e-10`) and positivity
    /// (smallest eigenvalue at least `−1e-8`).
    pub fn new(m: DenseMatrix) -> Result<Self> {
        let d = m.require_square()?;
        ensure_dense_capacity(d)?;
        linalg::check_finite(m.data())?;
        let defect = m.hermitian_defect()?;
        if defect > 1e-10 {
            return Err(Error::NonHermitian { defect, tol: 1e-10 });
        }
        let tr = m.trace()?;
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Config(format!("density matrix must have unit trace, got {tr}")));
        }
        let lowest = linalg::eigvalsh(&m)?.first().copied().unwrap_or(0.0);
        if lowest < -1e-8 {
            return Err(Error::Config(format!("density matrix has negative eigenvalue {lowest}")));
        }
        Ok(Self { m })
    }

    /// `1/d` times the identity.
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        ensure_dense_capacity(d)?;
        Ok(Self { m: DenseMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0)) })
    }

    /// Convex combination `Σ p_k ρ_k`. Weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Config("empty mixture".into()))?;
        let d = first.1.dim();
        let mut total = 0.0;
        let mut m = DenseMatrix::zeros(d, d);
        for &(p, rho) in parts {
            if !(p >= 0.0) {
                return Err(Error::Config(format!("mixture weight {p} is negative")));
            }
            total += p;
            m = m.try_add(&rho.m.scale(C64::new(p, 0.0)))?;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("mixture weights sum to {total}")));
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, op: &DenseMatrix) -> Result<C64> {
        // tr(ρA) = Σ_ij ρ_ij A_ji
        let d = self.dim();
        if op.rows() != d || op.cols() != d {
            return Err(Error::Shape(format!("{}x{} operator on a {d}-dimensional state", op.rows(), op.cols())));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.m[(i, j)] * op[(j, i)];
            }
        }
        Ok(acc)
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.m.data().iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Anything whose expectation values can be taken.
pub trait QuantumState {
    fn dim(&self) -> usize;
    fn expectation(&self, op: &DenseMatrix) -> Result<C64>;
}

impl QuantumState for PureState {
    fn dim(&self) -> usize {
        PureState::dim(self)
    }

    fn expectation(&self, op: &DenseMatrix) -> Result<C64> {
        PureState::expectation(self, op)
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn expectation(&self, op: &DenseMatrix) -> Result<C64> {
        DensityMatrix::expectation(self, op)
    }
}

/// `exp(−i t h) |ψ⟩`.
pub fn evolve_full(h: &DenseMatrix, psi: &PureState, t: f64) -> Result<PureState> {
    let d = h.require_square()?;
    ensure_dense_capacity(d)?;
    if d != psi.dim() {
        return Err(Error::Shape(format!("{d}-dimensional Hamiltonian on a {}-dimensional state", psi.dim())));
    }
    let amplitudes = if d <= DENSE_EVOLUTION_LIMIT {
        dense_expm(h, t)?.matvec(psi.amplitudes())?
    } else {
        let defect = h.hermitian_defect()?;
        let tol = 1e-10 * h.max_abs().max(1.0);
        if defect > tol {
            return Err(Error::NonHermitian { defect, tol });
        }
        linalg::expm_action(&SparseMatrix::from_dense(h, 0.0), psi.amplitudes(), t, LANCZOS_TOL.max(defect * 10.0))?
    };
    Ok(PureState { amplitudes })
}

/// `U ρ U†` with `U = exp(−i t h)`.
pub fn evolve_density(h: &DenseMatrix, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let u = dense_expm(h, t)?;
    let m = u.try_matmul(&rho.m)?.try_matmul(&u.adjoint())?;
    Ok(DensityMatrix { m })
}

/// `tr(ρ O_m)` for every member of a dense operator set.
pub fn expectations<S: QuantumState + ?Sized>(rho: &S, s: &OperatorSet) -> Result<Vec<C64>> {
    let (dim, ops) = s.require_dense()?;
    if dim != rho.dim() {
        return Err(Error::Shape(format!("operators on dimension {dim}, state of dimension {}", rho.dim())));
    }
    ops.iter().map(|op| rho.expectation(op)).collect()
}

/// The shadow state of `ρ` with respect to `s`.
pub fn shadow_from_state<S: QuantumState + ?Sized>(rho: &S, s: &OperatorSet) -> Result<ShadowState> {
    ShadowState::from_expectations(&expectations(rho, s)?)
}

/// `vec(ρ)/√tr(ρ²)` with row-major flattening, so that a pure state maps to `ψ ⊗ ψ̄`.
pub fn vec_state(rho: &DensityMatrix) -> Result<Vec<C64>> {
    let purity = rho.purity();
    if !(purity > 0.0) {
        return Err(Error::Degenerate);
    }
    let s = purity.sqrt();
    Ok(rho.m.data().iter().map(|z| z / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use alloc::string::{String, ToString};
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn paulis() -> [DenseMatrix; 4] {
        [
            DenseMatrix::identity(2),
            DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(1.0, 0.0)], [c64(1.0, 0.0), c64(0.0, 0.0)]]),
            DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(0.0, -1.0)], [c64(0.0, 1.0), c64(0.0, 0.0)]]),
            DenseMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]),
        ]
    }

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn evolve_plus_under_z() {
        let plus = PureState::new(vec![c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let [_, _, _, z] = paulis();
        assert_eq!(evolve_full(&z, &plus, 0.0).unwrap(), plus);
        let out = evolve_full(&z, &plus, PI / 4.0).unwrap();
        let expected = [C64::from_polar(FRAC_1_SQRT_2, -PI / 4.0), C64::from_polar(FRAC_1_SQRT_2, PI / 4.0)];
        assert!(linalg::max_abs_diff(out.amplitudes(), &expected) < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let set = OperatorSet::dense(labels(&["1", "X", "Y", "Z"]), paulis().to_vec()).unwrap();
        let zero = PureState::basis(2, 0).unwrap();
        let e = expectations(&zero, &set).unwrap();
        assert_eq!(e, vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let rho = zero.to_density().unwrap();
        assert_eq!(expectations(&rho, &set).unwrap(), e);

        let xyz = OperatorSet::dense(labels(&["X", "Y", "Z"]), paulis()[1..].to_vec()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(expectations(&mixed, &xyz).unwrap().iter().all(|z| z.norm() == 0.0));
        assert_eq!(shadow_from_state(&mixed, &xyz), Err(Error::Degenerate));
    }

    #[test]
    fn density_validation() {
        let not_psd = DenseMatrix::diag(&[c64(1.5, 0.0), c64(-0.5, 0.0)]);
        assert!(DensityMatrix::new(not_psd).is_err());
        let bad_trace = DenseMatrix::diag(&[c64(1.0, 0.0), c64(1.0, 0.0)]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let non_herm = DenseMatrix::from_rows(&[[c64(0.5, 0.0), c64(0.1, 0.0)], [c64(0.0, 0.0), c64(0.5, 0.0)]]);
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn vec_state_examples() {
        let zero = PureState::basis(2, 0).unwrap().to_density().unwrap();
        assert_eq!(vec_state(&zero).unwrap(), vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((mixed.purity().sqrt() - FRAC_1_SQRT_2).abs() < 1e-15);
        let v = vec_state(&mixed).unwrap();
        let expected = [c64(FRAC_1_SQRT_2, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(FRAC_1_SQRT_2, 0.0)];
        assert!(linalg::max_abs_diff(&v, &expected) < 1e-15);

        let psi = PureState::normalized(&[c64(1.0, 2.0), c64(-0.5, 0.3)]).unwrap();
        let conj: Vec<C64> = psi.amplitudes().iter().map(|z| z.conj()).collect();
        let v = vec_state(&psi.to_density().unwrap()).unwrap();
        assert!(linalg::max_abs_diff(&v, &linalg::kron_vec(psi.amplitudes(), &conj)) < 1e-12);
    }
}

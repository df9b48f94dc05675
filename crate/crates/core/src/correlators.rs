//! Multi-time correlators `⟨O_{m₁}(t₁) ⋯ O_{m_q}(t_q)⟩` as shadow states on
//! `q` registers. Each register evolves under its own `exp(−i H_S t_r)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;

use crate::linalg::{self, dense_expm, expm_action, DenseMatrix};
use crate::oracle::QuantumState;
use crate::shadow::{OperatorSet, ShadowHamiltonian, ShadowState};
use crate::{Error, Result, C64};

/// Registers up to this size are propagated with a dense `exp(−i H_S t)`
/// shared by all fibres; larger ones use Lanczos per fibre.
const DENSE_PROPAGATOR_LIMIT: usize = 256;

/// Shadow state over a product of operator sets, flattened row-major
/// (the first register is the slowest index). `times[r]` is the time
/// register `r` has been evolved to.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorState {
    dims: Vec<usize>,
    state: ShadowState,
    times: Vec<f64>,
}

impl CorrelatorState {
    pub fn from_expectations(dims: Vec<usize>, expectations: &[C64]) -> Result<Self> {
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if dims.is_empty() || total != Some(expectations.len()) {
            return Err(Error::Shape(format!("{} correlators for registers {dims:?}", expectations.len())));
        }
        let times = vec![0.0; dims.len()];
        Ok(Self { dims, state: ShadowState::from_expectations(expectations)?, times })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn registers(&self) -> usize {
        self.dims.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self) -> &ShadowState {
        &self.state
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.state.amplitudes()
    }

    pub fn norm_a(&self) -> f64 {
        self.state.norm_a()
    }

    /// `⟨O_{m₁}(t₁) ⋯ O_{m_q}(t_q)⟩` for every index tuple, row-major.
    pub fn expectations(&self) -> Vec<C64> {
        self.state.expectations()
    }

    /// Flat index of a tuple `(m₁, …, m_q)`.
    pub fn index(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.dims.len() {
            return None;
        }
        tuple.iter().zip(&self.dims).try_fold(0usize, |acc, (&m, &d)| (m < d).then_some(acc * d + m))
    }
}

/// `⟨O_m O_m'⟩` over `ρ` for a dense set.
pub fn init_correlator<S: QuantumState + ?Sized>(rho: &S, s: &OperatorSet) -> Result<CorrelatorState> {
    init_multitime(rho, &[s, s])
}

/// `⟨O^{(1)}_{m₁} ⋯ O^{(q)}_{m_q}⟩` over `ρ`; each register may use its own set.
pub fn init_multitime<S: QuantumState + ?Sized>(rho: &S, sets: &[&OperatorSet]) -> Result<CorrelatorState> {
    if sets.is_empty() {
        return Err(Error::Config("need at least one register".into()));
    }
    let dims: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let total = dims.iter().product::<usize>();
    linalg::ensure_dense_capacity(total)?;
    let ops: Vec<&[DenseMatrix]> = sets.iter().map(|s| s.require_dense().map(|(_, o)| o)).collect::<Result<_>>()?;
    // products of the leading registers, built incrementally
    let mut partial: Vec<DenseMatrix> = ops[0].to_vec();
    for reg in &ops[1..] {
        let mut next = Vec::with_capacity(partial.len() * reg.len());
        for a in &partial {
            for b in reg.iter() {
                next.push(a.try_matmul(b)?);
            }
        }
        partial = next;
    }
    let e = partial.iter().map(|p| rho.expectation(p)).collect::<Result<Vec<_>>>()?;
    CorrelatorState::from_expectations(dims, &e)
}

/// Applies `exp(−i H_S t) ⊗ exp(−i H_S t′)` and records the new times.
pub fn evolve_correlator(
    sh: &ShadowHamiltonian,
    cs: &CorrelatorState,
    t: f64,
    t_prime: f64,
    tol: f64,
) -> Result<CorrelatorState> {
    if cs.registers() != 2 {
        return Err(Error::Shape(format!("correlator state has {} registers, expected 2", cs.registers())));
    }
    evolve_multitime(&[sh, sh], cs, &[t, t_prime], tol)
}

/// Evolves register `r` by `exp(−i H_r t_r)`.
pub fn evolve_multitime(
    hams: &[&ShadowHamiltonian],
    cs: &CorrelatorState,
    times: &[f64],
    tol: f64,
) -> Result<CorrelatorState> {
    let q = cs.registers();
    if hams.len() != q || times.len() != q {
        return Err(Error::Shape(format!(
            "{} Hamiltonians and {} times for {q} registers",
            hams.len(),
            times.len()
        )));
    }
    for (r, (h, &d)) in hams.iter().zip(&cs.dims).enumerate() {
        if h.dim() != d {
            return Err(Error::Shape(format!("register {} has dimension {d} but H_S is {}x{}", r + 1, h.dim(), h.dim())));
        }
        let defect = h.hermitian_defect();
        if defect > tol {
            return Err(Error::NonHermitian { defect, tol });
        }
    }
    let mut amps = cs.amplitudes().to_vec();
    for r in 0..q {
        if times[r] != 0.0 {
            apply_on_register(&mut amps, &cs.dims, r, hams[r], times[r], tol)?;
        }
    }
    let new_times = cs.times.iter().zip(times).map(|(a, b)| a + b).collect();
    Ok(CorrelatorState { dims: cs.dims.clone(), state: ShadowState::from_parts(amps, cs.norm_a()), times: new_times })
}

fn apply_on_register(amps: &mut [C64], dims: &[usize], r: usize, h: &ShadowHamiltonian, t: f64, tol: f64) -> Result<()> {
    let d = dims[r];
    let inner: usize = dims[r + 1..].iter().product();
    let outer: usize = dims[..r].iter().product();
    let propagator = if d <= DENSE_PROPAGATOR_LIMIT { Some(dense_expm(&h.hs().to_dense(), t)?) } else { None };
    let mut fibre = vec![C64::new(0.0, 0.0); d];
    for o in 0..outer {
        for i in 0..inner {
            let at = |k: usize| (o * d + k) * inner + i;
            for (k, slot) in fibre.iter_mut().enumerate() {
                *slot = amps[at(k)];
            }
            if fibre.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            let out = match &propagator {
                Some(u) => u.matvec(&fibre)?,
                None => expm_action(h.hs(), &fibre, t, tol.min(1e-12))?,
            };
            for (k, z) in out.into_iter().enumerate() {
                amps[at(k)] = z;
            }
        }
    }
    Ok(())
}

/// Largest deviation from unit norm; evolution is unitary so this stays at rounding level.
pub fn norm_defect(cs: &CorrelatorState) -> f64 {
    (linalg::norm2(cs.amplitudes()) - 1.0).abs()
}

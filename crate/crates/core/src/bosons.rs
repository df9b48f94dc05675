//! Coupled harmonic oscillators.
//!
//! `H = Σ_j P_j²/(2m_j) + κ_jj Q_j²/2 + Σ_{j<k} κ_jk (Q_j − Q_k)²/2` is written
//! as `½ Σ_m O_m²` with `O = Bᵀ Y`, `Y = (P_1, …, P_n, Q_1, …, Q_n)`. With
//! `[Y_a, Y_b] = i Ω_ab`, `Ω = [[0, −1], [1, 0]]`, the linear set `{O_m}` has
//! `H_S = i Bᵀ Ω B`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;
use rand::Rng;

use crate::linalg::{self, ensure_dense_capacity, DenseMatrix, SparseMatrix};
use crate::sampling;
use crate::shadow::{ShadowHamiltonian, ShadowState};
use crate::{Error, Result, C64};

/// Masses and spring constants of an oscillator network.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorNetwork {
    masses: Vec<f64>,
    /// `κ_jk` keyed by `(j, k)` with `j ≤ k`; zero entries are not stored.
    springs: BTreeMap<(usize, usize), f64>,
}

impl OscillatorNetwork {
    /// `springs` holds 0-based `(j, k, κ_jk)`; `(j, k)` and `(k, j)` denote the
    /// same spring and must not both be given with different values.
    pub fn new(masses: Vec<f64>, springs: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let n = masses.len();
        if n == 0 {
            return Err(Error::Config("need at least one oscillator".into()));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::Config(format!("mass {m} is not positive")));
        }
        let mut map = BTreeMap::new();
        for (j, k, kappa) in springs {
            if j >= n || k >= n {
                return Err(Error::Shape(format!("spring ({}, {}) outside {n} oscillators", j + 1, k + 1)));
            }
            if !(kappa.is_finite() && kappa >= 0.0) {
                return Err(Error::Config(format!("spring constant {kappa} is negative")));
            }
            let key = (j.min(k), j.max(k));
            if let Some(&prev) = map.get(&key) {
                if prev != kappa {
                    return Err(Error::Config(format!("spring ({}, {}) given twice with different values", key.0 + 1, key.1 + 1)));
                }
            }
            if kappa > 0.0 {
                map.insert(key, kappa);
            }
        }
        Ok(Self { masses, springs: map })
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `κ_jk` (symmetric, zero when absent).
    pub fn spring(&self, j: usize, k: usize) -> f64 {
        self.springs.get(&(j.min(k), j.max(k))).copied().unwrap_or(0.0)
    }

    /// Non-zero springs as `(j, k, κ)` with `j ≤ k`, diagonal ones included.
    pub fn springs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.springs.iter().map(|(&(j, k), &v)| (j, k, v))
    }

    /// Largest number of off-diagonal springs attached to one oscillator.
    pub fn degree(&self) -> usize {
        let mut deg = vec![0usize; self.n()];
        for (&(j, k), _) in self.springs.iter().filter(|((j, k), _)| j != k) {
            deg[j] += 1;
            deg[k] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Stiffness matrix `K` with `H = ½ pᵀ M⁻¹ p + ½ qᵀ K q`.
    pub fn stiffness(&self) -> DenseMatrix {
        let n = self.n();
        let mut k = DenseMatrix::zeros(n, n);
        for (&(a, b), &kappa) in &self.springs {
            if a == b {
                k[(a, a)] += C64::new(kappa, 0.0);
            } else {
                k[(a, a)] += C64::new(kappa, 0.0);
                k[(b, b)] += C64::new(kappa, 0.0);
                k[(a, b)] -= C64::new(kappa, 0.0);
                k[(b, a)] -= C64::new(kappa, 0.0);
            }
        }
        k
    }

    /// The `2n × 2n` matrix `Γ` with `H = ½ Yᵀ Γ Y`: `diag(1/m) ⊕ K`.
    pub fn gamma(&self) -> DenseMatrix {
        let n = self.n();
        let k = self.stiffness();
        DenseMatrix::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
            (true, true) if a == b => C64::new(1.0 / self.masses[a], 0.0),
            (false, false) => k[(a - n, b - n)],
            _ => C64::new(0.0, 0.0),
        })
    }

    /// Classical energy of a phase-space point.
    pub fn energy(&self, x: &ClassicalPhasePoint) -> Result<f64> {
        self.check_point(x)?;
        let kinetic: f64 = x.p.iter().zip(&self.masses).map(|(p, m)| p * p / (2.0 * m)).sum();
        let potential: f64 = self
            .springs
            .iter()
            .map(|(&(j, k), &kappa)| {
                let d = if j == k { x.q[j] } else { x.q[j] - x.q[k] };
                0.5 * kappa * d * d
            })
            .sum();
        Ok(kinetic + potential)
    }

    fn check_point(&self, x: &ClassicalPhasePoint) -> Result<()> {
        if x.q.len() != self.n() || x.p.len() != self.n() {
            return Err(Error::Shape(format!(
                "phase point of lengths ({}, {}) for {} oscillators",
                x.q.len(),
                x.p.len(),
                self.n()
            )));
        }
        if x.q.iter().chain(&x.p).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

/// Kind of term behind a column of `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermKind {
    /// `P_j / √m_j`
    Kinetic(usize),
    /// `√κ_jj Q_j`
    Diagonal(usize),
    /// `√κ_jk (Q_j − Q_k)`
    Spring(usize, usize),
}

impl TermKind {
    /// Human-readable label with 1-based indices.
    pub fn label(&self) -> String {
        match *self {
            TermKind::Kinetic(j) => format!("kinetic {}", j + 1),
            TermKind::Diagonal(j) => format!("diag {}", j + 1),
            TermKind::Spring(j, k) => format!("spring ({},{})", j + 1, k + 1),
        }
    }
}

/// Real `2n × M` matrix `B` with `Γ = B Bᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedCoupling {
    n: usize,
    b: SparseMatrix,
    terms: Vec<TermKind>,
}

impl FactorizedCoupling {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn terms(&self) -> &[TermKind] {
        &self.terms
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(TermKind::label).collect()
    }

    /// `M`, the number of operators `O_m`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `O = Bᵀ (p, q)` for a classical point.
    pub fn operator_values(&self, x: &ClassicalPhasePoint) -> Result<Vec<C64>> {
        if x.q.len() != self.n || x.p.len() != self.n {
            return Err(Error::Shape(format!("phase point for {} oscillators expected", self.n)));
        }
        let y: Vec<C64> = x.p.iter().chain(&x.q).map(|&v| C64::new(v, 0.0)).collect();
        self.b.transpose().matvec(&y)
    }
}

/// Factorization with columns ordered kinetic, diagonal springs, then
/// off-diagonal springs (lexicographic). Checks `B Bᵀ = Γ`.
pub fn build_b(net: &OscillatorNetwork) -> Result<FactorizedCoupling> {
    let n = net.n();
    let mut terms = Vec::new();
    let mut triplets = Vec::new();
    for (j, m) in net.masses.iter().enumerate() {
        triplets.push((j, terms.len(), C64::new(1.0 / m.sqrt(), 0.0)));
        terms.push(TermKind::Kinetic(j));
    }
    for (&(j, k), &kappa) in net.springs.iter().filter(|((j, k), _)| j == k) {
        debug_assert_eq!(j, k);
        triplets.push((n + j, terms.len(), C64::new(kappa.sqrt(), 0.0)));
        terms.push(TermKind::Diagonal(j));
    }
    for (&(j, k), &kappa) in net.springs.iter().filter(|((j, k), _)| j != k) {
        let s = kappa.sqrt();
        triplets.push((n + j, terms.len(), C64::new(s, 0.0)));
        triplets.push((n + k, terms.len(), C64::new(-s, 0.0)));
        terms.push(TermKind::Spring(j, k));
    }
    let b = SparseMatrix::from_triplets(2 * n, terms.len(), triplets)?;
    let fc = FactorizedCoupling { n, b, terms };
    let defect = factorization_defect(net, &fc)?;
    let scale = net.gamma().max_abs().max(1.0);
    if defect > 1e-10 * scale {
        return Err(Error::Consistency(format!("B Bᵀ differs from Γ by {defect:e}")));
    }
    Ok(fc)
}

/// `max |B Bᵀ − Γ|`, computed row by row without forming `Γ` densely when large.
pub fn factorization_defect(net: &OscillatorNetwork, fc: &FactorizedCoupling) -> Result<f64> {
    let n = net.n();
    let bt = fc.b.transpose();
    let bbt = mul_sparse(&fc.b, &bt)?;
    let mut worst = 0.0f64;
    // Γ entries: 1/m on the P block, K on the Q block
    let mut expected: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (j, m) in net.masses.iter().enumerate() {
        expected.insert((j, j), 1.0 / m);
    }
    for (&(a, b), &kappa) in &net.springs {
        *expected.entry((n + a, n + a)).or_default() += kappa;
        if a != b {
            *expected.entry((n + b, n + b)).or_default() += kappa;
            *expected.entry((n + a, n + b)).or_default() -= kappa;
            *expected.entry((n + b, n + a)).or_default() -= kappa;
        }
    }
    for &(i, j, z) in bbt.triplets() {
        let e = expected.remove(&(i, j)).unwrap_or(0.0);
        worst = worst.max((z - C64::new(e, 0.0)).norm());
    }
    for (_, e) in expected {
        worst = worst.max(e.abs());
    }
    Ok(worst)
}

fn mul_sparse(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!("product of {}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    let mut triplets = Vec::new();
    for &(i, k, x) in a.triplets() {
        for &(_, j, y) in b.row(k) {
            triplets.push((i, j, x * y));
        }
    }
    SparseMatrix::from_triplets(a.rows(), b.cols(), triplets)
}

/// `H_S = i Bᵀ Ω B`; `(Bᵀ Ω B)_{mm'} = Σ_j B_{Q_j m} B_{P_j m'} − B_{P_j m} B_{Q_j m'}`.
pub fn boson_shadow_hamiltonian(fc: &FactorizedCoupling) -> Result<ShadowHamiltonian> {
    let n = fc.n;
    let i = C64::new(0.0, 1.0);
    let mut triplets = Vec::new();
    for j in 0..n {
        for &(_, mp, a) in fc.b.row(j) {
            for &(_, mq, b) in fc.b.row(n + j) {
                if a.im != 0.0 || b.im != 0.0 {
                    return Err(Error::Consistency("B has complex entries".into()));
                }
                triplets.push((mq, mp, i * b * a));
                triplets.push((mp, mq, -i * a * b));
            }
        }
    }
    let m = fc.len();
    let hs = SparseMatrix::from_triplets(m, m, triplets)?;
    ShadowHamiltonian::new(hs, 0.0)
}

/// Classical positions and momenta.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl ClassicalPhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Shape(format!("q has length {}, p has length {}", q.len(), p.len())));
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { q, p })
    }
}

/// Normal modes of a network: mass-weighted coordinates `x = M^{1/2} q`
/// diagonalise `D = M^{−1/2} K M^{−1/2} = V diag(ω²) Vᵀ`.
#[derive(Clone, Debug)]
pub struct NormalModes {
    sqrt_m: Vec<f64>,
    frequencies: Vec<f64>,
    vectors: DenseMatrix,
}

impl NormalModes {
    pub fn new(net: &OscillatorNetwork) -> Result<Self> {
        let n = net.n();
        ensure_dense_capacity(n)?;
        let sqrt_m: Vec<f64> = net.masses.iter().map(|m| m.sqrt()).collect();
        let k = net.stiffness();
        let d = DenseMatrix::from_fn(n, n, |a, b| k[(a, b)] / (sqrt_m[a] * sqrt_m[b]));
        let eig = linalg::eigh(&d)?;
        let scale = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        let frequencies = eig
            .values
            .iter()
            .map(|&w2| if w2.abs() <= 1e-12 * scale { 0.0 } else { w2.max(0.0).sqrt() })
            .collect();
        Ok(Self { sqrt_m, frequencies, vectors: eig.vectors })
    }

    /// Angular frequencies, ascending; zero modes move freely.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn evolve(&self, x0: &ClassicalPhasePoint, t: f64) -> Result<ClassicalPhasePoint> {
        let n = self.sqrt_m.len();
        if x0.q.len() != n || x0.p.len() != n {
            return Err(Error::Shape(format!("phase point for {n} oscillators expected")));
        }
        let v = &self.vectors;
        // mode amplitudes: a = Vᵀ M^{1/2} q, b = Vᵀ M^{−1/2} p (V is real up to column phases)
        let xs: Vec<C64> = (0..n).map(|j| C64::new(self.sqrt_m[j] * x0.q[j], 0.0)).collect();
        let ps: Vec<C64> = (0..n).map(|j| C64::new(x0.p[j] / self.sqrt_m[j], 0.0)).collect();
        let vh = v.adjoint();
        let a = vh.matvec(&xs)?;
        let b = vh.matvec(&ps)?;
        let mut at = vec![C64::new(0.0, 0.0); n];
        let mut bt = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let w = self.frequencies[k];
            if w == 0.0 {
                at[k] = a[k] + b[k] * t;
                bt[k] = b[k];
            } else {
                let (s, c) = (w * t).sin_cos();
                at[k] = a[k] * c + b[k] * (s / w);
                bt[k] = b[k] * c - a[k] * (w * s);
            }
        }
        let xt = v.matvec(&at)?;
        let pt = v.matvec(&bt)?;
        let q = (0..n).map(|j| xt[j].re / self.sqrt_m[j]).collect();
        let p = (0..n).map(|j| pt[j].re * self.sqrt_m[j]).collect();
        ClassicalPhasePoint::new(q, p)
    }
}

/// Exact solution of Hamilton's equations by normal-mode decomposition.
pub fn classical_oracle(net: &OscillatorNetwork, x0: &ClassicalPhasePoint, t: f64) -> Result<ClassicalPhasePoint> {
    net.check_point(x0)?;
    NormalModes::new(net)?.evolve(x0, t)
}

/// Shadow state with the classical values of `O_m` standing in for the
/// expectations; `A = 2E`.
pub fn shadow_from_classical(fc: &FactorizedCoupling, x: &ClassicalPhasePoint) -> Result<ShadowState> {
    ShadowState::from_expectations(&fc.operator_values(x)?)
}

/// Kronecker-sum `H_S ⊗ 1 + 1 ⊗ H_S` for the set `{O_m O_m'}`.
pub fn quadratic_set_hamiltonian(sh: &ShadowHamiltonian) -> Result<ShadowHamiltonian> {
    let m = sh.dim();
    let m2 = m.checked_mul(m).ok_or(Error::Capacity { dim: usize::MAX, limit: linalg::dense_cutoff() })?;
    ensure_dense_capacity(m2)?;
    if sh.hermitian_defect() > 1e-12 * sh.max_abs().max(1.0) {
        return Err(Error::NonHermitian { defect: sh.hermitian_defect(), tol: 1e-12 });
    }
    ShadowHamiltonian::new(sh.hs().kron_sum()?, 0.0)
}

/// Quadratic-set shadow from products of classical values,
/// `⟨O_m O_m'⟩ ≈ O_m O_m'`.
pub fn quadratic_shadow_from_classical(fc: &FactorizedCoupling, x: &ClassicalPhasePoint) -> Result<ShadowState> {
    let o = fc.operator_values(x)?;
    ensure_dense_capacity(o.len() * o.len())?;
    ShadowState::from_expectations(&linalg::kron_vec(&o, &o))
}

/// `⟨H_I⟩ = ½ √(A|I|) Re⟨ψ_I|ρ;S⟩` with `ψ_I = |I|^{−1/2} Σ_{m∈I} |m, m⟩`.
pub fn subset_energy_quadratic(st2: &ShadowState, subset: &[usize]) -> Result<f64> {
    let (prefactor, overlap) = quadratic_overlap(st2, subset)?;
    Ok(prefactor * overlap.re)
}

/// [`subset_energy_quadratic`] with the overlap estimated from `shots` Hadamard-test repetitions.
pub fn subset_energy_quadratic_shots<R: Rng + ?Sized>(st2: &ShadowState, subset: &[usize], shots: u64, rng: &mut R) -> Result<f64> {
    let (prefactor, overlap) = quadratic_overlap(st2, subset)?;
    Ok(prefactor * sampling::hadamard_test(overlap, shots, rng)?.re)
}

/// `(½ √(A|I|), ⟨ψ_I|ρ;S⟩)`.
fn quadratic_overlap(st2: &ShadowState, subset: &[usize]) -> Result<(f64, C64)> {
    let m = integer_sqrt(st2.len())
        .ok_or_else(|| Error::Shape(format!("shadow of length {} is not over a product set", st2.len())))?;
    if subset.is_empty() {
        return Err(Error::Config("subset of terms is empty".into()));
    }
    let mut seen = vec![false; m];
    for &k in subset {
        if k >= m {
            return Err(Error::Shape(format!("term {} outside 1..={m}", k + 1)));
        }
        if core::mem::replace(&mut seen[k], true) {
            return Err(Error::Config(format!("term {} listed twice", k + 1)));
        }
    }
    let size = subset.len() as f64;
    let overlap: C64 = subset.iter().map(|&k| st2.amplitudes()[k * m + k]).sum::<C64>() / size.sqrt();
    Ok((0.5 * (st2.norm_a() * size).sqrt(), overlap))
}

fn integer_sqrt(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

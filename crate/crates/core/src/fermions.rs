//! Free fermions in the Majorana representation.
//!
//! Majorana operators follow the Jordan–Wigner convention
//! `c_{2j−1} = (∏_{i<j} Z_i) X_j`, `c_{2j} = (∏_{i<j} Z_i) Y_j`; in code all
//! indices are 0-based, so `c_0 = X_1`, `c_1 = Y_1`, and so on. The operator set
//! is `S = {c_j c_k}_{j<k}` in lexicographic order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;
use rand::Rng;

use crate::linalg::{self, dense_expm, ensure_dense_capacity, DenseMatrix, SparseMatrix};
use crate::qubits::{register_dim, Pauli, PauliString};
use crate::sampling;
use crate::shadow::{evolve_shadow, OperatorSet, ShadowHamiltonian, ShadowState};
use crate::structure::StructureTable;
use crate::{Error, Result, C64};

/// The vacuum has `⟨c_{2l−1} c_{2l}⟩ = i`. [`vacuum_shadow`] stores the real
/// amplitudes `1/√n`; multiply by this phase to recover the physical expectations.
pub const VACUUM_PHASE: C64 = C64::new(0.0, 1.0);

const HERMITIAN_TOL: f64 = 1e-12;

/// Number of pairs `j < k` among `2n` Majorana operators: `n(2n − 1)`.
pub fn pair_count(n: usize) -> usize {
    n * (2 * n).saturating_sub(1)
}

/// Flat index of the pair `(j, k)`, `j < k < 2n`, in lexicographic order.
pub fn pair_index(n: usize, j: usize, k: usize) -> Option<usize> {
    let big = 2 * n;
    if j >= k || k >= big {
        return None;
    }
    Some(j * (2 * big - j - 1) / 2 + (k - j - 1))
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, m: usize) -> Option<(usize, usize)> {
    let big = 2 * n;
    let mut start = 0;
    for j in 0..big {
        let len = big - 1 - j;
        if m < start + len {
            return Some((j, j + 1 + (m - start)));
        }
        start += len;
    }
    None
}

/// Labels `c1c2, c1c3, …` (1-based).
pub fn pair_labels(n: usize) -> Vec<String> {
    (0..pair_count(n))
        .map(|m| {
            let (j, k) = pair_at(n, m).expect("index in range");
            format!("c{}c{}", j + 1, k + 1)
        })
        .collect()
}

/// The coefficient matrix `Γ` of `H = Σ_jk γ_jk c_j c_k`, kept in canonical
/// form: antisymmetric and purely imaginary, with the scalar part
/// `Σ_j γ_jj` split off into `offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaCoupling {
    n: usize,
    gamma: SparseMatrix,
    offset: f64,
    degree: usize,
}

impl MajoranaCoupling {
    /// From a Hermitian `2n × 2n` matrix. The symmetric real part of the
    /// off-diagonal entries drops out of `H` by `{c_j, c_k} = 2δ_jk`.
    pub fn new(n: usize, gamma: &SparseMatrix) -> Result<Self> {
        check_shape(n, gamma)?;
        let defect = gamma.hermitian_defect()?;
        if defect > HERMITIAN_TOL * gamma.max_abs().max(1.0) {
            return Err(Error::NonHermitian { defect, tol: HERMITIAN_TOL });
        }
        Self::canonicalize(n, gamma)
    }

    /// From 0-based `(j, k, γ_jk)` triplets; repeated entries are summed.
    pub fn from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        Self::new(n, &SparseMatrix::from_triplets(2 * n, 2 * n, entries)?)
    }

    /// From `H = Σ α_jk a†_j a_k + β_jk a_j a_k − β̄_jk a†_j a†_k` with `α` Hermitian.
    pub fn from_creation_annihilation(alpha: &DenseMatrix, beta: &DenseMatrix) -> Result<Self> {
        let n = alpha.require_square()?;
        if beta.rows() != n || beta.cols() != n {
            return Err(Error::Shape(format!("α is {n}x{n} but β is {}x{}", beta.rows(), beta.cols())));
        }
        let defect = alpha.hermitian_defect()?;
        if defect > HERMITIAN_TOL * alpha.max_abs().max(1.0) {
            return Err(Error::NonHermitian { defect, tol: HERMITIAN_TOL });
        }
        // a_j = (c_{2j} + i c_{2j+1}) / 2 (0-based)
        let u = |p: usize| if p % 2 == 0 { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.5) };
        let mut triplets = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let (a, b) = (alpha[(j, k)], beta[(j, k)]);
                for p in [2 * j, 2 * j + 1] {
                    for q in [2 * k, 2 * k + 1] {
                        let coef = a * u(p).conj() * u(q) + b * u(p) * u(q) - b.conj() * u(p).conj() * u(q).conj();
                        triplets.push((p, q, coef));
                    }
                }
            }
        }
        let raw = SparseMatrix::from_triplets(2 * n, 2 * n, triplets)?;
        Self::canonicalize(n, &raw)
    }

    fn canonicalize(n: usize, gamma: &SparseMatrix) -> Result<Self> {
        let mut offset = C64::new(0.0, 0.0);
        let mut triplets = Vec::new();
        for &(j, k, z) in gamma.triplets() {
            if j == k {
                offset += z;
                continue;
            }
            // antisymmetric part (γ − γᵀ)/2
            let anti = (z - gamma.get(k, j)) / 2.0;
            if anti.re.abs() > HERMITIAN_TOL * anti.norm().max(1.0) {
                return Err(Error::NonHermitian { defect: anti.re.abs(), tol: HERMITIAN_TOL });
            }
            if anti.im != 0.0 {
                triplets.push((j, k, C64::new(0.0, anti.im)));
            }
        }
        if offset.im.abs() > HERMITIAN_TOL * offset.norm().max(1.0) {
            return Err(Error::NonHermitian { defect: offset.im.abs(), tol: HERMITIAN_TOL });
        }
        let gamma = SparseMatrix::from_triplets(2 * n, 2 * n, triplets)?;
        let degree = gamma.max_row_nnz();
        Ok(Self { n, gamma, offset: offset.re, degree })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical `Γ` (antisymmetric, purely imaginary).
    pub fn gamma(&self) -> &SparseMatrix {
        &self.gamma
    }

    /// Scalar part `Σ_j γ_jj` removed by canonicalisation.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Largest number of non-zeros in a row of `Γ`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `‖Γ‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.gamma.max_abs()
    }

    /// Whether `H` commutes with the particle number, i.e. every 2×2 mode
    /// block of `Γ` has the form `[[a, b], [−b, a]]`.
    pub fn is_number_conserving(&self, tol: f64) -> bool {
        let g = &self.gamma;
        (0..self.n).all(|j| {
            (0..self.n).all(|k| {
                let (p, q) = (2 * j, 2 * k);
                (g.get(p, q) - g.get(p + 1, q + 1)).norm() <= tol && (g.get(p, q + 1) + g.get(p + 1, q)).norm() <= tol
            })
        })
    }

    /// The one-body matrix `α` of a number-conserving coupling,
    /// `H = Σ α_jk a†_j a_k` up to a constant.
    pub fn one_body_matrix(&self) -> Result<DenseMatrix> {
        if !self.is_number_conserving(1e-12 * self.max_abs().max(1.0)) {
            return Err(Error::NotApplicable("coupling does not conserve particle number".into()));
        }
        let g = &self.gamma;
        Ok(DenseMatrix::from_fn(self.n, self.n, |j, k| {
            let (p, q) = (2 * j, 2 * k);
            C64::new(4.0 * g.get(p, q + 1).im, 4.0 * g.get(p, q).im)
        }))
    }

    /// Structure-constant coefficients `α_m` with `H − offset = i Σ_m α_m c_j c_k`.
    pub fn lie_coefficients(&self) -> Vec<f64> {
        let mut alpha = vec![0.0; pair_count(self.n)];
        for &(j, k, z) in self.gamma.triplets() {
            if j < k {
                alpha[pair_index(self.n, j, k).expect("valid pair")] = 2.0 * z.im;
            }
        }
        alpha
    }
}

fn check_shape(n: usize, gamma: &SparseMatrix) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("need at least one fermionic mode".into()));
    }
    if gamma.rows() != 2 * n || gamma.cols() != 2 * n {
        return Err(Error::Shape(format!("Γ is {}x{}, expected {}x{}", gamma.rows(), gamma.cols(), 2 * n, 2 * n)));
    }
    Ok(())
}

/// Random canonical coupling whose `Γ` has at most `degree` non-zeros per row,
/// with `|γ_jk| ≤ scale`.
pub fn random_coupling<R: Rng + ?Sized>(n: usize, degree: usize, scale: f64, rng: &mut R) -> Result<MajoranaCoupling> {
    let big = 2 * n;
    let mut deg = vec![0usize; big];
    let mut triplets = Vec::new();
    let attempts = big * degree * 4;
    for _ in 0..attempts {
        let j = rng.gen_range(0..big);
        let k = rng.gen_range(0..big);
        if j == k || deg[j] >= degree || deg[k] >= degree {
            continue;
        }
        if triplets.iter().any(|&(a, b, _)| (a, b) == (j, k) || (a, b) == (k, j)) {
            continue;
        }
        let v = rng.gen_range(-scale..scale);
        triplets.push((j, k, C64::new(0.0, v)));
        triplets.push((k, j, C64::new(0.0, -v)));
        deg[j] += 1;
        deg[k] += 1;
    }
    MajoranaCoupling::from_triplets(n, triplets)
}

/// Random number-conserving coupling built from a random Hermitian one-body matrix.
pub fn random_number_conserving<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MajoranaCoupling> {
    let mut alpha = DenseMatrix::zeros(n, n);
    for j in 0..n {
        alpha[(j, j)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for k in 0..j {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            alpha[(j, k)] = z;
            alpha[(k, j)] = z.conj();
        }
    }
    MajoranaCoupling::from_creation_annihilation(&alpha, &DenseMatrix::zeros(n, n))
}

/// `H_S` on the pair set, assembled at the index level from
/// `[H, c_l] = −4 Σ_j γ_lj c_j`:
/// `−[H, c_l c_m] = 4 Σ_j γ_lj c_j c_m + 4 Σ_j γ_mj c_l c_j`.
///
/// Every entry is a single `±4γ`, so the row sparsity is at most `2d` and
/// `‖H_S‖_max ≤ 4‖Γ‖_max`; both are checked.
pub fn fermion_shadow_hamiltonian(g: &MajoranaCoupling) -> Result<ShadowHamiltonian> {
    let n = g.n;
    let m_count = pair_count(n);
    let gamma = &g.gamma;
    let mut triplets = Vec::with_capacity(m_count * 2 * g.degree);
    for row in 0..m_count {
        let (l, m) = pair_at(n, row).expect("index in range");
        for &(_, j, z) in gamma.row(l) {
            if j == m {
                continue;
            }
            let (col, sign) = ordered_pair(n, j, m);
            triplets.push((row, col, z * (4.0 * sign)));
        }
        for &(_, j, z) in gamma.row(m) {
            if j == l {
                continue;
            }
            let (col, sign) = ordered_pair(n, l, j);
            triplets.push((row, col, z * (4.0 * sign)));
        }
    }
    let hs = SparseMatrix::from_triplets(m_count, m_count, triplets)?;
    if hs.max_row_nnz() > 2 * g.degree {
        return Err(Error::Consistency(format!(
            "H_S row sparsity {} exceeds 2d = {}",
            hs.max_row_nnz(),
            2 * g.degree
        )));
    }
    if hs.max_abs() > 4.0 * g.max_abs() * (1.0 + 1e-12) {
        return Err(Error::Consistency(format!(
            "‖H_S‖_max = {} exceeds 4‖Γ‖_max = {}",
            hs.max_abs(),
            4.0 * g.max_abs()
        )));
    }
    ShadowHamiltonian::new(hs, 0.0)
}

/// `c_a c_b = sign · c_min c_max` for `a ≠ b`.
fn ordered_pair(n: usize, a: usize, b: usize) -> (usize, f64) {
    if a < b {
        (pair_index(n, a, b).expect("valid pair"), 1.0)
    } else {
        (pair_index(n, b, a).expect("valid pair"), -1.0)
    }
}

/// Measured size of a fermionic `H_S` next to the coupling it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermionBounds {
    /// `d`: largest number of non-zeros in a row of `Γ`.
    pub degree: usize,
    /// Largest number of non-zeros in a row of `H_S`.
    pub sparsity: usize,
    /// `‖Γ‖_max`.
    pub gamma_max: f64,
    /// `‖H_S‖_max`.
    pub hs_max: f64,
}

impl FermionBounds {
    pub fn measure(g: &MajoranaCoupling, sh: &ShadowHamiltonian) -> Self {
        Self { degree: g.degree(), sparsity: sh.sparsity(), gamma_max: g.max_abs(), hs_max: sh.max_abs() }
    }

    /// `sparsity ≤ 2d`.
    pub fn sparsity_within(&self) -> bool {
        self.sparsity <= 2 * self.degree
    }

    /// `‖H_S‖_max ≤ factor · ‖Γ‖_max` (with a relative slack of `1e-12`).
    pub fn max_within(&self, factor: f64) -> bool {
        self.hs_max <= factor * self.gamma_max * (1.0 + 1e-12)
    }
}

/// Structure constants of the pair basis `O_(j,k) = c_j c_k`:
/// `[c_j c_k, c_l c_m] = 2δ_lk c_j c_m − 2δ_lj c_k c_m + 2δ_mk c_l c_j − 2δ_mj c_l c_k`.
pub fn structure_table(n: usize) -> Result<StructureTable> {
    let m_count = pair_count(n);
    let mut entries = Vec::new();
    for a in 0..m_count {
        let (j, k) = pair_at(n, a).expect("index in range");
        for b in 0..m_count {
            let (l, m) = pair_at(n, b).expect("index in range");
            let terms = [(l == k, 2.0, j, m), (l == j, -2.0, k, m), (m == k, 2.0, l, j), (m == j, -2.0, l, k)];
            for (hit, coef, x, y) in terms {
                // scalar parts (x == y) cancel between the four terms
                if hit && x != y {
                    let (c, sign) = ordered_pair(n, x, y);
                    entries.push((a, b, c, coef * sign));
                }
            }
        }
    }
    StructureTable::new(m_count, entries)
}

/// Vacuum shadow: `1/√n` on the pairs `(2l−1, 2l)`, `A = n`. The global
/// phase is dropped; see [`VACUUM_PHASE`].
pub fn vacuum_shadow(n: usize) -> Result<ShadowState> {
    product_state_shadow(n, &[])
}

/// Shadow of `∏_{j∈I} a†_j |vac⟩`: the vacuum shadow with the sign flipped
/// on the pairs of occupied modes (0-based).
pub fn product_state_shadow(n: usize, occupied: &[usize]) -> Result<ShadowState> {
    if n == 0 {
        return Err(Error::Config("need at least one fermionic mode".into()));
    }
    let mut e = vec![C64::new(0.0, 0.0); pair_count(n)];
    for l in 0..n {
        e[pair_index(n, 2 * l, 2 * l + 1).expect("valid pair")] = C64::new(1.0, 0.0);
    }
    for &j in occupied {
        if j >= n {
            return Err(Error::Shape(format!("mode {} outside 1..={n}", j + 1)));
        }
        e[pair_index(n, 2 * j, 2 * j + 1).expect("valid pair")] = C64::new(-1.0, 0.0);
    }
    ShadowState::from_expectations(&e)
}

/// Jordan–Wigner Pauli strings of `c_0 … c_{2n−1}`.
pub fn majorana_strings(n: usize) -> Vec<PauliString> {
    (0..2 * n)
        .map(|p| {
            let mode = p / 2;
            let mut s = PauliString::identity(n);
            for q in 0..mode {
                s.set(q, Pauli::Z);
            }
            s.set(mode, if p % 2 == 0 { Pauli::X } else { Pauli::Y });
            s
        })
        .collect()
}

/// Dense Majorana matrices on `n` qubits.
pub fn majorana_operators(n: usize) -> Result<Vec<DenseMatrix>> {
    register_dim(n)?;
    majorana_strings(n).iter().map(PauliString::to_dense).collect()
}

/// `c_j c_k` as `phase · P` for a Pauli string `P`.
fn pair_string(strings: &[PauliString], j: usize, k: usize) -> (C64, PauliString) {
    strings[j].mul(&strings[k]).expect("equal lengths")
}

/// Dense pair set `{c_j c_k}_{j<k}` with `λ = 2^n`.
pub fn jw_operator_set(n: usize) -> Result<OperatorSet> {
    register_dim(n)?;
    let strings = majorana_strings(n);
    let ops = (0..pair_count(n))
        .map(|m| {
            let (j, k) = pair_at(n, m).expect("index in range");
            let (phase, p) = pair_string(&strings, j, k);
            Ok(p.to_sparse()?.scale(phase).to_dense())
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorSet::dense(pair_labels(n), ops)
}

/// Dense `H = Σ_jk γ_jk c_j c_k + offset` on `n` qubits.
pub fn jordan_wigner(g: &MajoranaCoupling) -> Result<DenseMatrix> {
    interacting_hamiltonian(g, &[])
}

/// Quartic Majorana term `coeff · c_a c_b c_c c_d` with distinct (0-based) indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticTerm {
    pub modes: [usize; 4],
    pub coeff: f64,
}

/// Dense `H` of a quadratic coupling plus quartic terms. Products of four
/// distinct Majoranas are Hermitian, so real coefficients keep `H` Hermitian.
pub fn interacting_hamiltonian(g: &MajoranaCoupling, quartic: &[QuarticTerm]) -> Result<DenseMatrix> {
    let n = g.n;
    let dim = register_dim(n)?;
    let strings = majorana_strings(n);
    let mut triplets: Vec<(usize, usize, C64)> = (0..dim).map(|x| (x, x, C64::new(g.offset, 0.0))).collect();
    let mut push_string = |coef: C64, p: &PauliString| {
        for x in 0..dim {
            let (y, ph) = p.apply_basis(x);
            triplets.push((y, x, coef * ph));
        }
    };
    for &(j, k, z) in g.gamma.triplets() {
        if j < k {
            // γ_jk c_j c_k + γ_kj c_k c_j = 2 γ_jk c_j c_k
            let (phase, p) = pair_string(&strings, j, k);
            push_string(z * 2.0 * phase, &p);
        }
    }
    for term in quartic {
        let [a, b, c, d] = term.modes;
        let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
        if !distinct || term.modes.iter().any(|&x| x >= 2 * n) {
            return Err(Error::Config(format!("quartic term needs four distinct indices below {}", 2 * n)));
        }
        if !term.coeff.is_finite() {
            return Err(Error::NonFinite);
        }
        let (p1, s1) = pair_string(&strings, a, b);
        let (p2, s2) = pair_string(&strings, c, d);
        let (p3, s) = s1.mul(&s2)?;
        push_string(C64::new(term.coeff, 0.0) * p1 * p2 * p3, &s);
    }
    Ok(SparseMatrix::from_triplets(dim, dim, triplets)?.to_dense())
}

/// Unit target `ψ_J` with amplitudes `conj(2γ_jk)/G` over pairs in `J`, and `G`.
fn subset_target(g: &MajoranaCoupling, subset: &[usize]) -> Result<(Vec<C64>, f64)> {
    if subset.is_empty() {
        return Err(Error::Config("subset of Majorana modes is empty".into()));
    }
    let mut member = vec![false; 2 * g.n];
    for &j in subset {
        if j >= 2 * g.n {
            return Err(Error::Shape(format!("Majorana index {} outside 1..={}", j + 1, 2 * g.n)));
        }
        member[j] = true;
    }
    let mut target = vec![C64::new(0.0, 0.0); pair_count(g.n)];
    for &(j, k, z) in g.gamma.triplets() {
        if j < k && member[j] && member[k] {
            target[pair_index(g.n, j, k).expect("valid pair")] = (z * 2.0).conj();
        }
    }
    let big_g = linalg::norm2(&target);
    if big_g == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    target.iter_mut().for_each(|z| *z /= big_g);
    Ok((target, big_g))
}

/// `⟨H_J⟩ = Σ_{j,k∈J} γ_jk ⟨c_j c_k⟩ = G √A Re⟨ψ_J|ρ;S⟩`.
///
/// Uses the canonical `Γ` (the scalar offset is not included). The global
/// phase of `st` matters here: pass physical expectations, e.g. a vacuum
/// shadow multiplied by [`VACUUM_PHASE`].
pub fn subset_energy(st: &ShadowState, g: &MajoranaCoupling, subset: &[usize]) -> Result<f64> {
    check_pair_state(st, g)?;
    let (target, big_g) = subset_target(g, subset)?;
    let overlap = linalg::inner(&target, st.amplitudes())?;
    Ok(big_g * st.norm_a().sqrt() * overlap.re)
}

/// [`subset_energy`] with the overlap estimated from `shots` Hadamard-test repetitions.
pub fn subset_energy_shots<R: Rng + ?Sized>(
    st: &ShadowState,
    g: &MajoranaCoupling,
    subset: &[usize],
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    check_pair_state(st, g)?;
    let (target, big_g) = subset_target(g, subset)?;
    let overlap = linalg::inner(&target, st.amplitudes())?;
    let estimate = sampling::hadamard_test(overlap, shots, rng)?;
    Ok(big_g * st.norm_a().sqrt() * estimate.re)
}

fn check_pair_state(st: &ShadowState, g: &MajoranaCoupling) -> Result<()> {
    if st.len() != pair_count(g.n) {
        return Err(Error::Shape(format!("shadow of length {} for {} pairs", st.len(), pair_count(g.n))));
    }
    Ok(())
}

/// Majorana `c_p = v_p a†_j + w_p a_j` with `j = p/2`.
fn majorana_vw(p: usize) -> (C64, C64) {
    if p % 2 == 0 {
        (C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    } else {
        (C64::new(0.0, 1.0), C64::new(0.0, -1.0))
    }
}

/// Pair expectations `⟨c_p c_q⟩_{p<q}` of a number-conserving state with
/// one-body density matrix `rdm_jk = ⟨a†_j a_k⟩` (and no pairing).
pub fn pair_expectations_from_rdm(rdm: &DenseMatrix) -> Result<Vec<C64>> {
    let n = rdm.require_square()?;
    let mut e = vec![C64::new(0.0, 0.0); pair_count(n)];
    for (m, slot) in e.iter_mut().enumerate() {
        let (p, q) = pair_at(n, m).expect("index in range");
        let (j, k) = (p / 2, q / 2);
        let (vp, wp) = majorana_vw(p);
        let (vq, wq) = majorana_vw(q);
        let delta = if j == k { 1.0 } else { 0.0 };
        // ⟨a_j a†_k⟩ = δ_jk − ⟨a†_k a_j⟩
        *slot = vp * wq * rdm[(j, k)] + wp * vq * (C64::new(delta, 0.0) - rdm[(k, j)]);
    }
    Ok(e)
}

/// One-body density matrix `⟨a†_j a_k⟩` from pair expectations, using
/// `a_j = (c_{2j} + i c_{2j+1})/2` (0-based) and `c_p² = 1`.
pub fn rdm_from_pair_expectations(n: usize, e: &[C64]) -> Result<DenseMatrix> {
    if e.len() != pair_count(n) {
        return Err(Error::Shape(format!("{} pair expectations for {n} modes", e.len())));
    }
    let cc = |p: usize, q: usize| -> C64 {
        if p == q {
            C64::new(1.0, 0.0)
        } else if p < q {
            e[pair_index(n, p, q).expect("valid pair")]
        } else {
            -e[pair_index(n, q, p).expect("valid pair")]
        }
    };
    let u = |p: usize| if p % 2 == 0 { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.5) };
    Ok(DenseMatrix::from_fn(n, n, |j, k| {
        let mut acc = C64::new(0.0, 0.0);
        for p in [2 * j, 2 * j + 1] {
            for q in [2 * k, 2 * k + 1] {
                acc += u(p).conj() * u(q) * cc(p, q);
            }
        }
        acc
    }))
}

/// Outcome of [`single_particle_crosscheck`].
#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleReport {
    /// `max_jk |⟨a†_j a_k⟩_shadow(t) − ψ̄_j(t) ψ_k(t)|`.
    pub max_error: f64,
    /// First-quantised wavefunction at time `t`.
    pub wavefunction: Vec<C64>,
}

/// Evolves the one-particle state `Σ_k ψ_k a†_k |vac⟩` twice: as an
/// `n`-dimensional wavefunction under the one-body matrix and as a pair-set
/// shadow under `H_S`; compares `⟨a†_j a_k⟩` with `ψ̄_j ψ_k`.
pub fn single_particle_crosscheck(
    g: &MajoranaCoupling,
    psi0: &[C64],
    t: f64,
    tol: f64,
) -> Result<SingleParticleReport> {
    let alpha = g.one_body_matrix()?;
    let n = g.n;
    if psi0.len() != n {
        return Err(Error::Shape(format!("wavefunction of length {} for {n} modes", psi0.len())));
    }
    let (psi0, _) = linalg::normalize(psi0).ok_or(Error::Degenerate)?;
    let psi_t = dense_expm(&alpha, t)?.matvec(&psi0)?;

    let rdm0 = DenseMatrix::from_fn(n, n, |j, k| psi0[j].conj() * psi0[k]);
    let st0 = ShadowState::from_expectations(&pair_expectations_from_rdm(&rdm0)?)?;
    let sh = fermion_shadow_hamiltonian(g)?;
    let st = evolve_shadow(&sh, &st0, t, tol)?;
    let rdm_t = rdm_from_pair_expectations(n, &st.expectations())?;

    let mut max_error = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            max_error = max_error.max((rdm_t[(j, k)] - psi_t[j].conj() * psi_t[k]).norm());
        }
    }
    Ok(SingleParticleReport { max_error, wavefunction: psi_t })
}

/// Sanity check used by tests and the CLI: `{c_j, c_k} = 2δ_jk` on the dense matrices.
pub fn check_anticommutation(n: usize) -> Result<f64> {
    let c = majorana_operators(n)?;
    ensure_dense_capacity(1 << n)?;
    let id = DenseMatrix::identity(1 << n);
    let mut worst = 0.0f64;
    for (j, a) in c.iter().enumerate() {
        for (k, b) in c.iter().enumerate() {
            let ac = DenseMatrix::anticommutator(a, b)?;
            let expected = if j == k { id.scale(C64::new(2.0, 0.0)) } else { DenseMatrix::zeros(1 << n, 1 << n) };
            worst = worst.max(ac.max_abs_diff(&expected));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::linalg::{max_abs_diff, phase_aligned_distance};
    use crate::oracle::{evolve_full, expectations, shadow_from_state, PureState};
    use crate::shadow::build_shadow_hamiltonian_dense;
    use crate::structure::build_from_structure_constants;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hopping_chain(n: usize, hop: f64) -> MajoranaCoupling {
        let mut alpha = DenseMatrix::zeros(n, n);
        for j in 0..n - 1 {
            alpha[(j, j + 1)] = c64(hop, 0.0);
            alpha[(j + 1, j)] = c64(hop, 0.0);
        }
        MajoranaCoupling::from_creation_annihilation(&alpha, &DenseMatrix::zeros(n, n)).unwrap()
    }

    #[test]
    fn pair_bijection() {
        for n in 1..=5 {
            for m in 0..pair_count(n) {
                let (j, k) = pair_at(n, m).unwrap();
                assert_eq!(pair_index(n, j, k), Some(m));
            }
            assert_eq!(pair_at(n, pair_count(n)), None);
        }
        assert_eq!(pair_labels(2), ["c1c2", "c1c3", "c1c4", "c2c3", "c2c4", "c3c4"]);
    }

    #[test]
    fn canonicalisation() {
        // Hermitian input with a real symmetric off-diagonal part and a diagonal
        let g = MajoranaCoupling::from_triplets(
            1,
            [(0, 0, c64(0.5, 0.0)), (0, 1, c64(0.3, 0.25)), (1, 0, c64(0.3, -0.25)), (1, 1, c64(0.5, 0.0))],
        )
        .unwrap();
        assert_eq!(g.gamma().triplets(), &[(0, 1, c64(0.0, 0.25)), (1, 0, c64(0.0, -0.25))]);
        assert_eq!(g.offset(), 1.0);
        let h = jordan_wigner(&g).unwrap();
        // H = 2·(0.25 i)·XY + 1 = −0.5 Z + 1
        let expected = DenseMatrix::diag(&[c64(0.5, 0.0), c64(1.5, 0.0)]);
        assert!(h.max_abs_diff(&expected) < 1e-15);
        assert!(MajoranaCoupling::from_triplets(1, [(0, 1, c64(1.0, 0.0))]).is_err());
    }

    #[test]
    fn single_mode_commutes() {
        let omega = 1.3;
        let g = MajoranaCoupling::from_triplets(1, [(0, 1, c64(0.0, omega / 2.0)), (1, 0, c64(0.0, -omega / 2.0))]).unwrap();
        let sh = fermion_shadow_hamiltonian(&g).unwrap();
        assert_eq!(sh.dim(), 1);
        assert_eq!(sh.hs().nnz(), 0);
    }

    #[test]
    fn zero_coupling() {
        let g = MajoranaCoupling::from_triplets(3, []).unwrap();
        let sh = fermion_shadow_hamiltonian(&g).unwrap();
        assert_eq!(sh.dim(), 15);
        assert_eq!(sh.hs().nnz(), 0);
    }

    #[test]
    fn jordan_wigner_conventions() {
        let c = majorana_operators(1).unwrap();
        assert_eq!(c[0], Pauli::X.matrix());
        assert_eq!(c[1], Pauli::Y.matrix());
        assert!(check_anticommutation(3).unwrap() < 1e-15);
        let c2 = majorana_operators(2).unwrap();
        let ac = DenseMatrix::anticommutator(&c2[0], &c2[2]).unwrap();
        assert_eq!(ac.max_abs(), 0.0);
    }

    #[test]
    fn index_level_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=4 {
            let g = random_coupling(n, 3, 1.0, &mut rng).unwrap();
            let h = jordan_wigner(&g).unwrap();
            assert!(h.hermitian_defect().unwrap() < 1e-12);
            let set = jw_operator_set(n).unwrap();
            assert_eq!(set.lambda(), Some((1 << n) as f64));
            let dense = build_shadow_hamiltonian_dense(&h, &set, 1e-10).unwrap();
            let fast = fermion_shadow_hamiltonian(&g).unwrap();
            assert!(dense.hs().to_dense().max_abs_diff(&fast.hs().to_dense()) < 1e-10, "n = {n}");
            assert!(dense.leakage() < 1e-10);
        }
        let chain = hopping_chain(2, 0.7);
        let dense = build_shadow_hamiltonian_dense(&jordan_wigner(&chain).unwrap(), &jw_operator_set(2).unwrap(), 1e-10);
        assert!(dense.unwrap().hs().to_dense().max_abs_diff(&fermion_shadow_hamiltonian(&chain).unwrap().hs().to_dense()) < 1e-10);
    }

    #[test]
    fn structure_pathway_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = random_coupling(3, 3, 1.0, &mut rng).unwrap();
        let table = structure_table(3).unwrap();
        let via_table = build_from_structure_constants(&table, &g.lie_coefficients()).unwrap();
        let direct = fermion_shadow_hamiltonian(&g).unwrap();
        assert!(via_table.hs().to_dense().max_abs_diff(&direct.hs().to_dense()) < 1e-12);
        // and the table agrees with the one computed from explicit matrices
        let set = jw_operator_set(2).unwrap();
        let from_dense = StructureTable::from_dense_basis(set.dense_ops().unwrap(), 4.0).unwrap();
        assert_eq!(from_dense, structure_table(2).unwrap());
    }

    #[test]
    fn vacuum_and_products_match_oracle() {
        for n in 1..=4 {
            let set = jw_operator_set(n).unwrap();
            let vac = PureState::basis(1 << n, 0).unwrap();
            let oracle = shadow_from_state(&vac, &set).unwrap();
            let built = vacuum_shadow(n).unwrap();
            assert!(phase_aligned_distance(oracle.amplitudes(), built.amplitudes()) < 1e-12);
            let physical = built.clone().with_global_phase(VACUUM_PHASE);
            assert!(max_abs_diff(oracle.amplitudes(), physical.amplitudes()) < 1e-15);
            assert_eq!(oracle.norm_a(), n as f64);
        }
        // mode 1 occupied, n = 2: |10⟩
        let set = jw_operator_set(2).unwrap();
        let occ = PureState::basis(4, 2).unwrap();
        let oracle = shadow_from_state(&occ, &set).unwrap().with_global_phase(VACUUM_PHASE.conj());
        let built = product_state_shadow(2, &[0]).unwrap();
        assert!(max_abs_diff(oracle.amplitudes(), built.amplitudes()) < 1e-15);
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((built.amplitudes()[0] - c64(-r, 0.0)).norm() < 1e-15);
        assert!((built.amplitudes()[5] - c64(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn particle_hole() {
        let full = product_state_shadow(3, &[0, 1, 2]).unwrap();
        let vac = vacuum_shadow(3).unwrap();
        let neg: Vec<C64> = vac.amplitudes().iter().map(|z| -z).collect();
        assert_eq!(full.amplitudes(), neg.as_slice());
        let a = product_state_shadow(3, &[1]).unwrap();
        let b = product_state_shadow(3, &[0, 2]).unwrap();
        let neg_b: Vec<C64> = b.amplitudes().iter().map(|z| -z).collect();
        assert_eq!(a.amplitudes(), neg_b.as_slice());
    }

    #[test]
    fn number_conserving_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_number_conserving(3, &mut rng).unwrap();
        assert!(g.is_number_conserving(1e-12));
        let alpha = g.one_body_matrix().unwrap();
        // Σ α a†a has the same single-particle spectrum as H restricted to one particle
        let h = jordan_wigner(&g).unwrap();
        let one_particle = [4usize, 2, 1];
        let restricted = DenseMatrix::from_fn(3, 3, |j, k| h[(one_particle[j], one_particle[k])]);
        let shift = restricted[(0, 0)] - alpha[(0, 0)];
        let expected = alpha.try_add(&DenseMatrix::identity(3).scale(shift)).unwrap();
        assert!(restricted.max_abs_diff(&expected) < 1e-12);

        let pairing = DenseMatrix::from_fn(2, 2, |j, k| if j != k { c64(if j < k { 0.5 } else { -0.5 }, 0.0) } else { c64(0.0, 0.0) });
        let bcs = MajoranaCoupling::from_creation_annihilation(&DenseMatrix::zeros(2, 2), &pairing).unwrap();
        assert!(!bcs.is_number_conserving(1e-12));
        assert!(matches!(single_particle_crosscheck(&bcs, &[c64(1.0, 0.0), c64(0.0, 0.0)], 1.0, 1e-10), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn rdm_conversions_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let psi: Vec<C64> = (0..3).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let (psi, _) = linalg::normalize(&psi).unwrap();
        // Σ_k ψ_k a†_k |vac⟩ with a†_k flipping qubit k (no sign for a single particle from vacuum)
        let mut full = vec![c64(0.0, 0.0); 8];
        for k in 0..3 {
            full[1 << (2 - k)] = psi[k];
        }
        let state = PureState::new(full).unwrap();
        let oracle = expectations(&state, &jw_operator_set(3).unwrap()).unwrap();
        let rdm = DenseMatrix::from_fn(3, 3, |j, k| psi[j].conj() * psi[k]);
        let analytic = pair_expectations_from_rdm(&rdm).unwrap();
        assert!(max_abs_diff(&oracle, &analytic) < 1e-12);
        let back = rdm_from_pair_expectations(3, &analytic).unwrap();
        assert!(back.max_abs_diff(&rdm) < 1e-12);
    }

    #[test]
    fn single_particle_examples() {
        let chain = hopping_chain(2, 1.0);
        let psi0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        assert!(single_particle_crosscheck(&chain, &psi0, 0.0, 1e-12).unwrap().max_error < 1e-14);
        assert!(single_particle_crosscheck(&chain, &psi0, 1.0, 1e-12).unwrap().max_error < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let g = random_number_conserving(4, &mut rng).unwrap();
        let psi0: Vec<C64> = (0..4).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        assert!(single_particle_crosscheck(&g, &psi0, 2.5, 1e-12).unwrap().max_error < 1e-8);
    }

    #[test]
    fn subset_energy_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 3;
        let g = random_coupling(n, 3, 1.0, &mut rng).unwrap();
        let h = jordan_wigner(&g).unwrap();
        let eig = linalg::eigh(&h).unwrap();
        let ground = PureState::normalized(&eig.vectors.column(0)).unwrap();
        let st = shadow_from_state(&ground, &jw_operator_set(n).unwrap()).unwrap();
        let all: Vec<usize> = (0..2 * n).collect();
        let e = subset_energy(&st, &g, &all).unwrap();
        assert!((e + g.offset() - eig.values[0]).abs() < 1e-8);
        assert!(matches!(subset_energy(&st, &g, &[]), Err(Error::Config(_))));

        // vacuum with diagonal Γ: ⟨H_J⟩ = −Σ_{l∈J} ω_l
        let omegas = [0.4, -1.2, 2.0];
        let diag = MajoranaCoupling::from_triplets(
            3,
            omegas.iter().enumerate().flat_map(|(l, &w)| [(2 * l, 2 * l + 1, c64(0.0, w / 2.0)), (2 * l + 1, 2 * l, c64(0.0, -w / 2.0))]),
        )
        .unwrap();
        let vac = vacuum_shadow(3).unwrap().with_global_phase(VACUUM_PHASE);
        let e = subset_energy(&vac, &diag, &[0, 1, 4, 5]).unwrap();
        assert!((e + omegas[0] + omegas[2]).abs() < 1e-12);
        let oracle = PureState::basis(8, 0).unwrap().expectation(&jordan_wigner(&diag).unwrap()).unwrap();
        assert!((subset_energy(&vac, &diag, &all).unwrap() - oracle.re).abs() < 1e-12);
        assert_eq!(subset_energy(&vac, &diag, &[0, 2]), Err(Error::ZeroCoupling));
    }

    #[test]
    fn vacuum_evolution_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 3;
        let g = random_coupling(n, 2, 1.0, &mut rng).unwrap();
        let sh = fermion_shadow_hamiltonian(&g).unwrap();
        let set = jw_operator_set(n).unwrap();
        let h = jordan_wigner(&g).unwrap();
        let vac = PureState::basis(1 << n, 0).unwrap();
        let st0 = vacuum_shadow(n).unwrap().with_global_phase(VACUUM_PHASE);
        for t in [0.5, 2.0, 10.0] {
            let shadow = evolve_shadow(&sh, &st0, t, 1e-12).unwrap();
            let oracle = shadow_from_state(&evolve_full(&h, &vac, t).unwrap(), &set).unwrap();
            assert!(max_abs_diff(shadow.amplitudes(), oracle.amplitudes()) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn quartic_term_leaks() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = random_coupling(3, 2, 1.0, &mut rng).unwrap();
        let set = jw_operator_set(3).unwrap();
        let free = build_shadow_hamiltonian_dense(&jordan_wigner(&g).unwrap(), &set, 1e-10).unwrap();
        assert!(free.leakage() <= 1e-10);
        let quartic = [QuarticTerm { modes: [0, 1, 2, 3], coeff: 0.5 }];
        let h = interacting_hamiltonian(&g, &quartic).unwrap();
        assert!(h.hermitian_defect().unwrap() < 1e-12);
        let leaky = build_shadow_hamiltonian_dense(&h, &set, 1e-10).unwrap();
        assert!(leaky.leakage() > 0.1);
        assert!(leaky.leakage_flagged());
        assert!(interacting_hamiltonian(&g, &[QuarticTerm { modes: [0, 0, 1, 2], coeff: 1.0 }]).is_err());
    }
}

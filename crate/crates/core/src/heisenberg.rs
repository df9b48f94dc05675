//! Heisenberg-picture evolution of `Z = Σ_m z_m O_m`, continuous and through
//! circuits, plus support and light-cone metrics for Pauli expansions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;
use rand::Rng;

use crate::circuit::{embed_gate, Circuit, Gate, GateKind};
use crate::linalg::{self, expm_action, DenseMatrix};
use crate::qubits::{Pauli, PauliString};
use crate::shadow::{OperatorSet, ShadowHamiltonian};
use crate::{Error, Result, C64};

/// Coefficients below this magnitude count as zero in support metrics.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Pauli coefficients below this magnitude are dropped during circuit evolution.
const PRUNE_BELOW: f64 = 1e-15;

/// Coefficients `z_m` of an operator in a set `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorVector {
    z: Vec<C64>,
}

impl OperatorVector {
    pub fn new(z: Vec<C64>) -> Result<Self> {
        linalg::check_finite(&z)?;
        if z.iter().all(|c| *c == C64::new(0.0, 0.0)) {
            return Err(Error::Degenerate);
        }
        Ok(Self { z })
    }

    /// `O_m` itself.
    pub fn basis(len: usize, m: usize) -> Result<Self> {
        if m >= len {
            return Err(Error::Shape(format!("index {m} outside a set of {len}")));
        }
        let mut z = vec![C64::new(0.0, 0.0); len];
        z[m] = C64::new(1.0, 0.0);
        Ok(Self { z })
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm2(&self.z)
    }

    /// `Σ z_m O_m` as a dense matrix.
    pub fn to_dense(&self, s: &OperatorSet) -> Result<DenseMatrix> {
        let (dim, ops) = s.require_dense()?;
        if ops.len() != self.z.len() {
            return Err(Error::Shape(format!("{} coefficients for a set of {}", self.z.len(), ops.len())));
        }
        let mut out = DenseMatrix::zeros(dim, dim);
        for (c, o) in self.z.iter().zip(ops) {
            if *c != C64::new(0.0, 0.0) {
                out = out.try_add(&o.scale(*c))?;
            }
        }
        Ok(out)
    }
}

/// Expansion coefficients of `X` in an orthogonal dense set and the relative
/// Frobenius norm of the part outside the span.
pub fn expand_in_set(x: &DenseMatrix, s: &OperatorSet) -> Result<(Vec<C64>, f64)> {
    let (_, ops) = s.require_dense()?;
    let lambda = s.lambda().ok_or_else(|| Error::Config("operator set is not orthogonal with a common norm".into()))?;
    let coeffs = ops.iter().map(|o| Ok(DenseMatrix::hs_inner(o, x)? / lambda)).collect::<Result<Vec<_>>>()?;
    let mut residual = x.clone();
    for (c, o) in coeffs.iter().zip(ops) {
        if *c != C64::new(0.0, 0.0) {
            residual = residual.try_sub(&o.scale(*c))?;
        }
    }
    let scale = x.frobenius_norm();
    let leak = if scale == 0.0 { 0.0 } else { residual.frobenius_norm() / scale };
    Ok((coeffs, leak))
}

/// `z(t) = exp(−i t H̄_S) z(0)`, the coefficients of `U†(t) Z U(t)`.
pub fn evolve_operator_continuous(sh: &ShadowHamiltonian, z: &OperatorVector, t: f64, tol: f64) -> Result<OperatorVector> {
    if z.len() != sh.dim() {
        return Err(Error::Shape(format!("{} coefficients for H_S of size {}", z.len(), sh.dim())));
    }
    let defect = sh.hermitian_defect();
    if defect > tol {
        return Err(Error::NonHermitian { defect, tol });
    }
    let out = expm_action(&sh.hs().conj(), &z.z, t, tol.min(1e-12))?;
    Ok(OperatorVector { z: out })
}

/// `G† O_m G = Σ_m' g_{mm'} O_m'` for one gate.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    g: DenseMatrix,
    unitarity_defect: f64,
}

impl TransferMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.g
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    /// Coefficients after conjugating by this gate: `gᵀ z`.
    pub fn apply(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.g.transpose().matvec(z)
    }
}

/// Transfer matrix of a full-register gate on a dense orthogonal set. Fails
/// with an invariance error when some `G† O_m G` leaves `span(S)` by more than `tol`.
pub fn circuit_transfer_matrix(gate: &DenseMatrix, s: &OperatorSet, tol: f64) -> Result<TransferMatrix> {
    let (dim, ops) = s.require_dense()?;
    if gate.rows() != dim || gate.cols() != dim {
        return Err(Error::Shape(format!("gate is {}x{} but operators are {dim}x{dim}", gate.rows(), gate.cols())));
    }
    let gdag = gate.adjoint();
    let m = ops.len();
    let mut g = DenseMatrix::zeros(m, m);
    let mut worst = 0.0f64;
    for (a, o) in ops.iter().enumerate() {
        let conj = gdag.try_matmul(o)?.try_matmul(gate)?;
        let (coeffs, leak) = expand_in_set(&conj, s)?;
        worst = worst.max(leak);
        for (b, c) in coeffs.into_iter().enumerate() {
            g[(a, b)] = c;
        }
    }
    if worst > tol {
        return Err(Error::Invariance { leakage: worst, tol });
    }
    let unitarity_defect = g.unitarity_defect()?;
    Ok(TransferMatrix { g, unitarity_defect })
}

/// Transfer matrices of every gate, embedded in the full register.
pub fn circuit_transfer_matrices(circuit: &Circuit, s: &OperatorSet, tol: f64) -> Result<Vec<TransferMatrix>> {
    circuit.gates().iter().map(|g| circuit_transfer_matrix(&embed_gate(g, circuit.n())?, s, tol)).collect()
}

/// `U† Z U` for `U = G_L ⋯ G_1`: `z ← g_Lᵀ z`, then `g_{L−1}ᵀ`, down to `g_1ᵀ`.
pub fn evolve_operator_circuit(circuit: &Circuit, s: &OperatorSet, z0: &OperatorVector, tol: f64) -> Result<OperatorVector> {
    if z0.len() != s.len() {
        return Err(Error::Shape(format!("{} coefficients for a set of {}", z0.len(), s.len())));
    }
    let mut z = z0.z.clone();
    for tm in circuit_transfer_matrices(circuit, s, tol)?.iter().rev() {
        z = tm.apply(&z)?;
    }
    Ok(OperatorVector { z })
}

/// Sparse Pauli expansion `Σ c_P P`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliOperator {
    n: usize,
    terms: BTreeMap<PauliString, C64>,
}

impl PauliOperator {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (PauliString, C64)>) -> Result<Self> {
        let mut map: BTreeMap<PauliString, C64> = BTreeMap::new();
        for (p, c) in terms {
            if p.n() != n {
                return Err(Error::Shape(format!("string on {} qubits in a {n}-qubit operator", p.n())));
            }
            *map.entry(p).or_default() += c;
        }
        map.retain(|_, c| c.norm() > 0.0);
        Ok(Self { n, terms: map })
    }

    pub fn single(p: PauliString) -> Self {
        let n = p.n();
        let mut terms = BTreeMap::new();
        terms.insert(p, C64::new(1.0, 0.0));
        Self { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> C64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Coefficients over a set whose members are `φ_m P_m`, given as `(φ_m, P_m)`.
    pub fn to_vector(&self, labels: &[(C64, PauliString)]) -> Result<Vec<C64>> {
        let mut hit = 0;
        let z: Vec<C64> = labels
            .iter()
            .map(|(phase, p)| {
                if self.terms.contains_key(p) {
                    hit += 1;
                }
                self.coefficient(p) / phase
            })
            .collect();
        if hit != self.terms.len() {
            return Err(Error::Shape("operator has strings outside the label list".into()));
        }
        Ok(z)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let dim = crate::qubits::register_dim(self.n)?;
        let mut out = DenseMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for x in 0..dim {
                let (y, ph) = p.apply_basis(x);
                out[(y, x)] += *c * ph;
            }
        }
        Ok(out)
    }
}

/// Local transfer table of a `k`-qubit gate on the `4^k` Pauli strings:
/// `table[P] = [(P', g_{PP'})]` for `G† P G = Σ g_{PP'} P'`.
#[derive(Clone, Debug)]
pub struct LocalTransfer {
    k: usize,
    table: Vec<Vec<(usize, C64)>>,
}

impl LocalTransfer {
    pub fn new(gate: &Gate) -> Result<Self> {
        let k = gate.qubits().len();
        let u = gate.matrix();
        let udag = u.adjoint();
        let count = 1usize << (2 * k);
        let basis: Vec<DenseMatrix> = (0..count).map(|a| local_string(k, a).to_dense()).collect::<Result<_>>()?;
        let norm = (1usize << k) as f64;
        let mut table = Vec::with_capacity(count);
        for p in &basis {
            let conj = udag.try_matmul(p)?.try_matmul(u)?;
            let mut row = Vec::new();
            for (b, q) in basis.iter().enumerate() {
                let c = DenseMatrix::hs_inner(q, &conj)? / norm;
                if c.norm() > PRUNE_BELOW {
                    row.push((b, c));
                }
            }
            table.push(row);
        }
        Ok(Self { k, table })
    }

    /// Local `4^k × 4^k` transfer matrix.
    pub fn matrix(&self) -> DenseMatrix {
        let count = self.table.len();
        let mut g = DenseMatrix::zeros(count, count);
        for (a, row) in self.table.iter().enumerate() {
            for &(b, c) in row {
                g[(a, b)] = c;
            }
        }
        g
    }
}

/// `k`-qubit Pauli string with base-4 index `a` (first qubit most significant).
fn local_string(k: usize, a: usize) -> PauliString {
    PauliString::from_ops((0..k).map(|q| Pauli::from_index((a >> (2 * (k - 1 - q))) & 3)).collect())
}

fn local_index(p: &PauliString, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |acc, &q| acc * 4 + p.get(q).index())
}

/// Conjugates every string by the gate using its local table; identity on other qubits.
pub fn conjugate_by_gate(op: &PauliOperator, gate: &Gate, local: &LocalTransfer) -> PauliOperator {
    let qubits = gate.qubits();
    let mut out: BTreeMap<PauliString, C64> = BTreeMap::new();
    for (p, &c) in &op.terms {
        let a = local_index(p, qubits);
        if a == 0 {
            *out.entry(p.clone()).or_default() += c;
            continue;
        }
        for &(b, g) in &local.table[a] {
            let mut q = p.clone();
            let image = local_string(local.k, b);
            for (slot, &qubit) in qubits.iter().enumerate() {
                q.set(qubit, image.get(slot));
            }
            *out.entry(q).or_default() += c * g;
        }
    }
    out.retain(|_, c| c.norm() > PRUNE_BELOW);
    PauliOperator { n: op.n, terms: out }
}

/// `U† Z U` on a Pauli expansion, one gate at a time from the last gate back.
/// Never forms `2^n`-dimensional objects.
pub fn evolve_pauli_circuit(circuit: &Circuit, op: &PauliOperator) -> Result<PauliOperator> {
    if circuit.n() != op.n {
        return Err(Error::Shape(format!("{}-qubit operator through a {}-qubit circuit", op.n, circuit.n())));
    }
    let mut cur = op.clone();
    for gate in circuit.gates().iter().rev() {
        let local = LocalTransfer::new(gate)?;
        cur = conjugate_by_gate(&cur, gate, &local);
    }
    Ok(cur)
}

/// Distribution of `|z_m|²/‖z‖²` over the weight of `P_m`, and the union of
/// qubits carried by strings with `|z_m| > SUPPORT_THRESHOLD`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportHistogram {
    /// `mass[w]` for weights `w = 0..=n`.
    pub mass: Vec<f64>,
    /// Sorted 0-based qubits.
    pub support: Vec<usize>,
}

impl SupportHistogram {
    /// `max_q |q − origin|` over the support; zero when the support is empty.
    pub fn radius(&self, origin: usize) -> usize {
        self.support.iter().map(|&q| q.abs_diff(origin)).max().unwrap_or(0)
    }
}

pub fn support_metric(z: &OperatorVector, labels: &[PauliString]) -> Result<SupportHistogram> {
    if z.len() != labels.len() {
        return Err(Error::Shape(format!("{} coefficients for {} labels", z.len(), labels.len())));
    }
    let n = labels.first().map(PauliString::n).unwrap_or(0);
    if labels.iter().any(|p| p.n() != n) {
        return Err(Error::Shape("labels act on different numbers of qubits".into()));
    }
    histogram(n, labels.iter().zip(z.coefficients()))
}

pub fn pauli_support_metric(op: &PauliOperator) -> Result<SupportHistogram> {
    histogram(op.n, op.terms.iter())
}

fn histogram<'a>(n: usize, terms: impl Iterator<Item = (&'a PauliString, &'a C64)>) -> Result<SupportHistogram> {
    let mut mass = vec![0.0; n + 1];
    let mut touched = vec![false; n];
    let mut total = 0.0;
    for (p, c) in terms {
        let w = c.norm_sqr();
        mass[p.weight()] += w;
        total += w;
        if c.norm() > SUPPORT_THRESHOLD {
            for q in p.support() {
                touched[q] = true;
            }
        }
    }
    if total == 0.0 {
        return Err(Error::Degenerate);
    }
    mass.iter_mut().for_each(|m| *m /= total);
    Ok(SupportHistogram { mass, support: (0..n).filter(|&q| touched[q]).collect() })
}

/// `(φ, P)` with `P_ij = φ P` for the members of `full_pauli_set(n)`, in the
/// same order; `φ = (−i)^{#Y}` since `XZ = −iY`.
pub fn full_pauli_strings(n: usize) -> Vec<(C64, PauliString)> {
    let dim = 1usize << n;
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let ops: Vec<Pauli> = (0..n)
                .map(|q| {
                    let bit = |v: usize| (v >> (n - 1 - q)) & 1 == 1;
                    match (bit(i), bit(j)) {
                        (false, false) => Pauli::I,
                        (true, false) => Pauli::X,
                        (false, true) => Pauli::Z,
                        (true, true) => Pauli::Y,
                    }
                })
                .collect();
            let ys = ops.iter().filter(|&&p| p == Pauli::Y).count();
            let phase = [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)][ys % 4];
            out.push((phase, PauliString::from_ops(ops)));
        }
    }
    out
}

/// Brickwork circuit: each layer puts a random gate from `{H, S, T}` on every
/// qubit, then CZ on the pairs `(q, q+1)` with `q ≡ layer (mod 2)`.
pub fn random_brickwork<R: Rng + ?Sized>(n: usize, depth: usize, clifford_only: bool, rng: &mut R) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    let kinds = if clifford_only { &[GateKind::H, GateKind::S][..] } else { &[GateKind::H, GateKind::S, GateKind::T][..] };
    for layer in 0..depth {
        for q in 0..n {
            let kind = kinds[rng.gen_range(0..kinds.len())].clone();
            c.push(Gate::new(kind, vec![q])?)?;
        }
        let mut q = layer % 2;
        while q + 1 < n {
            c.push(Gate::cz(q, q + 1)?)?;
            q += 2;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::linalg::{dense_expm, max_abs_diff};
    use crate::qubits::{full_pauli_set, one_local_operator_set, one_local_shadow_hamiltonian, PauliTermSum};
    use crate::shadow::build_shadow_hamiltonian_dense;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xyz_set() -> OperatorSet {
        let ops = [Pauli::X, Pauli::Y, Pauli::Z].iter().map(|p| p.matrix()).collect();
        OperatorSet::dense(vec!["X".into(), "Y".into(), "Z".into()], ops).unwrap()
    }

    fn single_gate(kind: GateKind) -> DenseMatrix {
        Gate::new(kind, vec![0]).unwrap().matrix().clone()
    }

    #[test]
    fn continuous_rotation() {
        let h = DenseMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let set = xyz_set();
        let sh = build_shadow_hamiltonian_dense(&h, &set, 1e-12).unwrap();
        let t = 0.37;
        let z = evolve_operator_continuous(&sh, &OperatorVector::basis(3, 0).unwrap(), t, 1e-12).unwrap();
        let expected = [c64((2.0 * t).cos(), 0.0), c64(-(2.0 * t).sin(), 0.0), c64(0.0, 0.0)];
        assert!(max_abs_diff(z.coefficients(), &expected) < 1e-10);
        let u = dense_expm(&h, t).unwrap();
        let oracle = u.adjoint().try_matmul(&Pauli::X.matrix()).unwrap().try_matmul(&u).unwrap();
        let (coeffs, leak) = expand_in_set(&oracle, &set).unwrap();
        assert!(leak < 1e-12);
        assert!(max_abs_diff(z.coefficients(), &coeffs) < 1e-10);
        // Z commutes with H
        let zz = evolve_operator_continuous(&sh, &OperatorVector::basis(3, 2).unwrap(), 5.0, 1e-12).unwrap();
        assert!(max_abs_diff(zz.coefficients(), OperatorVector::basis(3, 2).unwrap().coefficients()) < 1e-14);
    }

    #[test]
    fn continuous_matches_conjugation_on_one_local() {
        let h = PauliTermSum::parse(2, [("X1", 0.4), ("Y1", -0.3), ("Z2", 1.2), ("X2", 0.2)]).unwrap();
        let set = one_local_operator_set(2).unwrap();
        let sh = one_local_shadow_hamiltonian(&h).unwrap();
        let z0 = OperatorVector::new(vec![c64(0.2, 0.0), c64(1.0, 0.5), c64(0.0, 0.0), c64(-0.3, 0.0), c64(0.0, 0.0), c64(0.7, 0.0), c64(0.0, -0.1)]).unwrap();
        let t = 1.9;
        let z = evolve_operator_continuous(&sh, &z0, t, 1e-12).unwrap();
        assert!((z.norm() - z0.norm()).abs() < 1e-9);
        let u = dense_expm(&h.to_dense().unwrap(), t).unwrap();
        let conj = u.adjoint().try_matmul(&z0.to_dense(&set).unwrap()).unwrap().try_matmul(&u).unwrap();
        let (coeffs, _) = expand_in_set(&conj, &set).unwrap();
        assert!(max_abs_diff(z.coefficients(), &coeffs) < 1e-8);
    }

    #[test]
    fn single_qubit_transfer_matrices() {
        let set = xyz_set();
        let id = circuit_transfer_matrix(&DenseMatrix::identity(2), &set, 1e-10).unwrap();
        assert!(id.matrix().max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);

        let h = circuit_transfer_matrix(&single_gate(GateKind::H), &set, 1e-10).unwrap();
        let (o, z) = (c64(1.0, 0.0), c64(0.0, 0.0));
        let expected = DenseMatrix::from_rows(&[[z, z, o], [z, -o, z], [o, z, z]]);
        assert!(h.matrix().max_abs_diff(&expected) < 1e-15);

        let t = circuit_transfer_matrix(&single_gate(GateKind::T), &set, 1e-10).unwrap();
        assert!(t.unitarity_defect() < 1e-12);
        let g = t.matrix();
        assert!((g[(2, 2)] - o).norm() < 1e-15);
        assert!(g[(0, 2)].norm() < 1e-15 && g[(2, 0)].norm() < 1e-15);
        assert!(g[(0, 0)].norm() > 0.5 && g[(0, 1)].norm() > 0.5);

        // a gate that breaks the set (maps X outside {X, Y, Z} after adding nothing): use S on {X, Z}
        let xz = OperatorSet::dense(vec!["X".into(), "Z".into()], vec![Pauli::X.matrix(), Pauli::Z.matrix()]).unwrap();
        assert!(matches!(circuit_transfer_matrix(&single_gate(GateKind::S), &xz, 1e-10), Err(Error::Invariance { .. })));
    }

    #[test]
    fn transfer_composition() {
        let set = full_pauli_set(2).unwrap();
        let a = embed_gate(&Gate::cnot(0, 1).unwrap(), 2).unwrap();
        let b = embed_gate(&Gate::new(GateKind::T, vec![1]).unwrap(), 2).unwrap();
        let ga = circuit_transfer_matrix(&a, &set, 1e-10).unwrap();
        let gb = circuit_transfer_matrix(&b, &set, 1e-10).unwrap();
        // A then B is the unitary BA, whose transfer matrix is g(B) g(A)
        let gba = circuit_transfer_matrix(&b.try_matmul(&a).unwrap(), &set, 1e-10).unwrap();
        let product = gb.matrix().try_matmul(ga.matrix()).unwrap();
        assert!(gba.matrix().max_abs_diff(&product) < 1e-10);
        assert!(ga.unitarity_defect() < 1e-10 && gb.unitarity_defect() < 1e-10);
    }

    #[test]
    fn circuit_paths_agree_with_dense_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 3;
        let circuit = random_brickwork(n, 3, false, &mut rng).unwrap();
        let set = full_pauli_set(n).unwrap();
        let strings = full_pauli_strings(n);
        let start = PauliString::parse("X1Z2", n).unwrap();
        let m = strings.iter().position(|(_, p)| *p == start).unwrap();
        let z0 = OperatorVector::basis(set.len(), m).unwrap();
        let via_set = evolve_operator_circuit(&circuit, &set, &z0, 1e-10).unwrap();
        let via_pauli = evolve_pauli_circuit(&circuit, &PauliOperator::single(start.clone())).unwrap();
        let u = circuit.unitary().unwrap();
        let conj = u.adjoint().try_matmul(&start.to_dense().unwrap()).unwrap().try_matmul(&u).unwrap();
        let (oracle, _) = expand_in_set(&conj, &set).unwrap();
        assert!(max_abs_diff(via_set.coefficients(), &oracle) < 1e-8);
        assert!(max_abs_diff(&via_pauli.to_vector(&strings).unwrap(), &oracle) < 1e-8);
        assert!(evolve_operator_circuit(&Circuit::new(n), &set, &z0, 1e-10).unwrap() == z0);
    }

    #[test]
    fn labels_match_full_set() {
        let set = full_pauli_set(2).unwrap();
        for ((phase, p), o) in full_pauli_strings(2).iter().zip(set.dense_ops().unwrap()) {
            assert_eq!(&p.to_dense().unwrap().scale(*phase), o, "{p}");
        }
    }

    #[test]
    fn clifford_maps_pauli_to_pauli() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::new(GateKind::S, vec![0]).unwrap()).unwrap();
        // (SH)† X (SH) = H S† X S H = −H Y H = Y
        let out = evolve_pauli_circuit(&c, &PauliOperator::single(PauliString::parse("X1", 1).unwrap())).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.coefficient(&PauliString::parse("Y1", 1).unwrap()) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn cz_spreads_support() {
        let mut c = Circuit::new(3);
        c.push(Gate::cz(0, 1).unwrap()).unwrap();
        let out = evolve_pauli_circuit(&c, &PauliOperator::single(PauliString::parse("X1", 3).unwrap())).unwrap();
        let hist = pauli_support_metric(&out).unwrap();
        assert_eq!(hist.support, [0, 1]);
        assert_eq!(hist.mass, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(hist.radius(0), 1);

        let x1 = OperatorVector::basis(3, 0).unwrap();
        let labels = ["X1", "Y1", "Z1"].map(|l| PauliString::parse(l, 1).unwrap());
        let h = support_metric(&x1, &labels).unwrap();
        assert_eq!(h.mass, [0.0, 1.0]);
        assert!(support_metric(&x1, &labels[..2]).is_err());
    }

    #[test]
    fn light_cone_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for depth in 1..=4 {
            let c = random_brickwork(6, depth, false, &mut rng).unwrap();
            let start = PauliString::single(6, 2, Pauli::Z).unwrap();
            let out = evolve_pauli_circuit(&c, &PauliOperator::single(start)).unwrap();
            assert!(pauli_support_metric(&out).unwrap().radius(2) <= depth);
        }
    }
}

//! Operator sets, shadow states and shadow Hamiltonians.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;
use rand::Rng;

use crate::linalg::{self, DenseMatrix, SparseMatrix};
use crate::sampling;
use crate::structure::StructureTable;
use crate::{Error, Result, C64};

/// Expectation vectors with `Σ|⟨O_m⟩|²` at or below this are treated as all-zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-24;

/// Tolerance used when detecting the orthogonality constant of a dense set.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// How the members of an [`OperatorSet`] are represented.
#[derive(Clone, Debug)]
pub enum Representation {
    /// Explicit matrices on a `dim`-dimensional Hilbert space.
    Dense { dim: usize, ops: Vec<DenseMatrix> },
    /// An abstract indexed family closed under commutators.
    Abstract(StructureTable),
}

/// An ordered, labelled set `S = {O_1, …, O_M}`.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    labels: Vec<String>,
    repr: Representation,
    lambda: Option<f64>,
}

impl OperatorSet {
    /// Dense operator set. The orthogonality constant `λ` with
    /// `tr(O_m† O_m') = λ δ_mm'` is detected from the Gram matrix and left
    /// unknown when the set is not orthogonal with a common norm.
    pub fn dense(labels: Vec<String>, ops: Vec<DenseMatrix>) -> Result<Self> {
        check_labels(&labels, ops.len())?;
        let dim = ops.first().map(|o| o.rows()).ok_or_else(|| Error::Config("empty operator set".into()))?;
        for (label, op) in labels.iter().zip(&ops) {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::Shape(format!(
                    "operator {label} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        let lambda = detect_lambda(&ops)?;
        Ok(Self { labels, repr: Representation::Dense { dim, ops }, lambda })
    }

    /// Abstract family described by its structure constants.
    pub fn abstract_family(labels: Vec<String>, table: StructureTable, lambda: Option<f64>) -> Result<Self> {
        check_labels(&labels, table.dim())?;
        if let Some(l) = lambda {
            if !(l > 0.0) {
                return Err(Error::Config(format!("orthogonality constant must be positive, got {l}")));
            }
        }
        Ok(Self { labels, repr: Representation::Abstract(table), lambda })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `λ` in `tr(O_m† O_m') = λ δ_mm'`, if the set is orthogonal.
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn dense_ops(&self) -> Option<&[DenseMatrix]> {
        match &self.repr {
            Representation::Dense { ops, .. } => Some(ops),
            Representation::Abstract(_) => None,
        }
    }

    /// Hilbert-space dimension for dense sets.
    pub fn hilbert_dim(&self) -> Option<usize> {
        match &self.repr {
            Representation::Dense { dim, .. } => Some(*dim),
            Representation::Abstract(_) => None,
        }
    }

    pub(crate) fn require_dense(&self) -> Result<(usize, &[DenseMatrix])> {
        match &self.repr {
            Representation::Dense { dim, ops } => Ok((*dim, ops)),
            Representation::Abstract(_) => {
                Err(Error::Config("operation needs an operator set with explicit matrices".into()))
            }
        }
    }
}

fn check_labels(labels: &[String], expected: usize) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::Shape(format!("{} labels for {expected} operators", labels.len())));
    }
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Config(format!("duplicate operator label {l:?}")));
        }
    }
    Ok(())
}

fn detect_lambda(ops: &[DenseMatrix]) -> Result<Option<f64>> {
    let lambda = DenseMatrix::hs_inner(&ops[0], &ops[0])?.re;
    if !(lambda > 0.0) {
        return Ok(None);
    }
    let tol = ORTHOGONALITY_TOL * lambda.max(1.0);
    for (m, a) in ops.iter().enumerate() {
        for (mp, b) in ops.iter().enumerate().skip(m) {
            let g = DenseMatrix::hs_inner(a, b)?;
            let expected = if m == mp { lambda } else { 0.0 };
            if (g - C64::new(expected, 0.0)).norm() > tol {
                return Ok(None);
            }
        }
    }
    Ok(Some(lambda))
}

/// Unit vector of expectations, with the normalisation `A = Σ|⟨O_m⟩|²` kept aside.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowState {
    amplitudes: Vec<C64>,
    norm_a: f64,
}

impl ShadowState {
    /// Normalises an expectation vector. Fails when every entry vanishes.
    pub fn from_expectations(expectations: &[C64]) -> Result<Self> {
        linalg::check_finite(expectations)?;
        let norm_a: f64 = expectations.iter().map(|z| z.norm_sqr()).sum();
        if norm_a <= DEGENERACY_THRESHOLD {
            return Err(Error::Degenerate);
        }
        let scale = norm_a.sqrt();
        Ok(Self { amplitudes: expectations.iter().map(|z| z / scale).collect(), norm_a })
    }

    /// Wraps an already normalised vector.
    pub fn from_unit(amplitudes: Vec<C64>, norm_a: f64) -> Result<Self> {
        linalg::check_finite(&amplitudes)?;
        if !(norm_a > 0.0) || !norm_a.is_finite() {
            return Err(Error::Config(format!("normalisation constant must be positive, got {norm_a}")));
        }
        let norm = linalg::norm2(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("shadow amplitudes must have unit norm, got {norm}")));
        }
        Ok(Self { amplitudes, norm_a })
    }

    pub(crate) fn from_parts(amplitudes: Vec<C64>, norm_a: f64) -> Self {
        Self { amplitudes, norm_a }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// The constant `A`.
    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// The un-normalised expectations `√A · amplitudes`.
    pub fn expectations(&self) -> Vec<C64> {
        let s = self.norm_a.sqrt();
        self.amplitudes.iter().map(|z| z * s).collect()
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(mut self, phase: C64) -> Self {
        linalg::scale(&mut self.amplitudes, phase);
        self
    }
}

/// The `M × M` generator `H_S` together with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowHamiltonian {
    hs: SparseMatrix,
    leakage: f64,
    hermitian_defect: f64,
    leakage_flagged: bool,
}

impl ShadowHamiltonian {
    /// Wraps `hs` (must be square) with a known leakage value.
    pub fn new(hs: SparseMatrix, leakage: f64) -> Result<Self> {
        let hermitian_defect = hs.hermitian_defect()?;
        if !(leakage >= 0.0) {
            return Err(Error::Config(format!("leakage must be non-negative, got {leakage}")));
        }
        Ok(Self { hs, leakage, hermitian_defect, leakage_flagged: false })
    }

    pub fn hs(&self) -> &SparseMatrix {
        &self.hs
    }

    pub fn dim(&self) -> usize {
        self.hs.rows()
    }

    /// `max_m ‖[H, O_m] + Σ h_mm' O_m'‖_F / ‖O_m‖_F`; zero when the invariance property holds.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.hermitian_defect
    }

    /// Whether the builder found the leakage above the tolerance it was given.
    pub fn leakage_flagged(&self) -> bool {
        self.leakage_flagged
    }

    /// Largest number of non-zeros in a row.
    pub fn sparsity(&self) -> usize {
        self.hs.max_row_nnz()
    }

    pub fn max_abs(&self) -> f64 {
        self.hs.max_abs()
    }
}

/// `H_S` by trace projection: `h_mm' = −(1/λ) tr(O_m'† [H, O_m])`.
///
/// Entries below `1e-14 · max(1, max|h|)` are dropped as round-off. The
/// returned value is flagged (not rejected) when the leakage exceeds `tol`.
pub fn build_shadow_hamiltonian_dense(h: &DenseMatrix, s: &OperatorSet, tol: f64) -> Result<ShadowHamiltonian> {
    let (dim, ops) = s.require_dense()?;
    let lambda = s
        .lambda()
        .ok_or_else(|| Error::Config("operator set is not orthogonal; λ is unknown".into()))?;
    if h.rows() != dim || h.cols() != dim {
        return Err(Error::Shape(format!("Hamiltonian is {}x{}, operators act on dimension {dim}", h.rows(), h.cols())));
    }
    let m_count = ops.len();
    let mut dense_rows: Vec<Vec<C64>> = Vec::with_capacity(m_count);
    let mut leakage = 0.0f64;
    for op in ops {
        let comm = DenseMatrix::commutator(h, op)?;
        let row: Vec<C64> = ops
            .iter()
            .map(|other| DenseMatrix::hs_inner(other, &comm).map(|z| -z / lambda))
            .collect::<Result<_>>()?;
        let mut residual = comm;
        for (coef, other) in row.iter().zip(ops) {
            if *coef != C64::new(0.0, 0.0) {
                residual = residual.try_add(&other.scale(*coef))?;
            }
        }
        let op_norm = op.frobenius_norm();
        if op_norm > 0.0 {
            leakage = leakage.max(residual.frobenius_norm() / op_norm);
        }
        dense_rows.push(row);
    }
    let scale = dense_rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let drop = 1e-14 * scale;
    let triplets = dense_rows.iter().enumerate().flat_map(|(m, row)| {
        row.iter()
            .enumerate()
            .filter(move |(_, z)| z.norm() > drop)
            .map(move |(mp, &z)| (m, mp, z))
    });
    let hs = SparseMatrix::from_triplets(m_count, m_count, triplets)?;
    let mut sh = ShadowHamiltonian::new(hs, leakage)?;
    sh.leakage_flagged = leakage > tol;
    Ok(sh)
}

/// Evolves a shadow state under `exp(−i t H_S)`. `A` is unchanged.
pub fn evolve_shadow(sh: &ShadowHamiltonian, st: &ShadowState, t: f64, tol: f64) -> Result<ShadowState> {
    if sh.hermitian_defect() > tol {
        return Err(Error::NonHermitian { defect: sh.hermitian_defect(), tol });
    }
    if st.len() != sh.dim() {
        return Err(Error::Shape(format!("shadow state of length {} for a {}-dimensional H_S", st.len(), sh.dim())));
    }
    let amplitudes = linalg::expm_action(sh.hs(), st.amplitudes(), t, tol)?;
    Ok(ShadowState::from_parts(amplitudes, st.norm_a()))
}

/// `⟨b|a⟩`, computed exactly.
pub fn shadow_overlap(a: &ShadowState, b: &[C64]) -> Result<C64> {
    linalg::inner(b, a.amplitudes())
}

/// `⟨b|a⟩` estimated from `shots` Hadamard-test repetitions for each of the
/// real and imaginary parts. `b` must be a unit vector.
pub fn shadow_overlap_shots<R: Rng + ?Sized>(a: &ShadowState, b: &[C64], shots: u64, rng: &mut R) -> Result<C64> {
    let nb = linalg::norm2(b);
    if (nb - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("overlap target must be a unit vector, norm is {nb}")));
    }
    let exact = shadow_overlap(a, b)?;
    sampling::hadamard_test(exact, shots, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use alloc::string::ToString;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn x() -> DenseMatrix {
        DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(1.0, 0.0)], [c64(1.0, 0.0), c64(0.0, 0.0)]])
    }

    fn y() -> DenseMatrix {
        DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(0.0, -1.0)], [c64(0.0, 1.0), c64(0.0, 0.0)]])
    }

    fn z() -> DenseMatrix {
        DenseMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)])
    }

    #[test]
    fn detects_pauli_lambda() {
        let s = OperatorSet::dense(labels(&["X", "Y", "Z"]), vec![x(), y(), z()]).unwrap();
        assert_eq!(s.lambda(), Some(2.0));
        let skewed = OperatorSet::dense(labels(&["X", "2Z"]), vec![x(), z().scale(c64(2.0, 0.0))]).unwrap();
        assert_eq!(skewed.lambda(), None);
    }

    #[test]
    fn rejects_duplicate_labels_and_mixed_dims() {
        assert!(matches!(OperatorSet::dense(labels(&["X", "X"]), vec![x(), y()]), Err(Error::Config(_))));
        assert!(matches!(
            OperatorSet::dense(labels(&["X", "I4"]), vec![x(), DenseMatrix::identity(4)]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn z_on_xy_gives_rotation_generator() {
        let s = OperatorSet::dense(labels(&["X", "Y"]), vec![x(), y()]).unwrap();
        let sh = build_shadow_hamiltonian_dense(&z(), &s, 1e-10).unwrap();
        let expected = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(0.0, -2.0)], [c64(0.0, 2.0), c64(0.0, 0.0)]]);
        assert!(sh.hs().to_dense().max_abs_diff(&expected) < 1e-15);
        assert_eq!(sh.leakage(), 0.0);
        assert_eq!(sh.hermitian_defect(), 0.0);
        assert!(!sh.leakage_flagged());
    }

    #[test]
    fn commuting_case_is_zero() {
        let s = OperatorSet::dense(labels(&["Z"]), vec![z()]).unwrap();
        let sh = build_shadow_hamiltonian_dense(&z(), &s, 1e-10).unwrap();
        assert_eq!(sh.hs().nnz(), 0);
        assert_eq!(sh.dim(), 1);
        assert_eq!(sh.leakage(), 0.0);
    }

    #[test]
    fn x_against_z_leaks_entirely() {
        // [X, Z] = −2iY has no component along Z: ‖−2iY‖_F / ‖Z‖_F = 2.
        let s = OperatorSet::dense(labels(&["Z"]), vec![z()]).unwrap();
        let sh = build_shadow_hamiltonian_dense(&x(), &s, 1e-10).unwrap();
        assert_eq!(sh.hs().nnz(), 0);
        assert!((sh.leakage() - 2.0).abs() < 1e-14);
        assert!(sh.leakage_flagged());
    }

    #[test]
    fn unknown_lambda_is_configuration_error() {
        let s = OperatorSet::dense(labels(&["X", "2Z"]), vec![x(), z().scale(c64(2.0, 0.0))]).unwrap();
        assert!(matches!(build_shadow_hamiltonian_dense(&z(), &s, 1e-10), Err(Error::Config(_))));
    }

    #[test]
    fn degenerate_expectations_rejected() {
        assert_eq!(ShadowState::from_expectations(&[c64(0.0, 0.0); 3]), Err(Error::Degenerate));
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let s = OperatorSet::dense(labels(&["X", "Y"]), vec![x(), y()]).unwrap();
        let sh = build_shadow_hamiltonian_dense(&z(), &s, 1e-10).unwrap();
        let st = ShadowState::from_expectations(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert_eq!(evolve_shadow(&sh, &st, 0.0, 1e-10).unwrap(), st);
    }

    #[test]
    fn evolve_refuses_non_hermitian() {
        let hs = SparseMatrix::from_triplets(2, 2, [(0, 1, c64(1.0, 0.0))]).unwrap();
        let sh = ShadowHamiltonian::new(hs, 0.0).unwrap();
        let st = ShadowState::from_expectations(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!(matches!(evolve_shadow(&sh, &st, 1.0, 1e-10), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn overlap_examples() {
        let a = ShadowState::from_expectations(&[c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        assert!((shadow_overlap(&a, a.amplitudes()).unwrap() - c64(1.0, 0.0)).norm() < 1e-15);
        let orth = [c64(1.0, 0.0), c64(0.0, -1.0)].map(|z| z / 2f64.sqrt());
        assert!(shadow_overlap(&a, &orth).unwrap().norm() < 1e-15);
        assert!(shadow_overlap(&a, &[c64(1.0, 0.0)]).is_err());
    }

    #[test]
    fn shot_overlap_near_one_half() {
        // ⟨b|a⟩ = 1/2 exactly: a = e₀, b = (1/2, √3/2).
        let a = ShadowState::from_expectations(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let b = [c64(0.5, 0.0), c64(0.75f64.sqrt(), 0.0)];
        let shots = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let est = shadow_overlap_shots(&a, &b, shots, &mut rng).unwrap();
        let bound = 3.0 * 2.0 / (shots as f64).sqrt();
        assert!((est.re - 0.5).abs() <= bound, "estimate {est}");
        assert!(est.im.abs() <= bound);
        // golden value for this seed, guards against silent changes to the sampler
        assert!((est.re - 0.5004).abs() < 1e-12);
        assert!((est.im - 0.005).abs() < 1e-12);
    }
}

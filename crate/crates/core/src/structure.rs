//! Lie-algebra structure constants and the shadow Hamiltonian they induce.
//!
//! For a basis `O_1 … O_M` of a Lie algebra with `[O_j, O_k] = Σ_l f_jkl O_l`
//! and a Hamiltonian `H = i Σ_m α_m O_m`, the invariance property holds with
//! `h_kl = −i Σ_m α_m f_mkl`, so `H_S` can be assembled from the table alone.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::shadow::{ShadowHamiltonian, ShadowState};
use crate::{Error, Result, C64};

/// Antisymmetry and realness are checked to this absolute tolerance.
const TABLE_TOL: f64 = 1e-12;

/// Sparse table of real structure constants `f_jkl`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTable {
    dim: usize,
    entries: BTreeMap<(usize, usize), Vec<(usize, f64)>>,
}

impl StructureTable {
    /// Builds a table from `(j, k, l, f_jkl)` entries (0-based). Repeated
    /// entries are summed; zeros are dropped. Fails unless `f_jkl = −f_kjl`.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, f64)>,
    {
        let mut acc: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
        for (j, k, l, f) in entries {
            if j >= dim || k >= dim || l >= dim {
                return Err(Error::Shape(format!("structure constant ({j}, {k}, {l}) outside dimension {dim}")));
            }
            if !f.is_finite() {
                return Err(Error::NonFinite);
            }
            *acc.entry((j, k)).or_default().entry(l).or_insert(0.0) += f;
        }
        let entries: BTreeMap<(usize, usize), Vec<(usize, f64)>> = acc
            .into_iter()
            .map(|(key, row)| (key, row.into_iter().filter(|&(_, f)| f != 0.0).collect::<Vec<_>>()))
            .filter(|(_, row)| !row.is_empty())
            .collect();
        let table = Self { dim, entries };
        table.check_antisymmetry()?;
        Ok(table)
    }

    fn check_antisymmetry(&self) -> Result<()> {
        for (&(j, k), row) in &self.entries {
            let mirror = self.get(k, j);
            for &(l, f) in row {
                let g = mirror.iter().find(|e| e.0 == l).map_or(0.0, |e| e.1);
                if (f + g).abs() > TABLE_TOL {
                    return Err(Error::Consistency(format!(
                        "structure constants not antisymmetric: f[{j},{k},{l}] = {f}, f[{k},{j},{l}] = {g}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Structure constants of an explicit basis with `tr(O_j† O_k) = λ δ_jk`,
    /// by projecting each commutator back onto the basis. The basis must
    /// span a real Lie algebra (e.g. anti-Hermitian operators); complex
    /// coefficients or commutators leaving the span are errors.
    pub fn from_dense_basis(ops: &[DenseMatrix], lambda: f64) -> Result<Self> {
        let mut entries = Vec::new();
        for (j, a) in ops.iter().enumerate() {
            for (k, b) in ops.iter().enumerate() {
                let comm = DenseMatrix::commutator(a, b)?;
                let mut residual = comm.clone();
                for (l, o) in ops.iter().enumerate() {
                    let c = DenseMatrix::hs_inner(o, &comm)? / lambda;
                    if c.norm() <= TABLE_TOL {
                        continue;
                    }
                    if c.im.abs() > 1e-10 * c.norm().max(1.0) {
                        return Err(Error::Consistency(format!("complex structure constant f[{j},{k},{l}] = {c}")));
                    }
                    residual = residual.try_sub(&o.scale(c))?;
                    entries.push((j, k, l, c.re));
                }
                if residual.frobenius_norm() > 1e-10 * comm.frobenius_norm().max(1.0) {
                    return Err(Error::Consistency(format!("commutator of basis elements {j} and {k} leaves the span")));
                }
            }
        }
        Self::new(ops.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Non-zero `(l, f_jkl)` for the pair `(j, k)`.
    pub fn get(&self, j: usize, k: usize) -> &[(usize, f64)] {
        self.entries.get(&(j, k)).map_or(&[], |v| v.as_slice())
    }

    /// Iterates over all stored `((j, k), row)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<(usize, f64)>)> {
        self.entries.iter()
    }

    /// `d′`: the largest number of non-zero `l` for any pair `(j, k)`.
    pub fn sparsity(&self) -> usize {
        self.entries.values().map(|row| row.len()).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().flatten().map(|e| e.1.abs()).fold(0.0, f64::max)
    }
}

/// `H_S` for `H = i Σ α_m O_m` from the structure constants:
/// `h_kl = −i Σ_m α_m f_mkl`.
///
/// Asserts that the row sparsity is at most `p·d′` and the largest entry at
/// most `p · max|α| · max|f|`, where `p` is the largest number of active
/// terms `α_m ≠ 0` with `[O_m, O_k] ≠ 0` for a single `k`.
pub fn build_from_structure_constants(f: &StructureTable, alpha: &[f64]) -> Result<ShadowHamiltonian> {
    let m = f.dim();
    if alpha.len() != m {
        return Err(Error::Shape(format!("{} coefficients for a {m}-element basis", alpha.len())));
    }
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut triplets = Vec::new();
    let mut active = alloc::vec![0usize; m];
    for (&(j, k), row) in f.iter() {
        let a = alpha[j];
        if a == 0.0 {
            continue;
        }
        active[k] += 1;
        for &(l, fjkl) in row {
            triplets.push((k, l, C64::new(0.0, -a * fjkl)));
        }
    }
    let hs = SparseMatrix::from_triplets(m, m, triplets)?;

    let p = active.iter().copied().max().unwrap_or(0);
    let sparsity_bound = p * f.sparsity();
    if hs.max_row_nnz() > sparsity_bound {
        return Err(Error::Consistency(format!(
            "H_S row sparsity {} exceeds p·d′ = {sparsity_bound}",
            hs.max_row_nnz()
        )));
    }
    let alpha_max = alpha.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let value_bound = p as f64 * alpha_max * f.max_abs();
    if hs.max_abs() > value_bound * (1.0 + 1e-12) {
        return Err(Error::Consistency(format!(
            "‖H_S‖_max = {} exceeds p·max|α|·max|f| = {value_bound}",
            hs.max_abs()
        )));
    }
    ShadowHamiltonian::new(hs, 0.0)
}

/// Shadow state of a common eigenstate of the diagonal (Cartan) operators.
///
/// `diagonal` lists `(slot, e_slot)` with purely imaginary eigenvalues of the
/// anti-Hermitian diagonal operators; every other slot of the `size`-element
/// set has zero expectation. Amplitudes are stored with the common factor `i`
/// removed, i.e. as `Im(e)/√A`, so they come out real.
pub fn lowest_weight_shadow(size: usize, diagonal: &[(usize, C64)]) -> Result<ShadowState> {
    let mut amplitudes = alloc::vec![C64::new(0.0, 0.0); size];
    for &(slot, e) in diagonal {
        if slot >= size {
            return Err(Error::Shape(format!("diagonal slot {slot} outside a {size}-element set")));
        }
        if e.re.abs() > TABLE_TOL * e.norm().max(1.0) {
            return Err(Error::Config(format!("eigenvalue {e} of an anti-Hermitian operator must be imaginary")));
        }
        amplitudes[slot] += C64::new(e.im, 0.0);
    }
    ShadowState::from_expectations(&amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::shadow::{build_shadow_hamiltonian_dense, OperatorSet};
    use alloc::string::ToString;
    use alloc::vec;
    use alloc::vec::Vec;

    fn su2_basis() -> Vec<DenseMatrix> {
        let i = c64(0.0, 1.0);
        let x = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(1.0, 0.0)], [c64(1.0, 0.0), c64(0.0, 0.0)]]);
        let y = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(0.0, -1.0)], [c64(0.0, 1.0), c64(0.0, 0.0)]]);
        let z = DenseMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        vec![x.scale(i), y.scale(i), z.scale(i)]
    }

    #[test]
    fn su2_constants() {
        // [iX, iY] = −[X, Y] = −2iZ = −2(iZ)
        let f = StructureTable::from_dense_basis(&su2_basis(), 2.0).unwrap();
        assert_eq!(f.get(0, 1), &[(2, -2.0)]);
        assert_eq!(f.get(1, 0), &[(2, 2.0)]);
        assert_eq!(f.sparsity(), 1);
    }

    #[test]
    fn su2_matches_dense_pathway() {
        let basis = su2_basis();
        let f = StructureTable::from_dense_basis(&basis, 2.0).unwrap();
        // H = Z = i·(−1)·(iZ)
        let sh = build_from_structure_constants(&f, &[0.0, 0.0, -1.0]).unwrap();
        let hs = sh.hs().to_dense();
        let expected = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(0.0, -2.0)], [c64(0.0, 2.0), c64(0.0, 0.0)]]);
        let block = DenseMatrix::from_fn(2, 2, |r, c| hs[(r, c)]);
        assert!(block.max_abs_diff(&expected) < 1e-15);

        let labels = ["iX", "iY", "iZ"].iter().map(|s| s.to_string()).collect();
        let set = OperatorSet::dense(labels, basis).unwrap();
        let z = DenseMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let dense = build_shadow_hamiltonian_dense(&z, &set, 1e-12).unwrap();
        assert!(dense.hs().to_dense().max_abs_diff(&hs) < 1e-12);
    }

    #[test]
    fn zero_alpha_gives_zero() {
        let f = StructureTable::from_dense_basis(&su2_basis(), 2.0).unwrap();
        let sh = build_from_structure_constants(&f, &[0.0; 3]).unwrap();
        assert_eq!(sh.hs().nnz(), 0);
        assert_eq!(sh.leakage(), 0.0);
    }

    #[test]
    fn non_antisymmetric_table_rejected() {
        assert!(matches!(StructureTable::new(2, [(0, 1, 0, 1.0)]), Err(Error::Consistency(_))));
        assert!(StructureTable::new(2, [(0, 1, 0, 1.0), (1, 0, 0, -1.0)]).is_ok());
    }

    #[test]
    fn lowest_weight_examples() {
        let st = lowest_weight_shadow(2, &[(0, c64(0.0, 1.0)), (1, c64(0.0, 2.0))]).unwrap();
        let s5 = 5f64.sqrt();
        assert!((st.amplitudes()[0] - c64(1.0 / s5, 0.0)).norm() < 1e-15);
        assert!((st.amplitudes()[1] - c64(2.0 / s5, 0.0)).norm() < 1e-15);
        assert!((st.norm_a() - 5.0).abs() < 1e-15);

        let single = lowest_weight_shadow(3, &[(1, c64(0.0, 1.0))]).unwrap();
        assert_eq!(single.amplitudes(), &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);

        assert_eq!(lowest_weight_shadow(2, &[(0, c64(0.0, 0.0))]), Err(Error::Degenerate));
    }
}

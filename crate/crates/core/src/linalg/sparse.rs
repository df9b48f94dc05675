use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::DenseMatrix;
use crate::{Error, Result, C64};

/// Sparse complex matrix in canonical triplet form.
///
/// Triplets are sorted by `(row, col)`, contain no duplicates and no stored
/// exact zeros. A row-offset table over the triplets gives CSR-style access.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, C64)>,
    row_offsets: Vec<usize>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, triplets: Vec::new(), row_offsets: vec![0; rows + 1] }
    }

    pub fn identity(n: usize) -> Self {
        let triplets = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Self::from_canonical(n, n, triplets)
    }

    /// Builds the canonical form from arbitrary triplets: duplicates are
    /// summed and exact zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (i, j, z) in entries {
            if i >= rows || j >= cols {
                return Err(Error::Shape(format!("entry ({i}, {j}) outside {rows}x{cols}")));
            }
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            *acc.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += z;
        }
        let triplets = acc
            .into_iter()
            .filter(|(_, z)| *z != C64::new(0.0, 0.0))
            .map(|((i, j), z)| (i, j, z))
            .collect();
        Ok(Self::from_canonical(rows, cols, triplets))
    }

    fn from_canonical(rows: usize, cols: usize, triplets: Vec<(usize, usize, C64)>) -> Self {
        let mut row_offsets = vec![0usize; rows + 1];
        for &(i, _, _) in &triplets {
            row_offsets[i + 1] += 1;
        }
        for i in 0..rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self { rows, cols, triplets, row_offsets }
    }

    /// Converts a dense matrix, dropping entries with modulus `≤ drop_below`.
    pub fn from_dense(m: &DenseMatrix, drop_below: f64) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if z.norm() > drop_below && z != C64::new(0.0, 0.0) {
                    triplets.push((i, j, z));
                }
            }
        }
        Self::from_canonical(m.rows(), m.cols(), triplets)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for &(i, j, z) in &self.triplets {
            m[(i, j)] = z;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, C64)] {
        &self.triplets
    }

    /// Stored entries of row `i`.
    pub fn row(&self, i: usize) -> &[(usize, usize, C64)] {
        &self.triplets[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let row = self.row(i);
        match row.binary_search_by_key(&j, |&(_, c, _)| c) {
            Ok(k) => row[k].2,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Largest number of stored entries in any row.
    pub fn max_row_nnz(&self) -> usize {
        (0..self.rows).map(|i| self.row_offsets[i + 1] - self.row_offsets[i]).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets.iter().map(|t| t.2.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|t| t.2.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("{}x{} matrix times vector of length {}", self.rows, self.cols, v.len())));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    pub(crate) fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().map(|&(_, j, z)| z * v[j]).sum();
        }
    }

    fn map_layout(&self, f: impl Fn(usize, usize, C64) -> (usize, usize, C64), rows: usize, cols: usize) -> Self {
        let mut triplets: Vec<_> = self.triplets.iter().map(|&(i, j, z)| f(i, j, z)).collect();
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        Self::from_canonical(rows, cols, triplets)
    }

    pub fn adjoint(&self) -> Self {
        self.map_layout(|i, j, z| (j, i, z.conj()), self.cols, self.rows)
    }

    pub fn transpose(&self) -> Self {
        self.map_layout(|i, j, z| (j, i, z), self.cols, self.rows)
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            triplets: self.triplets.iter().map(|&(i, j, z)| (i, j, z.conj())).collect(),
            row_offsets: self.row_offsets.clone(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        let triplets = self
            .triplets
            .iter()
            .map(|&(i, j, z)| (i, j, z * factor))
            .filter(|t| t.2 != C64::new(0.0, 0.0))
            .collect();
        Self::from_canonical(self.rows, self.cols, triplets)
    }

    /// Max-norm of `M − M†`.
    pub fn hermitian_defect(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut worst = 0.0f64;
        for &(i, j, z) in &self.triplets {
            worst = worst.max((z - self.get(j, i).conj()).norm());
        }
        Ok(worst)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        // Row-major iteration over both factors keeps the output sorted.
        for i in 0..self.rows {
            for k in 0..other.rows {
                for &(_, j, a) in self.row(i) {
                    for &(_, l, b) in other.row(k) {
                        triplets.push((i * other.rows + k, j * other.cols + l, a * b));
                    }
                }
            }
        }
        Self::from_canonical(rows, cols, triplets)
    }

    /// Kronecker sum `A ⊗ 1 + 1 ⊗ A` of a square matrix with itself.
    pub fn kron_sum(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let id = Self::identity(self.rows);
        let left = self.kron(&id);
        let right = id.kron(self);
        Self::from_triplets(
            left.rows,
            left.cols,
            left.triplets.iter().chain(right.triplets.iter()).copied(),
        )
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "sum of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Self::from_triplets(self.rows, self.cols, self.triplets.iter().chain(other.triplets.iter()).copied())
    }
}

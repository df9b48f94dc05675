use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;

use crate::{Error, Result, C64};

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested row slices. Panics if rows are ragged.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), n_cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self { rows: n_rows, cols: n_cols, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!("{}x{} matrix times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "elementwise op on {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Result<C64> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self.data[i * n + i]).sum())
    }

    /// Hilbert–Schmidt inner product `tr(A† B)`.
    pub fn hs_inner(a: &Self, b: &Self) -> Result<C64> {
        if a.rows != b.rows || a.cols != b.cols {
            return Err(Error::Shape(format!("tr(A†B) of {}x{} and {}x{}", a.rows, a.cols, b.rows, b.cols)));
        }
        Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.try_matmul(b)?.try_sub(&b.try_matmul(a)?)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(a: &Self, b: &Self) -> Result<Self> {
        a.try_matmul(b)?.try_add(&b.try_matmul(a)?)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij − B_ij|`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        super::max_abs_diff(&self.data, &other.data)
    }

    /// Max-norm of `M − M†`.
    pub fn hermitian_defect(&self) -> Result<f64> {
        let n = self.require_square()?;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Max-norm of `U U† − 1`.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let n = self.require_square()?;
        Ok(self.try_matmul(&self.adjoint())?.max_abs_diff(&Self::identity(n)))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch, matching the usual matrix-crate convention;
// the `try_*` methods are the fallible forms.
impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn pauli_x() -> DenseMatrix {
        DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(1.0, 0.0)], [c64(1.0, 0.0), c64(0.0, 0.0)]])
    }

    fn pauli_z() -> DenseMatrix {
        DenseMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)])
    }

    #[test]
    fn hermitian_defect_examples() {
        assert_eq!(DenseMatrix::identity(2).hermitian_defect().unwrap(), 0.0);
        let herm = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(0.0, -2.0)], [c64(0.0, 2.0), c64(0.0, 0.0)]]);
        assert_eq!(herm.hermitian_defect().unwrap(), 0.0);
        let nilpotent = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(1.0, 0.0)], [c64(0.0, 0.0), c64(0.0, 0.0)]]);
        assert_eq!(nilpotent.hermitian_defect().unwrap(), 1.0);
    }

    #[test]
    fn hermitian_defect_rejects_rectangular() {
        let m = DenseMatrix::zeros(2, 3);
        assert_eq!(m.hermitian_defect(), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn kron_identity() {
        assert_eq!(DenseMatrix::identity(2).kron(&DenseMatrix::identity(2)), DenseMatrix::identity(4));
    }

    #[test]
    fn kron_x_z_explicit_table() {
        // X ⊗ Z = [[0, Z], [Z, 0]]
        let k = pauli_x().kron(&pauli_z());
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        let expected = DenseMatrix::from_rows(&[
            [zero, zero, one, zero],
            [zero, zero, zero, -one],
            [one, zero, zero, zero],
            [zero, -one, zero, zero],
        ]);
        assert_eq!(k, expected);
        assert_eq!(k[(0, 2)], one);
    }

    #[test]
    fn commutator_of_paulis() {
        // [Z, X] = 2iY
        let c = DenseMatrix::commutator(&pauli_z(), &pauli_x()).unwrap();
        let two_i_y = DenseMatrix::from_rows(&[[c64(0.0, 0.0), c64(2.0, 0.0)], [c64(-2.0, 0.0), c64(0.0, 0.0)]]);
        assert_eq!(c, two_i_y);
    }

    #[test]
    fn shape_errors() {
        assert!(DenseMatrix::zeros(2, 3).try_matmul(&DenseMatrix::zeros(2, 3)).is_err());
        assert!(DenseMatrix::from_vec(2, 2, vec![C64::new(0.0, 0.0); 3]).is_err());
        assert!(DenseMatrix::zeros(2, 2).matvec(&[C64::new(1.0, 0.0)]).is_err());
    }
}

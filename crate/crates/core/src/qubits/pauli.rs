use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{ensure_dense_capacity, DenseMatrix, SparseMatrix};
use crate::{Error, Result, C64};

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Index in `(I, X, Y, Z)`.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Self {
        Self::ALL[k & 3]
    }

    /// `σ_a σ_b = phase · σ_c`.
    pub fn mul(self, other: Self) -> (C64, Self) {
        use Pauli::*;
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (a, b) if a == b => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }

    /// Action on a computational basis bit: `σ|b⟩ = phase |b′⟩`.
    pub fn apply_bit(self, bit: bool) -> (bool, C64) {
        match self {
            Pauli::I => (bit, C64::new(1.0, 0.0)),
            Pauli::X => (!bit, C64::new(1.0, 0.0)),
            Pauli::Y => (!bit, if bit { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) }),
            Pauli::Z => (bit, if bit { C64::new(-1.0, 0.0) } else { C64::new(1.0, 0.0) }),
        }
    }

    pub fn matrix(self) -> DenseMatrix {
        DenseMatrix::from_fn(2, 2, |r, c| {
            let (out, phase) = self.apply_bit(c == 1);
            if (r == 1) == out {
                phase
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Tensor product of single-qubit Paulis on `n` qubits. Qubit 1 (index 0)
/// is the most significant bit of the computational basis index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { ops: vec![Pauli::I; n] }
    }

    pub fn from_ops(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    /// `p` on qubit `q` (0-based), identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        if q >= n {
            return Err(Error::Shape(format!("qubit {} outside a {n}-qubit register", q + 1)));
        }
        let mut s = Self::identity(n);
        s.ops[q] = p;
        Ok(s)
    }

    /// Parses labels such as `Z1`, `X1Z2`, `X1 Y3` (1-based qubits) or `1`/`I`
    /// for the identity.
    pub fn parse(label: &str, n: usize) -> Result<Self> {
        let mut s = Self::identity(n);
        let trimmed = label.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "I" {
            return Ok(s);
        }
        let chars: Vec<char> = trimmed.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let mut pos = 0;
        let mut seen = vec![false; n];
        while pos < chars.len() {
            let p = Pauli::from_char(chars[pos])
                .ok_or_else(|| Error::Config(format!("bad Pauli label {label:?}: unexpected {:?}", chars[pos])))?;
            pos += 1;
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Config(format!("bad Pauli label {label:?}: missing qubit index")));
            }
            let digits: String = chars[start..pos].iter().collect();
            let q: usize = digits.parse().map_err(|_| Error::Config(format!("bad qubit index in {label:?}")))?;
            if q == 0 || q > n {
                return Err(Error::Config(format!("qubit {q} in {label:?} outside 1..={n}")));
            }
            if seen[q - 1] {
                return Err(Error::Config(format!("qubit {q} repeated in {label:?}")));
            }
            seen[q - 1] = true;
            s.ops[q - 1] = p;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.ops[q]
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        self.ops[q] = p;
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// 0-based qubits acted on non-trivially.
    pub fn support(&self) -> Vec<usize> {
        self.ops.iter().enumerate().filter(|(_, &p)| p != Pauli::I).map(|(q, _)| q).collect()
    }

    /// `self · other = phase · result`.
    pub fn mul(&self, other: &Self) -> Result<(C64, Self)> {
        if self.n() != other.n() {
            return Err(Error::Shape(format!("Pauli strings on {} and {} qubits", self.n(), other.n())));
        }
        let mut phase = C64::new(1.0, 0.0);
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase *= ph;
                p
            })
            .collect();
        Ok((phase, Self { ops }))
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// `P|x⟩ = phase |y⟩`.
    pub fn apply_basis(&self, x: usize) -> (usize, C64) {
        let n = self.n();
        let mut y = x;
        let mut phase = C64::new(1.0, 0.0);
        for (q, &p) in self.ops.iter().enumerate() {
            if p == Pauli::I {
                continue;
            }
            let shift = n - 1 - q;
            let (out, ph) = p.apply_bit((x >> shift) & 1 == 1);
            phase *= ph;
            if out {
                y |= 1 << shift;
            } else {
                y &= !(1 << shift);
            }
        }
        (y, phase)
    }

    pub fn to_sparse(&self) -> Result<SparseMatrix> {
        let dim = register_dim(self.n())?;
        SparseMatrix::from_triplets(
            dim,
            dim,
            (0..dim).map(|x| {
                let (y, ph) = self.apply_basis(x);
                (y, x, ph)
            }),
        )
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        Ok(self.to_sparse()?.to_dense())
    }

    /// Label in the form accepted by [`parse`](Self::parse), e.g. `X1Z3`; `1` for the identity.
    pub fn label(&self) -> String {
        if self.weight() == 0 {
            return String::from("1");
        }
        let mut s = String::new();
        for (q, &p) in self.ops.iter().enumerate() {
            if p != Pauli::I {
                s.push(p.as_char());
                s.push_str(&format!("{}", q + 1));
            }
        }
        s
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `2^n`, checked against the dense cutoff.
pub(crate) fn register_dim(n: usize) -> Result<usize> {
    if n >= usize::BITS as usize - 1 {
        return Err(Error::Capacity { dim: usize::MAX, limit: crate::linalg::dense_cutoff() });
    }
    let dim = 1usize << n;
    ensure_dense_capacity(dim)?;
    Ok(dim)
}

/// Real linear combination of Pauli strings, `H = Σ c_k P_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTermSum {
    n: usize,
    terms: Vec<(PauliString, f64)>,
}

impl PauliTermSum {
    /// Repeated strings are merged; zero coefficients dropped.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let mut merged: Vec<(PauliString, f64)> = Vec::new();
        for (p, c) in terms {
            if p.n() != n {
                return Err(Error::Shape(format!("Pauli string on {} qubits in a {n}-qubit sum", p.n())));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite);
            }
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += c,
                None => merged.push((p, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        Ok(Self { n, terms: merged })
    }

    /// Parses `(label, coefficient)` pairs.
    pub fn parse<'a>(n: usize, terms: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let parsed: Result<Vec<_>> = terms.into_iter().map(|(l, c)| Ok((PauliString::parse(l, n)?, c))).collect();
        Self::new(n, parsed?)
    }

    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    /// Largest term weight (0 for the empty sum).
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|(p, _)| p.weight()).max().unwrap_or(0)
    }

    pub fn to_sparse(&self) -> Result<SparseMatrix> {
        let dim = register_dim(self.n)?;
        let mut triplets = Vec::new();
        for (p, c) in &self.terms {
            for x in 0..dim {
                let (y, ph) = p.apply_basis(x);
                triplets.push((y, x, ph * *c));
            }
        }
        SparseMatrix::from_triplets(dim, dim, triplets)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        Ok(self.to_sparse()?.to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn parse_and_label_round_trip() {
        let p = PauliString::parse("X1Z3", 3).unwrap();
        assert_eq!(p.ops(), &[Pauli::X, Pauli::I, Pauli::Z]);
        assert_eq!(p.label(), "X1Z3");
        assert_eq!(PauliString::parse("1", 2).unwrap(), PauliString::identity(2));
        assert!(PauliString::parse("X4", 3).is_err());
        assert!(PauliString::parse("X1X1", 3).is_err());
        assert!(PauliString::parse("Q1", 3).is_err());
    }

    #[test]
    fn single_qubit_matrices() {
        let y = Pauli::Y.matrix();
        assert_eq!(y[(0, 1)], c64(0.0, -1.0));
        assert_eq!(y[(1, 0)], c64(0.0, 1.0));
        let (ph, z) = Pauli::X.mul(Pauli::Y);
        assert_eq!((ph, z), (c64(0.0, 1.0), Pauli::Z));
        let prod = Pauli::X.matrix().try_matmul(&Pauli::Y.matrix()).unwrap();
        assert!(prod.max_abs_diff(&Pauli::Z.matrix().scale(c64(0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn qubit_one_is_most_significant() {
        let x1 = PauliString::parse("X1", 2).unwrap().to_dense().unwrap();
        let expected = Pauli::X.matrix().kron(&DenseMatrix::identity(2));
        assert_eq!(x1, expected);
    }

    #[test]
    fn string_product_matches_matrices() {
        let a = PauliString::parse("X1Y2", 2).unwrap();
        let b = PauliString::parse("Z1Y2Z2", 2);
        assert!(b.is_err());
        let b = PauliString::parse("Z1Z2", 2).unwrap();
        let (ph, c) = a.mul(&b).unwrap();
        let lhs = a.to_dense().unwrap().try_matmul(&b.to_dense().unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&c.to_dense().unwrap().scale(ph)) < 1e-15);
        assert!(a.commutes_with(&b));
    }

    #[test]
    fn term_sum_merges_duplicates() {
        let h = PauliTermSum::parse(2, [("Z1", 1.0), ("Z1", 0.5), ("X2", 0.0)]).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].1, 1.5);
        assert_eq!(h.locality(), 1);
    }
}

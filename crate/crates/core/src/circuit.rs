//! Gates, circuits and a minimal state-vector simulator.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::DenseMatrix;
use crate::qubits::register_dim;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    S,
    T,
    X,
    Y,
    Z,
    Cz,
    Cnot,
    Swap,
    /// Arbitrary `2^k × 2^k` unitary; the first listed qubit is the most significant.
    Unitary(DenseMatrix),
}

impl GateKind {
    /// Parses the names used in circuit files (case-insensitive).
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "S" => GateKind::S,
            "T" => GateKind::T,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "CZ" => GateKind::Cz,
            "CNOT" | "CX" => GateKind::Cnot,
            "SWAP" => GateKind::Swap,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Cz => "CZ",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::Unitary(_) => "unitary",
        }
    }

    /// Whether the gate maps Pauli strings to signed Pauli strings.
    pub fn is_clifford(&self) -> bool {
        !matches!(self, GateKind::T | GateKind::Unitary(_))
    }

    fn matrix(&self) -> DenseMatrix {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            GateKind::H => DenseMatrix::from_rows(&[[r, r], [r, -r]]),
            GateKind::S => DenseMatrix::diag(&[o, C64::new(0.0, 1.0)]),
            GateKind::T => DenseMatrix::diag(&[o, C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]),
            GateKind::X => DenseMatrix::from_rows(&[[z, o], [o, z]]),
            GateKind::Y => DenseMatrix::from_rows(&[[z, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), z]]),
            GateKind::Z => DenseMatrix::diag(&[o, -o]),
            GateKind::Cz => DenseMatrix::diag(&[o, o, o, -o]),
            GateKind::Cnot => DenseMatrix::from_rows(&[[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]]),
            GateKind::Swap => DenseMatrix::from_rows(&[[o, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, o]]),
            GateKind::Unitary(m) => m.clone(),
        }
    }
}

/// A gate placed on specific (0-based) qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
    matrix: DenseMatrix,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        let matrix = kind.matrix();
        let k = qubits.len();
        if k == 0 || k >= 16 || matrix.rows() != 1 << k || !matrix.is_square() {
            return Err(Error::Shape(format!(
                "{} gate is {}x{} but acts on {k} qubits",
                kind.name(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        for (a, q) in qubits.iter().enumerate() {
            if qubits[..a].contains(q) {
                return Err(Error::Config(format!("gate {} repeats qubit {}", kind.name(), q + 1)));
            }
        }
        let defect = matrix.unitarity_defect()?;
        if defect > 1e-10 {
            return Err(Error::Config(format!("gate {} is not unitary (defect {defect:e})", kind.name())));
        }
        Ok(Self { kind, qubits, matrix })
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q]).expect("valid gate")
    }

    pub fn cz(a: usize, b: usize) -> Result<Self> {
        Self::new(GateKind::Cz, vec![a, b])
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Cnot, vec![control, target])
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Local `2^k × 2^k` matrix.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn name(&self) -> String {
        String::from(self.kind.name())
    }
}

/// Ordered list of gates on `n` qubits; the first gate acts first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n) {
            return Err(Error::Config(format!("gate {} on qubit {} of a {}-qubit circuit", gate.name(), q + 1, self.n)));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Runs the circuit on a state vector of length `2^n`.
    pub fn apply(&self, state: &mut [C64]) -> Result<()> {
        for g in &self.gates {
            apply_gate(g, self.n, state)?;
        }
        Ok(())
    }

    /// The full `2^n × 2^n` unitary `G_L ⋯ G_1`.
    pub fn unitary(&self) -> Result<DenseMatrix> {
        let dim = register_dim(self.n)?;
        let mut u = DenseMatrix::zeros(dim, dim);
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            self.apply(&mut col)?;
            for (i, z) in col.iter().enumerate() {
                u[(i, j)] = *z;
            }
        }
        Ok(u)
    }
}

/// Applies `gate` in place to an `n`-qubit state vector (qubit 0 most significant).
pub fn apply_gate(gate: &Gate, n: usize, state: &mut [C64]) -> Result<()> {
    if state.len() != 1usize << n {
        return Err(Error::Shape(format!("state of length {} for {n} qubits", state.len())));
    }
    let k = gate.qubits.len();
    let shifts: Vec<usize> = gate.qubits.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let local = 1usize << k;
    let offsets: Vec<usize> = (0..local)
        .map(|a| {
            shifts
                .iter()
                .enumerate()
                .filter(|(b, _)| (a >> (k - 1 - b)) & 1 == 1)
                .map(|(_, s)| 1usize << s)
                .sum()
        })
        .collect();
    let m = &gate.matrix;
    let mut buf = vec![C64::new(0.0, 0.0); local];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (a, off) in offsets.iter().enumerate() {
            buf[a] = state[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            state[base | off] = (0..local).map(|c| m[(r, c)] * buf[c]).sum();
        }
    }
    Ok(())
}

/// Full-register matrix of a single gate.
pub fn embed_gate(gate: &Gate, n: usize) -> Result<DenseMatrix> {
    let mut c = Circuit::new(n);
    c.push(gate.clone())?;
    c.unitary()
}

//! JSON problem files. Physics indices in files are 1-based; everything is
//! converted to 0-based here, at the boundary.

use serde::{Deserialize, Serialize};
use shadowsim_core::bosons::{ClassicalPhasePoint, OscillatorNetwork};
use shadowsim_core::circuit::{Circuit, Gate, GateKind};
use shadowsim_core::fermions::{MajoranaCoupling, QuarticTerm};
use shadowsim_core::heisenberg::PauliOperator;
use shadowsim_core::linalg::DenseMatrix;
use shadowsim_core::qubits::{PauliString, PauliTermSum};
use shadowsim_core::{c64, C64};

use crate::CliError;

/// A problem file: one top-level key naming the scenario, e.g. `{"fermion": {…}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Fermion(FermionProblem),
    Boson(BosonProblem),
    Qubit(QubitProblem),
    Correlator(CorrelatorProblem),
    Heisenberg(HeisenbergProblem),
}

impl Problem {
    pub fn scenario(&self) -> &'static str {
        match self {
            Problem::Fermion(_) => "fermion",
            Problem::Boson(_) => "boson",
            Problem::Qubit(_) => "qubit",
            Problem::Correlator(_) => "correlator",
            Problem::Heisenberg(_) => "heisenberg",
        }
    }

    pub fn times(&self) -> &[f64] {
        match self {
            Problem::Fermion(p) => &p.times,
            Problem::Boson(p) => &p.times,
            Problem::Qubit(p) => &p.times,
            Problem::Correlator(p) => &p.times,
            Problem::Heisenberg(p) => &p.times,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(format!("line {} column {}: {e}", e.line(), e.column())))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FermionProblem {
    pub n: usize,
    /// `[j, k, re, im]` entries of `Γ`, 1-based Majorana indices.
    pub gamma: Vec<[f64; 4]>,
    pub initial: FermionInitial,
    #[serde(default)]
    pub times: Vec<f64>,
    /// `[a, b, c, d, coeff]` quartic Majorana terms.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quartic: Vec<[f64; 5]>,
    /// Subsets of Majorana indices whose energies are reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum FermionInitial {
    Vacuum,
    Product(Vec<usize>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BosonProblem {
    pub n: usize,
    pub masses: Vec<f64>,
    /// `[j, k, κ]`, 1-based; `j = k` is a spring to the wall.
    #[serde(default)]
    pub springs: Vec<(usize, usize, f64)>,
    pub initial: PhasePoint,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub quadratic: bool,
    /// Subsets of term indices (1-based columns of `B`) whose energies are reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QubitProblem {
    pub n: usize,
    /// `[label, coeff]` Pauli terms such as `["Z1", 0.5]`.
    pub hamiltonian: Vec<(String, f64)>,
    pub initial: QubitInitial,
    #[serde(default)]
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum QubitInitial {
    /// `|0…0⟩`
    Zero,
    /// `[re, im]` amplitudes of a pure state (normalised on load).
    Amplitudes(Vec<[f64; 2]>),
}

/// Two-time correlators of a fermion or qubit system on the grid `times × times`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorProblem {
    pub system: CorrelatedSystem,
    #[serde(default)]
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum CorrelatedSystem {
    Fermion { n: usize, gamma: Vec<[f64; 4]>, initial: FermionInitial },
    Qubit { n: usize, hamiltonian: Vec<(String, f64)>, initial: QubitInitial },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergProblem {
    pub n: usize,
    #[serde(default)]
    pub circuit: Option<CircuitSpec>,
    /// 1-local Hamiltonian for continuous evolution over `times`.
    #[serde(default)]
    pub hamiltonian: Option<Vec<(String, f64)>>,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    #[serde(default)]
    pub n: Option<usize>,
    pub gates: Vec<GateSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub name: String,
    /// 1-based qubits; the first is the most significant for multi-qubit matrices.
    pub qubits: Vec<usize>,
    /// Row-major `[re, im]` entries for `"unitary"` gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum OperatorSpec {
    Pauli(String),
    /// `[label, re, im]`
    Terms(Vec<(String, f64, f64)>),
}

fn schema(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("field `{field}`: {msg}"))
}

fn one_based(field: &str, idx: usize, upper: usize) -> Result<usize, CliError> {
    if idx == 0 || idx > upper {
        return Err(schema(field, format!("index {idx} outside 1..={upper}")));
    }
    Ok(idx - 1)
}

fn integral(field: &str, v: f64, upper: usize) -> Result<usize, CliError> {
    if v.fract() != 0.0 || v < 1.0 {
        return Err(schema(field, format!("index {v} is not a positive integer")));
    }
    one_based(field, v as usize, upper)
}

pub fn coupling(n: usize, gamma: &[[f64; 4]]) -> Result<MajoranaCoupling, CliError> {
    if n == 0 {
        return Err(schema("n", "need at least one mode"));
    }
    let entries = gamma
        .iter()
        .map(|&[j, k, re, im]| Ok((integral("gamma", j, 2 * n)?, integral("gamma", k, 2 * n)?, c64(re, im))))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(MajoranaCoupling::from_triplets(n, entries)?)
}

pub fn quartic_terms(n: usize, quartic: &[[f64; 5]]) -> Result<Vec<QuarticTerm>, CliError> {
    quartic
        .iter()
        .map(|&[a, b, c, d, coeff]| {
            let modes = [a, b, c, d].map(|v| integral("quartic", v, 2 * n));
            let [a, b, c, d] = modes;
            Ok(QuarticTerm { modes: [a?, b?, c?, d?], coeff })
        })
        .collect()
}

pub fn occupied_modes(n: usize, initial: &FermionInitial) -> Result<Vec<usize>, CliError> {
    match initial {
        FermionInitial::Vacuum => Ok(Vec::new()),
        FermionInitial::Product(modes) => modes.iter().map(|&j| one_based("initial.product", j, n)).collect(),
    }
}

pub fn majorana_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>, CliError> {
    subset.iter().map(|&j| one_based("subsets", j, 2 * n)).collect()
}

pub fn network(p: &BosonProblem) -> Result<(OscillatorNetwork, ClassicalPhasePoint), CliError> {
    if p.masses.len() != p.n {
        return Err(schema("masses", format!("{} masses for n = {}", p.masses.len(), p.n)));
    }
    let springs = p
        .springs
        .iter()
        .map(|&(j, k, kappa)| Ok((one_based("springs", j, p.n)?, one_based("springs", k, p.n)?, kappa)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let net = OscillatorNetwork::new(p.masses.clone(), springs)?;
    if p.initial.q.len() != p.n || p.initial.p.len() != p.n {
        return Err(schema("initial", format!("q and p need {} entries each", p.n)));
    }
    let x = ClassicalPhasePoint::new(p.initial.q.clone(), p.initial.p.clone())?;
    Ok((net, x))
}

pub fn pauli_sum(n: usize, terms: &[(String, f64)]) -> Result<PauliTermSum, CliError> {
    if n == 0 {
        return Err(schema("n", "need at least one qubit"));
    }
    PauliTermSum::parse(n, terms.iter().map(|(l, c)| (l.as_str(), *c))).map_err(|e| schema("hamiltonian", e))
}

pub fn qubit_state(n: usize, initial: &QubitInitial) -> Result<Vec<C64>, CliError> {
    match initial {
        QubitInitial::Zero => {
            let mut v = vec![c64(0.0, 0.0); 1usize.checked_shl(n as u32).unwrap_or(0)];
            if v.is_empty() {
                return Err(schema("n", "too many qubits for an explicit state"));
            }
            v[0] = c64(1.0, 0.0);
            Ok(v)
        }
        QubitInitial::Amplitudes(a) => {
            if a.len() != 1usize << n.min(63) {
                return Err(schema("initial.amplitudes", format!("{} amplitudes for {n} qubits", a.len())));
            }
            let v: Vec<C64> = a.iter().map(|&[re, im]| c64(re, im)).collect();
            Ok(shadowsim_core::linalg::normalize(&v).ok_or_else(|| schema("initial.amplitudes", "zero vector"))?.0)
        }
    }
}

pub fn circuit(n: usize, spec: &CircuitSpec) -> Result<Circuit, CliError> {
    if let Some(m) = spec.n {
        if m != n {
            return Err(schema("circuit.n", format!("{m} differs from n = {n}")));
        }
    }
    let mut c = Circuit::new(n);
    for (i, g) in spec.gates.iter().enumerate() {
        let field = format!("circuit.gates[{i}]");
        let qubits = g.qubits.iter().map(|&q| one_based(&field, q, n)).collect::<Result<Vec<_>, _>>()?;
        let kind = if g.name.eq_ignore_ascii_case("unitary") {
            let rows = g.matrix.as_ref().ok_or_else(|| schema(&field, "unitary gate without a matrix"))?;
            let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&[re, im]| c64(re, im)).collect()).collect();
            if rows.iter().any(|r| r.len() != rows.len()) {
                return Err(schema(&field, "matrix is not square"));
            }
            GateKind::Unitary(DenseMatrix::from_rows(&rows))
        } else {
            GateKind::from_name(&g.name).ok_or_else(|| schema(&field, format!("unknown gate {:?}", g.name)))?
        };
        c.push(Gate::new(kind, qubits).map_err(|e| schema(&field, e))?).map_err(|e| schema(&field, e))?;
    }
    Ok(c)
}

pub fn operator(n: usize, spec: &OperatorSpec) -> Result<PauliOperator, CliError> {
    let parse = |l: &str| PauliString::parse(l, n).map_err(|e| schema("operator", e));
    let op = match spec {
        OperatorSpec::Pauli(label) => PauliOperator::single(parse(label)?),
        OperatorSpec::Terms(terms) => {
            let terms = terms.iter().map(|(l, re, im)| Ok((parse(l)?, c64(*re, *im)))).collect::<Result<Vec<_>, CliError>>()?;
            PauliOperator::new(n, terms)?
        }
    };
    if op.is_empty() {
        return Err(schema("operator", "operator is zero"));
    }
    Ok(op)
}

//! The `run` subcommand: load a problem, evolve its shadow, optionally check
//! every time point against the dense oracle, and write `series.csv` and
//! `report.json`.

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shadowsim_core::bosons::{
    boson_shadow_hamiltonian, build_b, classical_oracle, quadratic_set_hamiltonian, quadratic_shadow_from_classical,
    shadow_from_classical, subset_energy_quadratic, subset_energy_quadratic_shots,
};
use shadowsim_core::correlators::{evolve_correlator, init_correlator};
use shadowsim_core::fermions::{
    fermion_shadow_hamiltonian, interacting_hamiltonian, jw_operator_set, pair_labels, product_state_shadow,
    subset_energy, subset_energy_shots, FermionBounds, MajoranaCoupling, VACUUM_PHASE,
};
use shadowsim_core::heisenberg::{
    evolve_operator_continuous, evolve_pauli_circuit, expand_in_set, pauli_support_metric, OperatorVector,
};
use shadowsim_core::linalg::{dense_expm, max_abs_diff, DenseMatrix};
use shadowsim_core::oracle::{evolve_full, shadow_from_state, PureState};
use shadowsim_core::qubits::{
    all_zero_shadow, one_local_labels, one_local_operator_set, one_local_shadow_hamiltonian, one_local_strings,
    PauliTermSum,
};
use shadowsim_core::shadow::{build_shadow_hamiltonian_dense, evolve_shadow, OperatorSet, ShadowHamiltonian};
use shadowsim_core::{c64, Error, C64};

use crate::problem::{self, BosonProblem, CorrelatedSystem, CorrelatorProblem, FermionProblem, HeisenbergProblem, Problem, QubitProblem};
use crate::report::{write_report, write_series, Bounds, Report, Row, Verification, VerifyPoint};
use crate::times::check_times;
use crate::{exit, CliError};

/// Default threshold on the oracle error when `--verify` is on.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    /// Overrides the times in the problem file.
    pub times: Option<Vec<f64>>,
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub verify: bool,
    pub verify_tol: f64,
    /// Estimate overlaps from this many shots instead of exactly.
    pub shots: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tol: 1e-10, seed: 0, verify: false, verify_tol: DEFAULT_VERIFY_TOL, shots: None }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Report,
    pub rows: Vec<Row>,
}

/// Reads the input, simulates, and writes both artifacts. Returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let text = match fs::read_to_string(&cfg.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", cfg.input.display());
            return exit::IO;
        }
    };
    let outcome = match Problem::parse(&text) {
        Ok(mut p) => {
            if let Some(t) = &cfg.times {
                set_times(&mut p, t.clone());
            }
            execute(&p, &cfg.settings)
        }
        Err(e) => failed("unknown", &cfg.settings, e),
    };
    if let Some(msg) = &outcome.report.error {
        eprintln!("error: {msg}");
    }
    if let Err(e) = write_artifacts(cfg, &outcome) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    outcome.exit_code
}

fn write_artifacts(cfg: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Io { path: cfg.output_dir.display().to_string(), source: e })?;
    write_series(&cfg.output_dir.join("series.csv"), &outcome.rows)?;
    write_report(&cfg.output_dir.join("report.json"), &outcome.report)
}

fn set_times(p: &mut Problem, t: Vec<f64>) {
    match p {
        Problem::Fermion(p) => p.times = t,
        Problem::Boson(p) => p.times = t,
        Problem::Qubit(p) => p.times = t,
        Problem::Correlator(p) => p.times = t,
        Problem::Heisenberg(p) => p.times = t,
    }
}

fn failed(scenario: &str, s: &Settings, e: CliError) -> Outcome {
    let mut report = Report::new(scenario, s.tol, s.seed, s.shots);
    report.exit_code = e.exit_code();
    report.status = "error".into();
    report.error = Some(e.to_string());
    Outcome { exit_code: e.exit_code(), report, rows: Vec::new() }
}

/// Simulates without touching the filesystem.
pub fn execute(p: &Problem, s: &Settings) -> Outcome {
    let mut run = Run { s, report: Report::new(p.scenario(), s.tol, s.seed, s.shots), rows: Vec::new(), rng: ChaCha8Rng::seed_from_u64(s.seed) };
    let result = check_settings(s).and_then(|_| {
        let times = if p.times().is_empty() { vec![0.0] } else { p.times().to_vec() };
        check_times(&times)?;
        match p {
            Problem::Fermion(f) => run.fermion(f, &times),
            Problem::Boson(b) => run.boson(b, &times),
            Problem::Qubit(q) => run.qubit(q, &times),
            Problem::Correlator(c) => run.correlator(c, &times),
            Problem::Heisenberg(h) => run.heisenberg(h, &times),
        }
    });
    let Run { mut report, rows, .. } = run;
    match result {
        Ok(()) => {
            let failed = report.verify.as_ref().is_some_and(|v| !(v.max_error <= v.threshold));
            if failed {
                report.status = "verification_failed".into();
                report.exit_code = exit::VERIFY;
            }
            Outcome { exit_code: report.exit_code, report, rows }
        }
        Err(e) => {
            if let CliError::Core(Error::Invariance { leakage, .. }) = &e {
                report.leakage = Some(*leakage);
                report.status = "refused".into();
            } else {
                report.status = "error".into();
            }
            report.exit_code = e.exit_code();
            report.error = Some(e.to_string());
            Outcome { exit_code: report.exit_code, report, rows }
        }
    }
}

fn check_settings(s: &Settings) -> Result<(), CliError> {
    if !(s.tol > 0.0) || !s.tol.is_finite() {
        return Err(CliError::Schema(format!("tol must be positive, got {}", s.tol)));
    }
    if !(s.verify_tol > 0.0) {
        return Err(CliError::Schema(format!("verify-tol must be positive, got {}", s.verify_tol)));
    }
    if s.shots == Some(0) {
        return Err(CliError::Schema("shots must be positive".into()));
    }
    Ok(())
}

struct Run<'a> {
    s: &'a Settings,
    report: Report,
    rows: Vec<Row>,
    rng: ChaCha8Rng,
}

impl Run<'_> {
    fn amplitudes(&mut self, time: f64, labels: &[String], values: &[C64]) {
        self.rows.extend(labels.iter().zip(values).map(|(l, &z)| Row::new(time, l.clone(), z)));
    }

    fn verified(&mut self, time: f64, max_error: f64) {
        let v = self.report.verify.get_or_insert_with(|| Verification {
            threshold: self.s.verify_tol,
            max_error: 0.0,
            points: Vec::new(),
        });
        v.max_error = if max_error.is_nan() { f64::NAN } else { v.max_error.max(max_error) };
        v.points.push(VerifyPoint { time, max_error });
    }

    /// Refuses a projected `H_S` whose leakage exceeds `tol`.
    fn require_invariant(&mut self, sh: &ShadowHamiltonian) -> Result<(), CliError> {
        self.report.hamiltonian(sh);
        if sh.leakage() > self.s.tol {
            return Err(Error::Invariance { leakage: sh.leakage(), tol: self.s.tol }.into());
        }
        Ok(())
    }

    fn fermion(&mut self, p: &FermionProblem, times: &[f64]) -> Result<(), CliError> {
        let n = p.n;
        let g = problem::coupling(n, &p.gamma)?;
        let quartic = problem::quartic_terms(n, &p.quartic)?;
        let occupied = problem::occupied_modes(n, &p.initial)?;
        let subsets = p.subsets.iter().map(|s| problem::majorana_subset(n, s)).collect::<Result<Vec<_>, _>>()?;
        let labels = pair_labels(n);

        let needs_dense = !quartic.is_empty() || self.s.verify;
        let dense = if needs_dense {
            let set = jw_operator_set(n)?;
            let h = interacting_hamiltonian(&g, &quartic)?;
            Some((set, h))
        } else {
            None
        };
        let sh = match &dense {
            Some((set, h)) if !quartic.is_empty() => {
                let sh = build_shadow_hamiltonian_dense(h, set, self.s.tol)?;
                self.require_invariant(&sh)?;
                sh
            }
            _ => {
                let sh = fermion_shadow_hamiltonian(&g)?;
                self.report.hamiltonian(&sh);
                sh
            }
        };
        let b = FermionBounds::measure(&g, &sh);
        self.report.bounds = Some(Bounds {
            hs_max: b.hs_max,
            max_bound: Some(4.0 * b.gamma_max),
            sparsity_bound: Some(2 * b.degree),
            degree: Some(b.degree),
            gamma_max: Some(b.gamma_max),
        });

        // physical phase, so the amplitudes are ⟨c_j c_k⟩/√A
        let st0 = product_state_shadow(n, &occupied)?.with_global_phase(VACUUM_PHASE);
        self.report.norm_a = Some(st0.norm_a());
        let psi0 = match &dense {
            Some(_) => Some(PureState::basis(1 << n, occupied.iter().map(|&j| 1usize << (n - 1 - j)).sum())?),
            None => None,
        };

        for &t in times {
            let st = evolve_shadow(&sh, &st0, t, self.s.tol)?;
            self.amplitudes(t, &labels, st.amplitudes());
            let mut energies = Vec::with_capacity(subsets.len());
            for (subset, raw) in subsets.iter().zip(&p.subsets) {
                let e = match self.s.shots {
                    Some(shots) => subset_energy_shots(&st, &g, subset, shots, &mut self.rng)?,
                    None => subset_energy(&st, &g, subset)?,
                };
                self.rows.push(Row::real(t, subset_label("energy", raw), e));
                energies.push(e);
            }
            if let (Some((set, h)), Some(psi0)) = (&dense, &psi0) {
                let psi_t = evolve_full(h, psi0, t)?;
                let oracle = shadow_from_state(&psi_t, set)?;
                let mut err = max_abs_diff(st.amplitudes(), oracle.amplitudes());
                if self.s.shots.is_none() {
                    for (subset, e) in subsets.iter().zip(&energies) {
                        let hj = jordan_wigner_subset(&g, subset)?;
                        err = err.max((psi_t.expectation(&hj)?.re - e).abs());
                    }
                }
                self.verified(t, err);
            }
        }
        Ok(())
    }

    fn boson(&mut self, p: &BosonProblem, times: &[f64]) -> Result<(), CliError> {
        let (net, x0) = problem::network(p)?;
        let fc = build_b(&net)?;
        let sh = boson_shadow_hamiltonian(&fc)?;
        self.report.hamiltonian(&sh);
        let m = fc.len();
        let subsets = p
            .subsets
            .iter()
            .map(|s| s.iter().map(|&k| one_based_term(k, m)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if !subsets.is_empty() && !p.quadratic {
            return Err(CliError::Schema("field `subsets`: subset energies need \"quadratic\": true".into()));
        }
        let labels = fc.labels();
        let st0 = shadow_from_classical(&fc, &x0)?;
        self.report.norm_a = Some(st0.norm_a());
        self.report.details.insert("energy".into(), net.energy(&x0)?);

        let quadratic = if p.quadratic {
            let sh2 = quadratic_set_hamiltonian(&sh)?;
            let st2 = quadratic_shadow_from_classical(&fc, &x0)?;
            self.report.details.insert("quadratic_set_size".into(), sh2.dim() as f64);
            let labels2: Vec<String> = labels.iter().flat_map(|a| labels.iter().map(move |b| format!("{a} * {b}"))).collect();
            Some((sh2, st2, labels2))
        } else {
            None
        };

        for &t in times {
            let st = evolve_shadow(&sh, &st0, t, self.s.tol)?;
            self.amplitudes(t, &labels, st.amplitudes());
            let mut err = 0.0f64;
            let x_t = if self.s.verify { Some(classical_oracle(&net, &x0, t)?) } else { None };
            if let Some(x_t) = &x_t {
                err = max_abs_diff(st.amplitudes(), shadow_from_classical(&fc, x_t)?.amplitudes());
            }
            if let Some((sh2, st2_0, labels2)) = &quadratic {
                let st2 = evolve_shadow(sh2, st2_0, t, self.s.tol)?;
                self.amplitudes(t, labels2, st2.amplitudes());
                let direct = match &x_t {
                    Some(x_t) => {
                        let oracle2 = quadratic_shadow_from_classical(&fc, x_t)?;
                        err = err.max(max_abs_diff(st2.amplitudes(), oracle2.amplitudes()));
                        Some(fc.operator_values(x_t)?)
                    }
                    None => None,
                };
                for (subset, raw) in subsets.iter().zip(&p.subsets) {
                    let e = match self.s.shots {
                        Some(shots) => subset_energy_quadratic_shots(&st2, subset, shots, &mut self.rng)?,
                        None => subset_energy_quadratic(&st2, subset)?,
                    };
                    self.rows.push(Row::real(t, subset_label("energy", raw), e));
                    if let (Some(o), None) = (&direct, self.s.shots) {
                        let exact: f64 = subset.iter().map(|&k| 0.5 * o[k].norm_sqr()).sum();
                        err = err.max((exact - e).abs());
                    }
                }
            }
            if self.s.verify {
                self.verified(t, err);
            }
        }
        Ok(())
    }

    /// `H_S` on the 1-local set: assembled directly when `H` is 1-local, else
    /// projected densely so the leakage can be reported before refusing.
    fn one_local(&mut self, h: &PauliTermSum, set: &mut Option<OperatorSet>) -> Result<ShadowHamiltonian, CliError> {
        if h.locality() <= 1 {
            let sh = one_local_shadow_hamiltonian(h)?;
            self.report.hamiltonian(&sh);
            return Ok(sh);
        }
        let s = match set.take() {
            Some(s) => s,
            None => one_local_operator_set(h.n())?,
        };
        let sh = build_shadow_hamiltonian_dense(&h.to_dense()?, &s, self.s.tol)?;
        *set = Some(s);
        self.require_invariant(&sh)?;
        Ok(sh)
    }

    fn qubit(&mut self, p: &QubitProblem, times: &[f64]) -> Result<(), CliError> {
        let n = p.n;
        let h = problem::pauli_sum(n, &p.hamiltonian)?;
        let mut set = None;
        let sh = self.one_local(&h, &mut set)?;
        self.report.bounds.get_or_insert_with(Bounds::default).sparsity_bound = Some(2);
        let needs_state = self.s.verify || !matches!(p.initial, problem::QubitInitial::Zero);
        let psi0 = if needs_state { Some(PureState::new(problem::qubit_state(n, &p.initial)?)?) } else { None };
        if psi0.is_some() && set.is_none() {
            set = Some(one_local_operator_set(n)?);
        }
        let st0 = match (&psi0, &set) {
            (Some(psi), Some(set)) => shadow_from_state(psi, set)?,
            _ => all_zero_shadow(n)?,
        };
        self.report.norm_a = Some(st0.norm_a());
        let labels = one_local_labels(n);
        let hd = if self.s.verify { Some(h.to_dense()?) } else { None };
        for &t in times {
            let st = evolve_shadow(&sh, &st0, t, self.s.tol)?;
            self.amplitudes(t, &labels, st.amplitudes());
            if let (Some(hd), Some(psi0), Some(set)) = (&hd, &psi0, &set) {
                let oracle = shadow_from_state(&evolve_full(hd, psi0, t)?, set)?;
                self.verified(t, max_abs_diff(st.amplitudes(), oracle.amplitudes()));
            }
        }
        Ok(())
    }

    fn correlator(&mut self, p: &CorrelatorProblem, times: &[f64]) -> Result<(), CliError> {
        let (hd, set, sh, psi) = match &p.system {
            CorrelatedSystem::Fermion { n, gamma, initial } => {
                let g = problem::coupling(*n, gamma)?;
                let occupied = problem::occupied_modes(*n, initial)?;
                let sh = fermion_shadow_hamiltonian(&g)?;
                self.report.hamiltonian(&sh);
                let psi = PureState::basis(1 << n, occupied.iter().map(|&j| 1usize << (n - 1 - j)).sum())?;
                (interacting_hamiltonian(&g, &[])?, jw_operator_set(*n)?, sh, psi)
            }
            CorrelatedSystem::Qubit { n, hamiltonian, initial } => {
                let h = problem::pauli_sum(*n, hamiltonian)?;
                let mut set = Some(one_local_operator_set(*n)?);
                let sh = self.one_local(&h, &mut set)?;
                let psi = PureState::new(problem::qubit_state(*n, initial)?)?;
                (h.to_dense()?, set.expect("set is kept"), sh, psi)
            }
        };
        let cs0 = init_correlator(&psi, &set)?;
        let scale = cs0.norm_a().sqrt();
        self.report.norm_a = Some(cs0.norm_a());
        let labels = set.labels();
        for &t in times {
            for &tp in times {
                let cs = evolve_correlator(&sh, &cs0, t, tp, self.s.tol)?;
                let pair_labels: Vec<String> =
                    labels.iter().flat_map(|a| labels.iter().map(move |b| format!("{a} * {b} @ {tp}"))).collect();
                self.amplitudes(t, &pair_labels, cs.amplitudes());
                if self.s.verify {
                    let oracle = two_time(&hd, &set, &psi, t, tp)?;
                    let oracle: Vec<C64> = oracle.iter().map(|z| z / scale).collect();
                    self.verified(t, max_abs_diff(cs.amplitudes(), &oracle));
                }
            }
        }
        Ok(())
    }

    fn heisenberg(&mut self, p: &HeisenbergProblem, times: &[f64]) -> Result<(), CliError> {
        let n = p.n;
        let op = problem::operator(n, &p.operator)?;
        match (&p.circuit, &p.hamiltonian) {
            (Some(spec), None) => {
                let c = problem::circuit(n, spec)?;
                let out = evolve_pauli_circuit(&c, &op)?;
                let depth = c.len() as f64;
                for (string, &z) in out.terms() {
                    self.rows.push(Row::new(depth, string.label(), z));
                }
                let hist = pauli_support_metric(&out)?;
                self.report.details.insert("terms".into(), out.len() as f64);
                self.report.details.insert("support".into(), hist.support.len() as f64);
                self.report.details.insert("gates".into(), depth);
                if self.s.verify {
                    let u = c.unitary()?;
                    let exact = u.adjoint().try_matmul(&op.to_dense()?)?.try_matmul(&u)?;
                    self.verified(depth, exact.max_abs_diff(&out.to_dense()?));
                }
                Ok(())
            }
            (None, Some(terms)) => {
                let h = problem::pauli_sum(n, terms)?;
                let mut set = None;
                let sh = self.one_local(&h, &mut set)?;
                let strings: Vec<(C64, _)> = one_local_strings(n).into_iter().map(|s| (c64(1.0, 0.0), s)).collect();
                let outside: f64 = op.terms().filter(|(s, _)| s.weight() > 1).map(|(_, z)| z.norm_sqr()).sum();
                if outside > 0.0 {
                    let total: f64 = op.terms().map(|(_, z)| z.norm_sqr()).sum();
                    return Err(Error::Invariance { leakage: (outside / total).sqrt(), tol: self.s.tol }.into());
                }
                let z0 = op.to_vector(&strings)?;
                let z0 = OperatorVector::new(z0)?;
                let labels = one_local_labels(n);
                let (hd, dense_op, set) = if self.s.verify {
                    let set = match set {
                        Some(s) => s,
                        None => one_local_operator_set(n)?,
                    };
                    (Some(h.to_dense()?), Some(op.to_dense()?), Some(set))
                } else {
                    (None, None, None)
                };
                for &t in times {
                    let z = evolve_operator_continuous(&sh, &z0, t, self.s.tol)?;
                    self.amplitudes(t, &labels, z.coefficients());
                    if let (Some(hd), Some(o), Some(set)) = (&hd, &dense_op, &set) {
                        let u = dense_expm(hd, t)?;
                        let x = u.adjoint().try_matmul(o)?.try_matmul(&u)?;
                        let (coeffs, _) = expand_in_set(&x, set)?;
                        self.verified(t, max_abs_diff(z.coefficients(), &coeffs));
                    }
                }
                Ok(())
            }
            _ => Err(CliError::Schema("heisenberg problems need exactly one of `circuit` and `hamiltonian`".into())),
        }
    }
}

fn subset_label(prefix: &str, raw: &[usize]) -> String {
    let idx: Vec<String> = raw.iter().map(usize::to_string).collect();
    format!("{prefix} {{{}}}", idx.join(","))
}

fn one_based_term(k: usize, m: usize) -> Result<usize, CliError> {
    if k == 0 || k > m {
        return Err(CliError::Schema(format!("field `subsets`: term {k} outside 1..={m}")));
    }
    Ok(k - 1)
}

/// Dense `H_J = Σ_{j,k∈J} γ_jk c_j c_k`.
pub fn jordan_wigner_subset(g: &MajoranaCoupling, subset: &[usize]) -> Result<DenseMatrix, CliError> {
    let entries = g
        .gamma()
        .triplets()
        .iter()
        .filter(|(j, k, _)| subset.contains(j) && subset.contains(k))
        .copied()
        .collect::<Vec<_>>();
    let gj = MajoranaCoupling::from_triplets(g.n(), entries)?;
    Ok(interacting_hamiltonian(&gj, &[])?)
}

/// `⟨ψ| O_a(t) O_b(t′) |ψ⟩` by dense conjugation, in row-major `(a, b)` order.
pub fn two_time(h: &DenseMatrix, set: &OperatorSet, psi: &PureState, t: f64, tp: f64) -> Result<Vec<C64>, CliError> {
    let ops = set.dense_ops().ok_or_else(|| Error::NotApplicable("operator set has no matrices".into()))?;
    let heis = |time: f64| -> Result<Vec<DenseMatrix>, CliError> {
        let u = dense_expm(h, time)?;
        let ud = u.adjoint();
        ops.iter().map(|o| Ok(ud.try_matmul(o)?.try_matmul(&u)?)).collect()
    };
    let (a, b) = (heis(t)?, heis(tp)?);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            out.push(psi.expectation(&x.try_matmul(y)?)?);
        }
    }
    Ok(out)
}

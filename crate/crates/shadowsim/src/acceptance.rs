//! The acceptance matrix: one check per criterion, fixed seeds, tolerances
//! pinned below. Shared by `shadowsim verify` and the `acceptance` test target.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowsim_core::bosons::{
    boson_shadow_hamiltonian, build_b, classical_oracle, quadratic_set_hamiltonian, quadratic_shadow_from_classical,
    shadow_from_classical, subset_energy_quadratic, subset_energy_quadratic_shots, ClassicalPhasePoint, OscillatorNetwork,
};
use shadowsim_core::correlators::{evolve_correlator, init_correlator};
use shadowsim_core::fermions::{
    fermion_shadow_hamiltonian, interacting_hamiltonian, jordan_wigner, jw_operator_set, product_state_shadow,
    random_coupling, subset_energy, subset_energy_shots, vacuum_shadow, FermionBounds, MajoranaCoupling, QuarticTerm,
    VACUUM_PHASE,
};
use shadowsim_core::heisenberg::{
    evolve_operator_continuous, evolve_pauli_circuit, expand_in_set, pauli_support_metric, random_brickwork,
    OperatorVector, PauliOperator,
};
use shadowsim_core::linalg::{dense_expm, eigvalsh, max_abs_diff, phase_aligned_distance, DenseMatrix};
use shadowsim_core::oracle::{evolve_full, shadow_from_state, vec_state, DensityMatrix, PureState};
use shadowsim_core::qubits::{
    full_pauli_set, one_local_operator_set, one_local_shadow_hamiltonian, orthonormal_basis_vs,
    swap_test_conjugate_overlap, Pauli, PauliString, PauliTermSum,
};
use shadowsim_core::shadow::{build_shadow_hamiltonian_dense, evolve_shadow, OperatorSet, ShadowHamiltonian};
use shadowsim_core::{c64, C64};

use crate::problem::{FermionInitial, FermionProblem, Problem};
use crate::run::{execute, jordan_wigner_subset, two_time, Settings};
use crate::exit;

pub const SCHRODINGER_TOL: f64 = 1e-8;
pub const SCHRODINGER_TIMES: [f64; 3] = [0.5, 2.0, 10.0];
pub const SCHRODINGER_INSTANCES: usize = 20;
pub const SCHRODINGER_BUDGET: Duration = Duration::from_secs(60);
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Claimed factor in `‖H_S‖_max ≤ c ‖Γ‖_max`.
pub const FERMION_MAX_FACTOR: f64 = 2.0;
pub const FERMION_BOUND_SIZES: [usize; 5] = [3, 10, 40, 100, 200];
pub const VACUUM_TOL: f64 = 1e-10;
pub const BOSON_TOL: f64 = 1e-8;
pub const FREQUENCY_TOL: f64 = 1e-10;
pub const ENERGY_TOL: f64 = 1e-8;
pub const SHOTS: u64 = 10_000;
/// Shot-mode energies must lie within `SHOT_SIGMAS / √shots` (in units of the overlap prefactor).
pub const SHOT_SIGMAS: f64 = 4.0;
pub const LEMMA_TOL: f64 = 1e-10;
pub const LEMMA_STATES: usize = 50;
pub const SWAP_REAL_MIN: f64 = 0.95;
pub const SWAP_PHASED_MAX: f64 = 0.2;
pub const CORRELATOR_TOL: f64 = 1e-8;
pub const OPERATOR_TOL: f64 = 1e-8;
pub const LIGHT_CONE_CIRCUITS: usize = 100;
pub const QUADRATIC_LEAKAGE_MAX: f64 = 1e-10;
pub const QUARTIC_LEAKAGE_MIN: f64 = 0.1;

/// Criteria that fail on a faithful implementation; the claimed bound does
/// not hold for the stated construction.
pub const KNOWN_UNATTAINABLE: &[u32] = &[3];

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "shadow evolution equals oracle"),
    (2, "shadow Hamiltonian is Hermitian"),
    (3, "fermion sparsity and max-norm bounds"),
    (4, "vacuum shadow and particle-hole sign"),
    (5, "boson classical correspondence"),
    (6, "subset energies"),
    (7, "orthonormal-basis lemma"),
    (8, "swap-test separation"),
    (9, "two-time correlators"),
    (10, "operator evolution"),
    (11, "leakage soundness"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {:<38} {} ({:.2}s)", self.id, self.name, self.detail, self.elapsed.as_secs_f64())
    }
}

/// Runs the suite. `perturb` shifts the golden values of one criterion so
/// that it, and only it, must fail.
pub fn run_suite(perturb: Option<u32>) -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, perturb)).collect()
}

pub fn run_criterion(id: u32, perturb: Option<u32>) -> Outcome {
    let ctx = Ctx { perturbed: perturb == Some(id) };
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown criterion");
    let start = Instant::now();
    let result = match id {
        1 => schrodinger(&ctx),
        2 => hermiticity(&ctx),
        3 => fermion_bounds(&ctx),
        4 => vacuum(&ctx),
        5 => bosons(&ctx),
        6 => subset_energies(&ctx),
        7 => lemma(&ctx),
        8 => swap_test(&ctx),
        9 => correlators(&ctx),
        10 => operator_evolution(&ctx),
        11 => leakage(&ctx),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(v) => (v.passed, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, name, passed, detail, elapsed }
}

struct Ctx {
    perturbed: bool,
}

impl Ctx {
    /// Golden value, shifted by `1e-3` when this criterion is perturbed.
    fn golden(&self, v: f64) -> f64 {
        if self.perturbed {
            v + 1e-3
        } else {
            v
        }
    }

    fn golden_vec(&self, v: Vec<C64>) -> Vec<C64> {
        v.into_iter().map(|z| C64::new(self.golden(z.re), z.im)).collect()
    }
}

struct Verdict {
    passed: bool,
    detail: String,
}

type Check = Result<Verdict, String>;

fn verdict(passed: bool, detail: String) -> Check {
    Ok(Verdict { passed, detail })
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(dim: usize, r: &mut ChaCha8Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| c64(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    shadowsim_core::linalg::normalize(&v).expect("random vector is non-zero").0
}

fn random_one_local(n: usize, r: &mut ChaCha8Rng) -> PauliTermSum {
    let terms: Vec<(PauliString, f64)> = (0..n)
        .flat_map(|q| [Pauli::X, Pauli::Y, Pauli::Z].map(|p| PauliString::single(n, q, p).expect("qubit in range")))
        .map(|p| (p, r.gen_range(-1.0..1.0)))
        .collect();
    PauliTermSum::new(n, terms).expect("valid terms")
}

fn random_network(n: usize, r: &mut ChaCha8Rng) -> (OscillatorNetwork, ClassicalPhasePoint) {
    let masses = (0..n).map(|_| r.gen_range(0.5..2.0)).collect();
    let mut springs: Vec<(usize, usize, f64)> = (0..n.saturating_sub(1)).map(|j| (j, j + 1, r.gen_range(0.1..1.5))).collect();
    springs.push((0, 0, r.gen_range(0.1..1.0)));
    if n > 2 {
        springs.push((0, n - 1, r.gen_range(0.1..1.0)));
    }
    let net = OscillatorNetwork::new(masses, springs).expect("valid network");
    let x = ClassicalPhasePoint::new((0..n).map(|_| r.gen_range(-1.0..1.0)).collect(), (0..n).map(|_| r.gen_range(-1.0..1.0)).collect())
        .expect("finite phase point");
    (net, x)
}

/// Shadow Hamiltonians of the sweep, with the worst oracle error over all of them.
struct Sweep {
    max_error: f64,
    hamiltonians: Vec<ShadowHamiltonian>,
    elapsed: Duration,
}

fn sweep(ctx: &Ctx) -> Result<Sweep, String> {
    let start = Instant::now();
    let mut r = rng(1);
    let mut max_error = 0.0f64;
    let mut hamiltonians = Vec::new();
    for i in 0..SCHRODINGER_INSTANCES {
        // free fermions
        let n = 1 + i % 6;
        let g = random_coupling(n, 3.min(2 * n - 1), 1.0, &mut r).map_err(e)?;
        let set = jw_operator_set(n).map_err(e)?;
        let h = jordan_wigner(&g).map_err(e)?;
        let sh = fermion_shadow_hamiltonian(&g).map_err(e)?;
        let psi = PureState::new(random_unit(1 << n, &mut r)).map_err(e)?;
        let st0 = shadow_from_state(&psi, &set).map_err(e)?;
        for t in SCHRODINGER_TIMES {
            let st = evolve_shadow(&sh, &st0, t, 1e-12).map_err(e)?;
            let oracle = shadow_from_state(&evolve_full(&h, &psi, t).map_err(e)?, &set).map_err(e)?;
            max_error = max_error.max(max_abs_diff(st.amplitudes(), &ctx.golden_vec(oracle.into_amplitudes())));
        }
        hamiltonians.push(sh);

        // 1-local qubits
        let h = random_one_local(n, &mut r);
        let set = one_local_operator_set(n).map_err(e)?;
        let sh = one_local_shadow_hamiltonian(&h).map_err(e)?;
        let hd = h.to_dense().map_err(e)?;
        let psi = PureState::new(random_unit(1 << n, &mut r)).map_err(e)?;
        let st0 = shadow_from_state(&psi, &set).map_err(e)?;
        for t in SCHRODINGER_TIMES {
            let st = evolve_shadow(&sh, &st0, t, 1e-12).map_err(e)?;
            let oracle = shadow_from_state(&evolve_full(&hd, &psi, t).map_err(e)?, &set).map_err(e)?;
            max_error = max_error.max(max_abs_diff(st.amplitudes(), &ctx.golden_vec(oracle.into_amplitudes())));
        }
        hamiltonians.push(sh);

        // coupled oscillators
        let (net, x0) = random_network(1 + i % 8, &mut r);
        let fc = build_b(&net).map_err(e)?;
        let sh = boson_shadow_hamiltonian(&fc).map_err(e)?;
        let st0 = shadow_from_classical(&fc, &x0).map_err(e)?;
        for t in SCHRODINGER_TIMES {
            let st = evolve_shadow(&sh, &st0, t, 1e-12).map_err(e)?;
            let oracle = shadow_from_classical(&fc, &classical_oracle(&net, &x0, t).map_err(e)?).map_err(e)?;
            max_error = max_error.max(max_abs_diff(st.amplitudes(), &ctx.golden_vec(oracle.into_amplitudes())));
        }
        hamiltonians.push(sh);
    }
    Ok(Sweep { max_error, hamiltonians, elapsed: start.elapsed() })
}

fn schrodinger(ctx: &Ctx) -> Check {
    let s = sweep(ctx)?;
    let passed = s.max_error <= SCHRODINGER_TOL && s.elapsed <= SCHRODINGER_BUDGET;
    verdict(
        passed,
        format!(
            "{} instances x {} times, max error {:.2e} (tol {SCHRODINGER_TOL:.0e}), sweep {:.1}s",
            s.hamiltonians.len(),
            SCHRODINGER_TIMES.len(),
            s.max_error,
            s.elapsed.as_secs_f64()
        ),
    )
}

fn hermiticity(ctx: &Ctx) -> Check {
    let s = sweep(&Ctx { perturbed: false })?;
    let worst = s.hamiltonians.iter().map(ShadowHamiltonian::hermitian_defect).fold(0.0, f64::max);
    let worst = ctx.golden(worst);
    verdict(worst <= HERMITIAN_TOL, format!("{} H_S, worst defect {worst:.2e} (tol {HERMITIAN_TOL:.0e})", s.hamiltonians.len()))
}

fn fermion_bounds(ctx: &Ctx) -> Check {
    let mut r = rng(3);
    let (mut cases, mut sparse_bad, mut max_bad) = (0, 0, 0);
    let mut worst_ratio = 0.0f64;
    for d in [2, 3, 4] {
        for n in FERMION_BOUND_SIZES {
            for _ in 0..2 {
                let g = random_coupling(n, d, 1.0, &mut r).map_err(e)?;
                let b = FermionBounds::measure(&g, &fermion_shadow_hamiltonian(&g).map_err(e)?);
                cases += 1;
                let limit = if ctx.perturbed { 2 * b.degree - 1 } else { 2 * b.degree };
                if b.sparsity > limit {
                    sparse_bad += 1;
                }
                if !b.max_within(FERMION_MAX_FACTOR) {
                    max_bad += 1;
                }
                worst_ratio = worst_ratio.max(b.hs_max / b.gamma_max);
            }
        }
    }
    verdict(
        sparse_bad == 0 && max_bad == 0,
        format!(
            "{cases} couplings up to n = 200: sparsity violations {sparse_bad}, max-norm violations {max_bad} \
             (worst |H_S|max/|Gamma|max = {worst_ratio:.3}, claimed {FERMION_MAX_FACTOR})"
        ),
    )
}

fn vacuum(ctx: &Ctx) -> Check {
    let mut worst = 0.0f64;
    for n in 1..=5 {
        let set = jw_operator_set(n).map_err(e)?;
        for mask in 0..1usize << n {
            let occupied: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let index = occupied.iter().map(|&j| 1usize << (n - 1 - j)).sum();
            let oracle = shadow_from_state(&PureState::basis(1 << n, index).map_err(e)?, &set).map_err(e)?;
            let built = product_state_shadow(n, &occupied).map_err(e)?;
            let golden = ctx.golden_vec(oracle.into_amplitudes());
            worst = worst.max(phase_aligned_distance(&golden, built.amplitudes()));
            if mask == 0 {
                let physical = vacuum_shadow(n).map_err(e)?.with_global_phase(VACUUM_PHASE);
                worst = worst.max(max_abs_diff(&golden, physical.amplitudes()));
            }
        }
    }
    let mut sign_bad = 0;
    for n in 1..=8 {
        for mask in 0..1usize << n {
            let occupied: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let holes: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 0).collect();
            let a = product_state_shadow(n, &occupied).map_err(e)?;
            let b = product_state_shadow(n, &holes).map_err(e)?;
            if a.amplitudes().iter().zip(b.amplitudes()).any(|(x, y)| *x != -*y) {
                sign_bad += 1;
            }
        }
    }
    verdict(
        worst <= VACUUM_TOL && sign_bad == 0,
        format!("product states n <= 5: error {worst:.2e} (tol {VACUUM_TOL:.0e}); particle-hole sign mismatches {sign_bad}"),
    )
}

fn bosons(ctx: &Ctx) -> Check {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let (net, x0) = random_network(n, &mut r);
        let fc = build_b(&net).map_err(e)?;
        let sh = boson_shadow_hamiltonian(&fc).map_err(e)?;
        let st0 = shadow_from_classical(&fc, &x0).map_err(e)?;
        for t in SCHRODINGER_TIMES {
            let st = evolve_shadow(&sh, &st0, t, 1e-12).map_err(e)?;
            let oracle = shadow_from_classical(&fc, &classical_oracle(&net, &x0, t).map_err(e)?).map_err(e)?;
            worst = worst.max(max_abs_diff(st.amplitudes(), &ctx.golden_vec(oracle.into_amplitudes())));
        }
    }
    let mut freq = 0.0f64;
    for (m, kappa) in [(1.0, 1.0), (2.0, 0.5), (0.3, 4.0), (1.7, 2.9)] {
        let net = OscillatorNetwork::new(vec![m], [(0, 0, kappa)]).map_err(e)?;
        let sh = boson_shadow_hamiltonian(&build_b(&net).map_err(e)?).map_err(e)?;
        let mut ev = eigvalsh(&sh.hs().to_dense()).map_err(e)?;
        ev.sort_by(f64::total_cmp);
        let w = ctx.golden((kappa / m).sqrt());
        freq = freq.max((ev[0] + w).abs()).max((ev[1] - w).abs());
    }
    verdict(
        worst <= BOSON_TOL && freq <= FREQUENCY_TOL,
        format!("n <= 8 trajectory error {worst:.2e} (tol {BOSON_TOL:.0e}); single-oscillator eigenvalue error {freq:.2e} (tol {FREQUENCY_TOL:.0e})"),
    )
}

fn subset_energies(ctx: &Ctx) -> Check {
    let mut r = rng(6);
    let (mut exact_err, mut shot_excess) = (0.0f64, f64::NEG_INFINITY);
    let shot_band = SHOT_SIGMAS / (SHOTS as f64).sqrt();

    for n in [2, 3, 4] {
        let g = random_coupling(n, 3, 1.0, &mut r).map_err(e)?;
        let set = jw_operator_set(n).map_err(e)?;
        let h = jordan_wigner(&g).map_err(e)?;
        let sh = fermion_shadow_hamiltonian(&g).map_err(e)?;
        let psi = PureState::new(random_unit(1 << n, &mut r)).map_err(e)?;
        let st0 = shadow_from_state(&psi, &set).map_err(e)?;
        for t in [0.0, 0.5, 2.0] {
            let st = evolve_shadow(&sh, &st0, t, 1e-12).map_err(e)?;
            let psi_t = evolve_full(&h, &psi, t).map_err(e)?;
            for _ in 0..3 {
                let subset = random_subset(2 * n, &mut r);
                if coupled_norm(&g, &subset) == 0.0 {
                    continue;
                }
                let oracle = ctx.golden(psi_t.expectation(&jordan_wigner_subset(&g, &subset).map_err(e)?).map_err(e)?.re);
                exact_err = exact_err.max((subset_energy(&st, &g, &subset).map_err(e)? - oracle).abs());
                let est = subset_energy_shots(&st, &g, &subset, SHOTS, &mut r).map_err(e)?;
                let prefactor = coupled_norm(&g, &subset) * st.norm_a().sqrt();
                shot_excess = shot_excess.max((est - oracle).abs() / prefactor - shot_band);
            }
        }
    }

    for n in [1, 3, 5] {
        let (net, x0) = random_network(n, &mut r);
        let fc = build_b(&net).map_err(e)?;
        let sh2 = quadratic_set_hamiltonian(&boson_shadow_hamiltonian(&fc).map_err(e)?).map_err(e)?;
        let st2_0 = quadratic_shadow_from_classical(&fc, &x0).map_err(e)?;
        for t in [0.0, 0.5, 2.0] {
            let st2 = evolve_shadow(&sh2, &st2_0, t, 1e-12).map_err(e)?;
            let o = fc.operator_values(&classical_oracle(&net, &x0, t).map_err(e)?).map_err(e)?;
            for _ in 0..3 {
                let subset = random_subset(fc.len(), &mut r);
                let oracle = ctx.golden(subset.iter().map(|&k| 0.5 * o[k].norm_sqr()).sum());
                exact_err = exact_err.max((subset_energy_quadratic(&st2, &subset).map_err(e)? - oracle).abs());
                let est = subset_energy_quadratic_shots(&st2, &subset, SHOTS, &mut r).map_err(e)?;
                let prefactor = 0.5 * (st2.norm_a() * subset.len() as f64).sqrt();
                shot_excess = shot_excess.max((est - oracle).abs() / prefactor - shot_band);
            }
        }
    }
    verdict(
        exact_err <= ENERGY_TOL && shot_excess <= 0.0,
        format!(
            "exact-overlap error {exact_err:.2e} (tol {ENERGY_TOL:.0e}); shot mode worst margin {:.2e} inside {shot_band:.2e}",
            -shot_excess
        ),
    )
}

/// Non-empty random subset of `0..len`, sorted.
fn random_subset(len: usize, r: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..len).filter(|_| r.gen_bool(0.6)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// `‖(2γ_jk)_{j<k ∈ J}‖₂`, the prefactor of the fermionic subset overlap.
fn coupled_norm(g: &MajoranaCoupling, subset: &[usize]) -> f64 {
    g.gamma()
        .triplets()
        .iter()
        .filter(|(j, k, _)| j < k && subset.contains(j) && subset.contains(k))
        .map(|(_, _, z)| 4.0 * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn lemma(ctx: &Ctx) -> Check {
    let mut r = rng(7);
    let (mut pure_err, mut mixed_err, mut purity_err) = (0.0f64, 0.0f64, 0.0f64);
    let sets: Vec<(OperatorSet, DenseMatrix)> = (1..=3)
        .map(|n| {
            let set = full_pauli_set(n).map_err(e)?;
            let v = orthonormal_basis_vs(set.dense_ops().expect("dense set"), (1usize << n) as f64).map_err(e)?;
            Ok((set, v))
        })
        .collect::<Result<_, String>>()?;
    for i in 0..LEMMA_STATES {
        let n = 1 + i % 3;
        let (set, v) = &sets[n - 1];
        let psi = PureState::new(random_unit(1 << n, &mut r)).map_err(e)?;
        let rho = psi.to_density().map_err(e)?;
        let mapped = v.matvec(&vec_state(&rho).map_err(e)?).map_err(e)?;
        let golden = ctx.golden_vec(shadow_from_state(&psi, set).map_err(e)?.into_amplitudes());
        pure_err = pure_err.max(max_abs_diff(&mapped, &golden));

        // mixtures: V_S maps vec(ρ) linearly, so the shadow of a mixture is the
        // mixture of unnormalised shadows
        let other = PureState::new(random_unit(1 << n, &mut r)).map_err(e)?.to_density().map_err(e)?;
        let p = r.gen_range(0.1..0.9);
        let mix = DensityMatrix::mixture(&[(p, &rho), (1.0 - p, &other)]).map_err(e)?;
        let st = shadow_from_state(&mix, set).map_err(e)?;
        let mapped = v.matvec(&vec_state(&mix).map_err(e)?).map_err(e)?;
        mixed_err = mixed_err.max(max_abs_diff(&mapped, st.amplitudes()));
        let lin: Vec<C64> = shadow_from_state(&rho, set)
            .map_err(e)?
            .expectations()
            .iter()
            .zip(shadow_from_state(&other, set).map_err(e)?.expectations())
            .map(|(a, b)| a * p + b * (1.0 - p))
            .collect();
        mixed_err = mixed_err.max(max_abs_diff(&lin, &st.expectations()));
        purity_err = purity_err.max((st.norm_a() - ctx.golden((1usize << n) as f64 * mix.purity())).abs());
    }
    verdict(
        pure_err <= LEMMA_TOL && mixed_err <= LEMMA_TOL && purity_err <= LEMMA_TOL,
        format!("{LEMMA_STATES} states n <= 3: pure {pure_err:.2e}, mixed {mixed_err:.2e}, normA {purity_err:.2e} (tol {LEMMA_TOL:.0e})"),
    )
}

fn swap_test(ctx: &Ctx) -> Check {
    let mut r = rng(8);
    let mut real_min = f64::INFINITY;
    for n in 1..=3 {
        for _ in 0..4 {
            let v: Vec<C64> = (0..1 << n).map(|_| c64(r.gen_range(-1.0..1.0), 0.0)).collect();
            let psi = PureState::normalized(&v).map_err(e)?;
            real_min = real_min.min(swap_test_conjugate_overlap(&psi, SHOTS, &mut r).map_err(e)?);
        }
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phased = PureState::new(vec![c64(s, 0.0), c64(0.0, s)]).map_err(e)?;
    let phased_est = swap_test_conjugate_overlap(&phased, SHOTS, &mut r).map_err(e)?;
    // perturbed: the golden upper bound sits just below the estimate
    let hi = if ctx.perturbed { phased_est - 1e-3 } else { SWAP_PHASED_MAX };
    verdict(
        real_min >= SWAP_REAL_MIN && phased_est <= hi,
        format!("real states min {real_min:.4} (>= {SWAP_REAL_MIN}); (|0>+i|1>)/sqrt2 {phased_est:.4} (<= {SWAP_PHASED_MAX}); {SHOTS} shots"),
    )
}

fn correlators(ctx: &Ctx) -> Check {
    let mut r = rng(9);
    let h = PauliTermSum::parse(2, [("X1", 0.3), ("Z1", 1.1), ("Y2", -0.6), ("Z2", 0.2), ("X2", 0.45)]).map_err(e)?;
    let qubit = (h.to_dense().map_err(e)?, one_local_operator_set(2).map_err(e)?, one_local_shadow_hamiltonian(&h).map_err(e)?);
    let g = random_coupling(3, 3, 1.0, &mut r).map_err(e)?;
    let fermion = (jordan_wigner(&g).map_err(e)?, jw_operator_set(3).map_err(e)?, fermion_shadow_hamiltonian(&g).map_err(e)?);
    let mut worst = 0.0f64;
    let mut points = 0;
    for (hd, set, sh) in [qubit, fermion] {
        let psi = PureState::new(random_unit(hd.rows(), &mut r)).map_err(e)?;
        let cs0 = init_correlator(&psi, &set).map_err(e)?;
        for t in [0.0, 0.7, 1.5] {
            for tp in [0.0, 1.0, 2.0] {
                let cs = evolve_correlator(&sh, &cs0, t, tp, 1e-12).map_err(e)?;
                let oracle = ctx.golden_vec(two_time(&hd, &set, &psi, t, tp).map_err(e)?);
                worst = worst.max(max_abs_diff(&cs.expectations(), &oracle));
                points += 1;
            }
        }
    }
    verdict(worst <= CORRELATOR_TOL, format!("{points} grid points, max error {worst:.2e} (tol {CORRELATOR_TOL:.0e})"))
}

fn operator_evolution(ctx: &Ctx) -> Check {
    let mut r = rng(10);
    // continuous: 1-local qubits and the fermion pair set
    let mut cont = 0.0f64;
    for n in [2, 3] {
        let h = random_one_local(n, &mut r);
        let set = one_local_operator_set(n).map_err(e)?;
        let sh = one_local_shadow_hamiltonian(&h).map_err(e)?;
        cont = cont.max(continuous_error(ctx, &h.to_dense().map_err(e)?, &set, &sh, &mut r)?);
        let g = random_coupling(n, 3, 1.0, &mut r).map_err(e)?;
        let set = jw_operator_set(n).map_err(e)?;
        let sh = fermion_shadow_hamiltonian(&g).map_err(e)?;
        cont = cont.max(continuous_error(ctx, &jordan_wigner(&g).map_err(e)?, &set, &sh, &mut r)?);
    }

    let mut clifford_bad = 0;
    for _ in 0..50 {
        let n = r.gen_range(1..=5);
        let c = random_brickwork(n, r.gen_range(1..=6), true, &mut r).map_err(e)?;
        let p = [Pauli::X, Pauli::Y, Pauli::Z][r.gen_range(0..3)];
        let op = PauliOperator::single(PauliString::single(n, r.gen_range(0..n), p).map_err(e)?);
        let out = evolve_pauli_circuit(&c, &op).map_err(e)?;
        let signed = out.len() == 1
            && out.terms().all(|(_, z)| (z.re.abs() - 1.0).abs() <= 1e-12 && z.im.abs() <= 1e-12);
        if !signed {
            clifford_bad += 1;
        }
    }

    let mut cone_bad = 0;
    for _ in 0..LIGHT_CONE_CIRCUITS {
        let n = r.gen_range(2..=5);
        let depth = r.gen_range(1..=5);
        let c = random_brickwork(n, depth, false, &mut r).map_err(e)?;
        let origin = r.gen_range(0..n);
        let p = [Pauli::X, Pauli::Y, Pauli::Z][r.gen_range(0..3)];
        let out = evolve_pauli_circuit(&c, &PauliOperator::single(PauliString::single(n, origin, p).map_err(e)?)).map_err(e)?;
        let radius = pauli_support_metric(&out).map_err(e)?.radius(origin);
        let bound = if ctx.perturbed { depth - 1 } else { depth };
        if radius > bound {
            cone_bad += 1;
        }
    }
    verdict(
        cont <= OPERATOR_TOL && clifford_bad == 0 && cone_bad == 0,
        format!(
            "continuous error {cont:.2e} (tol {OPERATOR_TOL:.0e}); non-Pauli Clifford outputs {clifford_bad}/50; \
             light-cone violations {cone_bad}/{LIGHT_CONE_CIRCUITS}"
        ),
    )
}

fn continuous_error(ctx: &Ctx, hd: &DenseMatrix, set: &OperatorSet, sh: &ShadowHamiltonian, r: &mut ChaCha8Rng) -> Result<f64, String> {
    let z0 = OperatorVector::new((0..set.len()).map(|_| c64(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()).map_err(e)?;
    let o = z0.to_dense(set).map_err(e)?;
    let mut worst = 0.0f64;
    for t in [0.3, 1.0, 4.0] {
        let z = evolve_operator_continuous(sh, &z0, t, 1e-12).map_err(e)?;
        let u = dense_expm(hd, t).map_err(e)?;
        let x = u.adjoint().try_matmul(&o).map_err(e)?.try_matmul(&u).map_err(e)?;
        let (coeffs, leak) = expand_in_set(&x, set).map_err(e)?;
        worst = worst.max(max_abs_diff(z.coefficients(), &ctx.golden_vec(coeffs))).max(leak);
    }
    Ok(worst)
}

fn leakage(ctx: &Ctx) -> Check {
    let mut r = rng(11);
    let (mut quad_max, mut quartic_min) = (0.0f64, f64::INFINITY);
    let mut refusals = 0;
    let sizes = [3, 4, 5];
    for n in sizes {
        let g = random_coupling(n, 3, 1.0, &mut r).map_err(e)?;
        let set = jw_operator_set(n).map_err(e)?;
        let quad = build_shadow_hamiltonian_dense(&jordan_wigner(&g).map_err(e)?, &set, QUADRATIC_LEAKAGE_MAX).map_err(e)?;
        quad_max = quad_max.max(ctx.golden(quad.leakage()));

        let mut modes = [0usize; 4];
        let mut pool: Vec<usize> = (0..2 * n).collect();
        for m in &mut modes {
            *m = pool.swap_remove(r.gen_range(0..pool.len()));
        }
        let quartic = [QuarticTerm { modes, coeff: r.gen_range(0.2..1.0) }];
        let h = interacting_hamiltonian(&g, &quartic).map_err(e)?;
        let sh = build_shadow_hamiltonian_dense(&h, &set, QUADRATIC_LEAKAGE_MAX).map_err(e)?;
        quartic_min = quartic_min.min(sh.leakage());

        // the same instance through the CLI driver
        let gamma = g.gamma().triplets().iter().map(|&(j, k, z)| [j as f64 + 1.0, k as f64 + 1.0, z.re, z.im]).collect();
        let file = Problem::Fermion(FermionProblem {
            n,
            gamma,
            initial: FermionInitial::Vacuum,
            times: vec![0.0, 1.0],
            quartic: vec![[
                modes[0] as f64 + 1.0,
                modes[1] as f64 + 1.0,
                modes[2] as f64 + 1.0,
                modes[3] as f64 + 1.0,
                quartic[0].coeff,
            ]],
            subsets: Vec::new(),
        });
        let outcome = execute(&file, &Settings::default());
        if outcome.exit_code == exit::LEAKAGE && outcome.report.leakage.is_some_and(|l| l > QUARTIC_LEAKAGE_MIN) {
            refusals += 1;
        }
    }
    verdict(
        quad_max <= QUADRATIC_LEAKAGE_MAX && quartic_min > QUARTIC_LEAKAGE_MIN && refusals == sizes.len(),
        format!(
            "quadratic leakage {quad_max:.2e} (<= {QUADRATIC_LEAKAGE_MAX:.0e}); quartic leakage min {quartic_min:.3} (> {QUARTIC_LEAKAGE_MIN}); \
             CLI refusals {refusals}/{}",
            sizes.len()
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(99, None).passed);
    }

    #[test]
    fn perturbed_golden_fails_its_criterion() {
        for id in [4, 8, 9] {
            assert!(run_criterion(id, None).passed, "criterion {id}");
            assert!(!run_criterion(id, Some(id)).passed, "perturbed criterion {id}");
        }
    }
}

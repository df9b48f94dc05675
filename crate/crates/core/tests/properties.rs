mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use shadowsim_core::fermions::{product_state_shadow, vacuum_shadow};
use shadowsim_core::heisenberg::{evolve_operator_continuous, OperatorVector};
use shadowsim_core::linalg::{dense_expm, expm_action, inner, max_abs_diff, norm2, DenseMatrix, SparseMatrix};
use shadowsim_core::oracle::{expectations, vec_state, DensityMatrix};
use shadowsim_core::qubits::{full_pauli_set, orthonormal_basis_vs};
use shadowsim_core::shadow::{build_shadow_hamiltonian_dense, evolve_shadow, ShadowState};
use shadowsim_core::{c64, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expm_action_preserves_norm(seed in any::<u64>(), dim in 2usize..=512, per_row in 2usize..8) {
        let mut r = rng(seed);
        let h = random_sparse_hermitian(dim, per_row, &mut r);
        let v = random_vector(dim, &mut r);
        let tol = 1e-10;
        let out = expm_action(&h, &v, r.gen_range(-5.0..5.0), tol).unwrap();
        prop_assert!((norm2(&out) - norm2(&v)).abs() <= 10.0 * tol * norm2(&v));
    }

    #[test]
    fn expm_action_matches_dense(seed in any::<u64>(), dim in 1usize..=48, t in -4.0f64..4.0) {
        let mut r = rng(seed);
        let h = random_sparse_hermitian(dim, 4, &mut r);
        let v = random_vector(dim, &mut r);
        let krylov = expm_action(&h, &v, t, 1e-12).unwrap();
        let dense = dense_expm(&h.to_dense(), t).unwrap().matvec(&v).unwrap();
        let diff: Vec<C64> = krylov.iter().zip(&dense).map(|(a, b)| a - b).collect();
        prop_assert!(norm2(&diff) <= 1e-9);
    }

    #[test]
    fn kron_mixed_product_and_associativity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let [a, b, c, d] = [0, 1, 2, 3].map(|_| random_matrix(2, 2, &mut r));
        let left = a.kron(&b).try_matmul(&c.kron(&d)).unwrap();
        let right = a.try_matmul(&c).unwrap().kron(&b.try_matmul(&d).unwrap());
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
        let assoc = a.kron(&b).kron(&c).max_abs_diff(&a.kron(&b.kron(&c)));
        prop_assert!(assoc <= 1e-12);
    }

    #[test]
    fn shadow_hamiltonian_is_hermitian(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let set = full_pauli_set(n).unwrap();
        let h = random_hermitian(1 << n, &mut r);
        let sh = build_shadow_hamiltonian_dense(&h, &set, 1e-10).unwrap();
        prop_assert!(sh.hermitian_defect() <= 1e-10);
        prop_assert!(sh.leakage() <= 1e-10);
    }

    #[test]
    fn evolution_preserves_norm_and_matches_oracle(seed in any::<u64>(), t in prop::sample::select(vec![0.1, 1.0, 5.0])) {
        let mut r = rng(seed);
        let n = 2;
        let set = full_pauli_set(n).unwrap();
        let h = random_hermitian(1 << n, &mut r);
        let rho = random_density(1 << n, &mut r);
        let sh = build_shadow_hamiltonian_dense(&h, &set, 1e-10).unwrap();
        let st0 = shadowsim_core::oracle::shadow_from_state(&rho, &set).unwrap();
        let st = evolve_shadow(&sh, &st0, t, 1e-12).unwrap();
        prop_assert!((norm2(st.amplitudes()) - 1.0).abs() <= 1e-9);
        let later = shadowsim_core::oracle::evolve_density(&h, &rho, t).unwrap();
        let oracle = shadowsim_core::oracle::shadow_from_state(&later, &set).unwrap();
        prop_assert!(max_abs_diff(st.amplitudes(), oracle.amplitudes()) <= 1e-8);
    }

    #[test]
    fn expectations_are_linear(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let set = full_pauli_set(2).unwrap();
        let (a, b) = (random_density(4, &mut r), random_density(4, &mut r));
        let mix = DensityMatrix::mixture(&[(p, &a), (1.0 - p, &b)]).unwrap();
        let ea = expectations(&a, &set).unwrap();
        let eb = expectations(&b, &set).unwrap();
        let combined: Vec<C64> = ea.iter().zip(&eb).map(|(x, y)| x * p + y * (1.0 - p)).collect();
        prop_assert!(max_abs_diff(&expectations(&mix, &set).unwrap(), &combined) <= 1e-12);
    }

    #[test]
    fn pure_vec_state_has_schmidt_rank_one(seed in any::<u64>(), dim in 2usize..=6) {
        let mut r = rng(seed);
        let psi = shadowsim_core::oracle::PureState::new(random_unit(dim, &mut r)).unwrap();
        let v = vec_state(&psi.to_density().unwrap()).unwrap();
        // reshape to dim × dim; rank one means every 2×2 minor vanishes
        let m = DenseMatrix::from_fn(dim, dim, |i, j| v[i * dim + j]);
        let sv = shadowsim_core::linalg::eigvalsh(&m.try_matmul(&m.adjoint()).unwrap()).unwrap();
        prop_assert!(sv[..dim - 1].iter().all(|s| s.abs() <= 1e-12));
    }

    #[test]
    fn bell_lemma_and_purity(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let set = full_pauli_set(n).unwrap();
        let v = orthonormal_basis_vs(set.dense_ops().unwrap(), (1usize << n) as f64).unwrap();
        let rho = random_density(1 << n, &mut r);
        let st = shadowsim_core::oracle::shadow_from_state(&rho, &set).unwrap();
        let mapped = v.matvec(&vec_state(&rho).unwrap()).unwrap();
        prop_assert!(max_abs_diff(st.amplitudes(), &mapped) <= 1e-10);
        prop_assert!((st.norm_a() - (1usize << n) as f64 * rho.purity()).abs() <= 1e-10);
    }

    #[test]
    fn particle_hole_is_a_global_sign(n in 1usize..=8, mask in any::<u16>()) {
        let occupied: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let holes: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 0).collect();
        let a = product_state_shadow(n, &occupied).unwrap();
        let b = product_state_shadow(n, &holes).unwrap();
        let neg: Vec<C64> = b.amplitudes().iter().map(|z| -z).collect();
        prop_assert_eq!(a.amplitudes(), neg.as_slice());
        prop_assert_eq!(product_state_shadow(n, &[]).unwrap(), vacuum_shadow(n).unwrap());
    }

    #[test]
    fn operator_evolution_preserves_norm(seed in any::<u64>(), t in -10.0f64..10.0) {
        let mut r = rng(seed);
        let dim = 12;
        let hs = random_sparse_hermitian(dim, 4, &mut r);
        let sh = shadowsim_core::shadow::ShadowHamiltonian::new(hs, 0.0).unwrap();
        let z0 = OperatorVector::new(random_vector(dim, &mut r)).unwrap();
        let z = evolve_operator_continuous(&sh, &z0, t, 1e-12).unwrap();
        prop_assert!((z.norm() - z0.norm()).abs() <= 1e-9 * z0.norm());
    }

    #[test]
    fn shadow_state_roundtrip(seed in any::<u64>(), len in 1usize..20) {
        let mut r = rng(seed);
        let e = random_vector(len, &mut r);
        let st = ShadowState::from_expectations(&e).unwrap();
        prop_assert!((norm2(st.amplitudes()) - 1.0).abs() <= 1e-14);
        prop_assert!(max_abs_diff(&st.expectations(), &e) <= 1e-14);
        let a: f64 = e.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((st.norm_a() - a).abs() <= 1e-14 * a);
        prop_assert!((inner(st.amplitudes(), st.amplitudes()).unwrap() - c64(1.0, 0.0)).norm() <= 1e-14);
    }
}

#[test]
fn sparse_matrix_dense_roundtrip() {
    let mut r = rng(1);
    let h = random_sparse_hermitian(30, 6, &mut r);
    assert_eq!(SparseMatrix::from_dense(&h.to_dense(), 0.0), h);
}

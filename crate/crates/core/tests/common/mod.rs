#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shadowsim_core::linalg::DenseMatrix;
use shadowsim_core::{c64, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..dim).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v = random_vector(dim, rng);
    shadowsim_core::linalg::normalize(&v).unwrap().0
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let a = random_matrix(dim, dim, rng);
    a.try_add(&a.adjoint()).unwrap().scale(c64(0.5, 0.0))
}

/// Random Hermitian matrix with about `per_row` non-zeros per row.
pub fn random_sparse_hermitian(dim: usize, per_row: usize, rng: &mut ChaCha8Rng) -> shadowsim_core::linalg::SparseMatrix {
    let mut t = Vec::new();
    for i in 0..dim {
        t.push((i, i, c64(rng.gen_range(-1.0..1.0), 0.0)));
        for _ in 0..per_row / 2 {
            let j = rng.gen_range(0..dim);
            if j != i {
                let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                t.push((i, j, z));
                t.push((j, i, z.conj()));
            }
        }
    }
    shadowsim_core::linalg::SparseMatrix::from_triplets(dim, dim, t).unwrap()
}

/// Random rank-2 mixed state.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> shadowsim_core::oracle::DensityMatrix {
    use shadowsim_core::oracle::{DensityMatrix, PureState};
    let a = PureState::new(random_unit(dim, rng)).unwrap().to_density().unwrap();
    let b = PureState::new(random_unit(dim, rng)).unwrap().to_density().unwrap();
    let p = rng.gen_range(0.1..0.9);
    DensityMatrix::mixture(&[(p, &a), (1.0 - p, &b)]).unwrap()
}

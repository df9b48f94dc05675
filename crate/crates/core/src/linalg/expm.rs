use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;

use super::{eigh, ensure_dense_capacity, inner, norm2, DenseMatrix, SparseMatrix};
use crate::{Error, Result, C64};

pub const DEFAULT_EXPM_TOL: f64 = 1e-10;

const KRYLOV_MAX_DIM: usize = 48;
const STEP_SAFETY: f64 = 0.25;

/// `exp(−i t h)` for a Hermitian dense matrix, via full eigendecomposition.
pub fn dense_expm(h: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    let n = h.require_square()?;
    ensure_dense_capacity(n)?;
    let defect = h.hermitian_defect()?;
    let tol = 1e-10 * h.max_abs().max(1.0);
    if defect > tol {
        return Err(Error::NonHermitian { defect, tol });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let eig = eigh(h)?;
    Ok(eig.apply_fn(|lambda| {
        let (s, c) = (-t * lambda).sin_cos();
        C64::new(c, s)
    }))
}

/// `exp(−i t h) v` for a sparse Hermitian `h`, by restarted Lanczos.
///
/// The time interval is split into steps; each step builds an orthonormal
/// Krylov basis (full reorthogonalisation), exponentiates the projected
/// tridiagonal matrix exactly and accepts the step once the standard
/// a-posteriori estimate `β_m |[exp(−iτT)e₁]_m| ‖w‖` is within the step's
/// share of `tol · ‖v‖`.
pub fn expm_action(h: &SparseMatrix, v: &[C64], t: f64, tol: f64) -> Result<Vec<C64>> {
    if h.rows() != h.cols() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    if v.len() != h.rows() {
        return Err(Error::Shape(format!("generator of dimension {} applied to vector of length {}", h.rows(), v.len())));
    }
    if !(tol > 0.0) || !t.is_finite() {
        return Err(Error::Config(format!("expm_action needs tol > 0 and finite t (tol = {tol}, t = {t})")));
    }
    super::check_finite(v)?;
    let defect = h.hermitian_defect()?;
    if defect > tol {
        return Err(Error::NonHermitian { defect, tol });
    }

    let v_norm = norm2(v);
    if t == 0.0 || v_norm == 0.0 || h.nnz() == 0 {
        return Ok(v.to_vec());
    }

    let n = h.rows();
    let h_norm = h.inf_norm();
    let direction = t.signum();
    let total = t.abs();
    let m_max = n.min(KRYLOV_MAX_DIM);
    let mut w = v.to_vec();
    let mut remaining = total;
    let mut scratch = vec![C64::new(0.0, 0.0); n];

    while remaining > 0.0 {
        let w_norm = norm2(&w);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
        basis.push(w.iter().map(|z| z / w_norm).collect());
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut residual = 0.0;

        for j in 0..m_max {
            h.matvec_into(&basis[j], &mut scratch);
            alpha.push(inner(&basis[j], &scratch)?.re);
            // two passes of classical Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(b, &scratch)?;
                    for (s, bi) in scratch.iter_mut().zip(b) {
                        *s -= c * bi;
                    }
                }
            }
            let b = norm2(&scratch);
            if b <= 1e-14 * h_norm || j + 1 == m_max {
                residual = b;
                break;
            }
            beta.push(b);
            basis.push(scratch.iter().map(|z| z / b).collect());
        }

        let m = alpha.len();
        let tri = DenseMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C64::new(alpha[i], 0.0)
            } else if i + 1 == j {
                C64::new(beta[i], 0.0)
            } else if j + 1 == i {
                C64::new(beta[j], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let eig = eigh(&tri)?;
        let small = |tau: f64| -> Vec<C64> {
            // exp(−i τ T) e₁ = Q exp(−iτΛ) Qᵀ e₁
            let phases: Vec<C64> = eig
                .values
                .iter()
                .enumerate()
                .map(|(k, &lam)| {
                    let (s, c) = (-direction * tau * lam).sin_cos();
                    C64::new(c, s) * eig.vectors[(0, k)].conj()
                })
                .collect();
            (0..m).map(|i| (0..m).map(|k| eig.vectors[(i, k)] * phases[k]).sum()).collect()
        };

        let mut tau = remaining;
        let mut y = small(tau);
        loop {
            let err = residual * y[m - 1].norm() * w_norm;
            let budget = STEP_SAFETY * tol * v_norm * tau / total;
            if err <= budget || tau <= total * 1e-12 {
                break;
            }
            let shrink = (0.9 * (budget / err).powf(1.0 / m as f64)).clamp(0.1, 0.5);
            tau *= shrink;
            y = small(tau);
        }

        w.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (yk, bk) in y.iter().zip(&basis) {
            let coeff = yk * w_norm;
            for (wi, bi) in w.iter_mut().zip(bk) {
                *wi += coeff * bi;
            }
        }
        remaining = if tau >= remaining { 0.0 } else { remaining - tau };
    }
    Ok(w)
}

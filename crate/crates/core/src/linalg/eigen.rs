use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;

use super::DenseMatrix;
use crate::{Error, Result, C64};

const MAX_QL_SWEEPS: usize = 60;

/// Eigendecomposition `A = V diag(values) V†` of a Hermitian matrix.
/// Eigenvalues are sorted ascending; column `k` of `vectors` belongs to `values[k]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> DenseMatrix {
        let n = self.values.len();
        let fvals: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let vik = v[(i, k)] * fvals[k];
                if vik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix (the lower triangle is read).
///
/// Householder reduction to a Hermitian tridiagonal form, a diagonal phase
/// change making the off-diagonal real, then implicit QL with Wilkinson shifts.
pub fn eigh(a: &DenseMatrix) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    super::check_finite(a.data())?;
    if n == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: DenseMatrix::zeros(0, 0) });
    }
    let (diag, off, basis) = tridiagonalize(a);
    let (values, z) = tridiagonal_ql(diag, off)?;

    // vectors = basis · Z, with Z real
    let mut vectors = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let b = basis[(i, k)];
            if b == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                vectors[(i, j)] += b * z[k * n + j];
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = DenseMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(HermitianEigen { values: sorted_values, vectors: sorted_vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(eigh(a)?.values)
}

/// Returns the real tridiagonal `(diag, off)` and the unitary `Q D` such that
/// `A = (Q D) T (Q D)†`.
fn tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>, DenseMatrix) {
    let n = a.rows();
    // Work on a Hermitian copy built from the lower triangle.
    let mut w = DenseMatrix::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)].conj() });
    let mut q = DenseMatrix::identity(n);
    let zero = C64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| w[(i, k)]).collect();
        let xnorm = super::norm2(&x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        let m = n - k - 1;

        // p = β W_sub v, K = (β/2) v†p, u = p − K v, W_sub ← W_sub − v u† − u v†
        let mut p = vec![zero; m];
        for (r, pr) in p.iter_mut().enumerate() {
            let mut s = zero;
            for (c, vc) in v.iter().enumerate() {
                s += w[(k + 1 + r, k + 1 + c)] * vc;
            }
            *pr = s * beta;
        }
        let kappa: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum::<C64>() * (beta / 2.0);
        let u: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        for r in 0..m {
            for c in 0..m {
                w[(k + 1 + r, k + 1 + c)] -= v[r] * u[c].conj() + u[r] * v[c].conj();
            }
        }
        w[(k + 1, k)] = alpha;
        w[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            w[(i, k)] = zero;
            w[(k, i)] = zero;
        }

        // Q ← Q H on columns k+1..n
        for r in 0..n {
            let s: C64 = (0..m).map(|c| q[(r, k + 1 + c)] * v[c]).sum::<C64>() * beta;
            for c in 0..m {
                q[(r, k + 1 + c)] -= s * v[c].conj();
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut off = vec![0.0; n];
    let mut phases = vec![C64::new(1.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let e = w[(k + 1, k)];
        let mag = e.norm();
        off[k] = mag;
        phases[k + 1] = if mag > 0.0 { phases[k] * (e / mag) } else { phases[k] };
    }
    for r in 0..n {
        for (c, ph) in phases.iter().enumerate() {
            q[(r, c)] *= ph;
        }
    }
    (diag, off, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `off[k]` couples `k`
/// and `k+1`. Returns eigenvalues (unsorted) and the row-major eigenvector matrix.
fn tridiagonal_ql(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    if n == 1 {
        return Ok((d, z));
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[k * n + i + 1];
                    let zk = z[k * n + i];
                    z[k * n + i + 1] = s * zk + c * zk1;
                    z[k * n + i] = c * zk - s * zk1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

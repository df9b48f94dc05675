use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;

use crate::{Error, Result, C64};

/// `⟨u|v⟩ = Σ conj(u_i) v_i`, conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> Result<C64> {
    if u.len() != v.len() {
        return Err(Error::Shape(format!("inner product of lengths {} and {}", u.len(), v.len())));
    }
    Ok(u.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(v: &mut [C64], factor: C64) {
    for z in v {
        *z *= factor;
    }
}

/// `y ← y + a·x`.
pub fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Returns `v / ‖v‖₂` together with `‖v‖₂`, or `None` for the zero vector.
pub fn normalize(v: &[C64]) -> Option<(Vec<C64>, f64)> {
    let n = norm2(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some((v.iter().map(|z| z / n).collect(), n))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

pub fn check_finite(v: &[C64]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Maximum entrywise modulus of `a - b`; `f64::INFINITY` on length mismatch.
pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `min_φ ‖a - e^{iφ} b‖₂`, the distance between two vectors modulo a global phase.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let overlap: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

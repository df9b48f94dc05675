//! Finite-shot measurement models.
//!
//! The random source is always passed in explicitly so that a seed fully
//! determines every estimate.

use alloc::format;
#[allow(unused_imports)] // inherent on f64 when std is linked
use num_traits::Float;
use rand::Rng;

use crate::{Error, Result, C64};

/// Number of successes in `trials` independent draws with success probability `p`.
pub fn binomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    (0..trials).filter(|_| rng.gen::<f64>() < p).count() as u64
}

fn require_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::Config(format!("shot count must be positive, got {shots}")));
    }
    Ok(())
}

/// Hadamard-test estimate of a complex overlap `z` with `|z| ≤ 1`.
///
/// The real part is read from `P(0) = (1 + Re z)/2` and the imaginary part
/// from the phase-shifted variant `P(0) = (1 + Im z)/2`; each uses `shots`
/// repetitions, so each component has standard error at most `1/√shots`.
pub fn hadamard_test<R: Rng + ?Sized>(z: C64, shots: u64, rng: &mut R) -> Result<C64> {
    require_shots(shots)?;
    let k = shots as f64;
    let re = 2.0 * binomial(rng, shots, (1.0 + z.re) / 2.0) as f64 / k - 1.0;
    let im = 2.0 * binomial(rng, shots, (1.0 + z.im) / 2.0) as f64 / k - 1.0;
    Ok(C64::new(re, im))
}

/// Swap-test estimate of `|⟨ψ|φ⟩|` from its exact value.
///
/// The test accepts with probability `1/2 + |⟨ψ|φ⟩|²/2`; the estimate is
/// `√max(0, 2p̂ − 1)`.
pub fn swap_test<R: Rng + ?Sized>(overlap_abs: f64, shots: u64, rng: &mut R) -> Result<f64> {
    require_shots(shots)?;
    let p = 0.5 + 0.5 * overlap_abs * overlap_abs;
    let p_hat = binomial(rng, shots, p) as f64 / shots as f64;
    Ok((2.0 * p_hat - 1.0).max(0.0).sqrt())
}

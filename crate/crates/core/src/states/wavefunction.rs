use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use super::{cat_normalization, CatSpec};
use crate::error::{Error, Result};
use crate::oscillator::ModeFunction;

/// Highest supported number-state index.
pub const MAX_NUMBER_STATE: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WavefunctionKind {
    Ground,
    Coherent(Complex64),
    Number(u32),
    Cat(CatSpec),
}

/// Normalized Hermite function `π^{-1/4} e^{-y²/2} Hₘ(y) / √(2ᵐ m!)`,
/// by the three-term recurrence (no factorials, no overflow).
pub fn hermite_function(m: u32, y: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * y * y).exp();
    if m == 0 {
        return prev;
    }
    let mut cur = SQRT_2 * y * prev;
    for k in 1..m {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * y * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln Ψ_α(x, t)` for the squeezed coherent state; `α = 0` is the ground state.
fn coherent_log(mode: &ModeFunction, alpha: Complex64, x: f64) -> Complex64 {
    let (eps, deps) = (mode.eps, mode.deps);
    let i = Complex64::i();
    let ground = -0.25 * PI.ln() - 0.5 * eps.ln() + i * deps * x * x / (2.0 * eps);
    ground - alpha.norm_sqr() / 2.0 - alpha * alpha * eps.conj() / (2.0 * eps)
        + SQRT_2 * alpha * x / eps
}

/// Evaluates `Ψ(x, t)` at the trajectory point `mode`.
///
/// `ε^{-1/2}` takes the principal branch, so the global phase can jump where
/// `ε` crosses the negative real axis; densities are unaffected.
pub fn eval_wavefunction(kind: &WavefunctionKind, mode: &ModeFunction, x: f64) -> Result<Complex64> {
    mode.check()?;
    match *kind {
        WavefunctionKind::Ground => Ok(coherent_log(mode, Complex64::new(0.0, 0.0), x).exp()),
        WavefunctionKind::Coherent(alpha) => Ok(coherent_log(mode, alpha, x).exp()),
        WavefunctionKind::Number(m) => {
            if m > MAX_NUMBER_STATE {
                return Err(Error::invalid(format!(
                    "number state index {m} exceeds {MAX_NUMBER_STATE}"
                )));
            }
            let (eps, deps) = (mode.eps, mode.deps);
            let abs_eps = eps.norm();
            let chirp = (eps.conj() * deps).re / (2.0 * abs_eps * abs_eps);
            let phase = Complex64::from_polar(1.0, chirp * x * x - m as f64 * eps.arg());
            Ok(phase * eps.powf(-0.5) * hermite_function(m, x / abs_eps))
        }
        WavefunctionKind::Cat(spec) => {
            let alpha = spec.alpha();
            let norm = cat_normalization(alpha.norm_sqr(), spec.parity())?;
            let plus = coherent_log(mode, alpha, x).exp();
            let minus = coherent_log(mode, -alpha, x).exp();
            Ok(norm * (plus + spec.parity().sign() * minus))
        }
    }
}

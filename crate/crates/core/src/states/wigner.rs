use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use super::{CatSpec, GaussianState, MultimodeCatSpec, WignerGrid};
use crate::error::{Error, Result};
use crate::oscillator::SymplecticMap;

/// A disk in phase space outside of which a Wigner function is negligible
/// (below `~e^{-50}` of its peak for the analytic families).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub center_q: f64,
    pub center_p: f64,
    pub radius: f64,
}

/// Single-mode Wigner function, normalized to `∫∫ W dq dp = 2π`.
pub trait Wigner: Sync {
    fn wigner(&self, q: f64, p: f64) -> f64;
    fn support(&self) -> Support;
}

impl<W: Wigner + ?Sized> Wigner for &W {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        (**self).wigner(q, p)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
}

impl<W: Wigner + ?Sized> Wigner for Box<W> {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        (**self).wigner(q, p)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
}

pub fn wigner_gaussian(state: &GaussianState, q: f64, p: f64) -> f64 {
    let d = state.det();
    let dp = p - state.mean_p;
    let dq = q - state.mean_q;
    let form = state.sigma_qq * dp * dp + state.sigma_pp * dq * dq - 2.0 * state.sigma_pq * dp * dq;
    (-form / (2.0 * d)).exp() / d.sqrt()
}

impl Wigner for GaussianState {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        wigner_gaussian(self, q, p)
    }

    fn support(&self) -> Support {
        Support {
            center_q: self.mean_q,
            center_p: self.mean_p,
            radius: 10.0 * self.max_variance().sqrt(),
        }
    }
}

/// The four coherent-pair contributions `W_{A,A}`, `W_{−A,−A}`,
/// `W_{A,−A}`, `W_{−A,A}` of an even/odd cat Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatWignerTerms {
    pub direct_plus: Complex64,
    pub direct_minus: Complex64,
    pub cross_plus_minus: Complex64,
    pub cross_minus_plus: Complex64,
    pub norm_sqr: f64,
    pub sign: f64,
}

impl CatWignerTerms {
    /// Sum of the interference pair; real up to rounding.
    pub fn interference(&self) -> Complex64 {
        self.cross_plus_minus + self.cross_minus_plus
    }

    pub fn total(&self) -> Complex64 {
        (self.direct_plus + self.direct_minus + self.sign * self.interference()) * self.norm_sqr
    }
}

/// `W_{A,B}(Z) = 2ⁿ exp(−2ZZ* + 2AZ* + 2B*Z − AB* − |A|²/2 − |B|²/2)`,
/// the Wigner function of `|A⟩⟨B|`, with `Z = (q + ip)/√2`.
fn coherent_pair(a: &[Complex64], a_sign: f64, b_sign: f64, z: &[Complex64]) -> Complex64 {
    let mut exponent = Complex64::new(0.0, 0.0);
    for (&alpha, &zi) in a.iter().zip(z) {
        let ai = alpha * a_sign;
        let bi = alpha * b_sign;
        exponent += -2.0 * zi.norm_sqr() + 2.0 * ai * zi.conj() + 2.0 * bi.conj() * zi
            - ai * bi.conj()
            - 0.5 * ai.norm_sqr()
            - 0.5 * bi.norm_sqr();
    }
    exponent.exp() * 2f64.powi(a.len() as i32)
}

pub fn cat_wigner_terms(spec: &MultimodeCatSpec, z_point: &[(f64, f64)]) -> Result<CatWignerTerms> {
    if z_point.len() != spec.modes() {
        return Err(Error::invalid(format!(
            "expected {} phase-space pairs, got {}",
            spec.modes(),
            z_point.len()
        )));
    }
    let z: Vec<Complex64> = z_point
        .iter()
        .map(|&(q, p)| Complex64::new(q, p) / SQRT_2)
        .collect();
    let a = spec.alphas();
    let n = spec.normalization();
    Ok(CatWignerTerms {
        direct_plus: coherent_pair(a, 1.0, 1.0, &z),
        direct_minus: coherent_pair(a, -1.0, -1.0, &z),
        cross_plus_minus: coherent_pair(a, 1.0, -1.0, &z),
        cross_minus_plus: coherent_pair(a, -1.0, 1.0, &z),
        norm_sqr: n * n,
        sign: spec.parity().sign(),
    })
}

/// Even/odd multimode cat Wigner function at `((q₁,p₁), …, (qₙ,pₙ))`.
/// Normalized to `(2π)ⁿ`; negative regions are expected.
pub fn wigner_cat(spec: &MultimodeCatSpec, z_point: &[(f64, f64)]) -> Result<f64> {
    Ok(cat_wigner_terms(spec, z_point)?.total().re)
}

impl Wigner for CatSpec {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        let spec = self.to_multimode();
        wigner_cat(&spec, &[(q, p)]).expect("single-mode point")
    }

    fn support(&self) -> Support {
        Support {
            center_q: 0.0,
            center_p: 0.0,
            radius: SQRT_2 * self.alpha().norm() + 10.0 / SQRT_2,
        }
    }
}

/// Fock state `|m⟩`: `W = 2(−1)ᵐ Lₘ(2(q² + p²)) e^{−(q² + p²)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockState {
    pub m: u32,
}

impl FockState {
    pub fn new(m: u32) -> Result<Self> {
        if m > super::MAX_NUMBER_STATE {
            return Err(Error::invalid(format!("number state index {m} too large")));
        }
        Ok(Self { m })
    }
}

impl Wigner for FockState {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        let r2 = q * q + p * p;
        let x = 2.0 * r2;
        // Laguerre recurrence with the Gaussian folded in to stay in range.
        let damp = (-r2).exp();
        let mut prev = damp;
        if self.m == 0 {
            return 2.0 * prev;
        }
        let mut cur = (1.0 - x) * damp;
        for k in 1..self.m {
            let k = k as f64;
            let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
            prev = cur;
            cur = next;
        }
        let sign = if self.m % 2 == 0 { 1.0 } else { -1.0 };
        2.0 * sign * cur
    }

    fn support(&self) -> Support {
        Support {
            center_q: 0.0,
            center_p: 0.0,
            radius: (2.0 * self.m as f64 + 1.0).sqrt() + 10.0,
        }
    }
}

/// `W(p, q, t) = W₀(p₀, q₀)` with `(p₀, q₀)` the initial point of the
/// classical trajectory through `(p, q)`. The trap has no linear drive, so
/// there is no shift term.
#[derive(Debug, Clone, Copy)]
pub struct EvolvedWigner<W> {
    pub initial: W,
    pub map: SymplecticMap,
}

impl<W: Wigner> EvolvedWigner<W> {
    pub fn new(initial: W, map: SymplecticMap) -> Self {
        Self { initial, map }
    }
}

impl<W: Wigner> Wigner for EvolvedWigner<W> {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        let (p0, q0) = self.map.apply(p, q);
        self.initial.wigner(q0, p0)
    }

    fn support(&self) -> Support {
        let s = self.initial.support();
        let (center_p, center_q) = self.map.apply_inverse(s.center_p, s.center_q);
        Support { center_q, center_p, radius: s.radius * self.map.norm() }
    }
}

pub fn evolve_wigner<W: Wigner + ?Sized>(initial: &W, map: &SymplecticMap, q: f64, p: f64) -> f64 {
    let (p0, q0) = map.apply(p, q);
    initial.wigner(q0, p0)
}

impl Wigner for WignerGrid {
    fn wigner(&self, q: f64, p: f64) -> f64 {
        self.interpolate(q, p)
    }

    fn support(&self) -> Support {
        let (q, p) = (self.q_axis(), self.p_axis());
        Support {
            center_q: 0.5 * (q.min + q.max),
            center_p: 0.5 * (p.min + p.max),
            radius: 0.5 * (q.max - q.min).hypot(p.max - p.min),
        }
    }
}

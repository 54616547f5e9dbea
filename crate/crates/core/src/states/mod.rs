//! Gaussian and Schrödinger-cat states of the trapped ion.

mod grid;
mod wavefunction;
mod wigner;

pub use grid::{Axis, GridMoments, WignerGrid};
pub use wavefunction::{eval_wavefunction, hermite_function, WavefunctionKind, MAX_NUMBER_STATE};
pub use wigner::{
    cat_wigner_terms, evolve_wigner, wigner_cat, wigner_gaussian, CatWignerTerms, EvolvedWigner,
    FockState, Support, Wigner,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::oscillator::ModeFunction;

/// Tolerance on `d − 1/4` for the purity flag.
pub const PURITY_TOLERANCE: f64 = 1e-10;

/// First and second quadrature moments of a Gaussian state.
///
/// The Wigner function is normalized so that its phase-space integral is
/// `2π`, which makes it `1/√d` at the peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean_p: f64,
    pub mean_q: f64,
    pub sigma_pp: f64,
    pub sigma_qq: f64,
    pub sigma_pq: f64,
}

impl GaussianState {
    pub fn new(mean_p: f64, mean_q: f64, sigma_pp: f64, sigma_qq: f64, sigma_pq: f64) -> Result<Self> {
        let s = Self { mean_p, mean_q, sigma_pp, sigma_qq, sigma_pq };
        s.validate()?;
        Ok(s)
    }

    pub fn vacuum() -> Self {
        Self { mean_p: 0.0, mean_q: 0.0, sigma_pp: 0.5, sigma_qq: 0.5, sigma_pq: 0.0 }
    }

    /// Coherent (or squeezed coherent) state `α` evolved to the point `mode`
    /// of the trajectory.
    pub fn from_mode(mode: &ModeFunction, alpha: Complex64) -> Result<Self> {
        mode.check()?;
        let (eps, deps) = (mode.eps, mode.deps);
        let sigma_qq = eps.norm_sqr() / 2.0;
        let sigma_pp = deps.norm_sqr() / 2.0;
        let sigma_pq = (eps.conj() * deps).re / 2.0;
        let mean_p = 2.0 * (alpha * deps.conj()).re / SQRT_2;
        let mean_q = 2.0 * (alpha * eps.conj()).re / SQRT_2;
        Ok(Self { mean_p, mean_q, sigma_pp, sigma_qq, sigma_pq })
    }

    fn validate(&self) -> Result<()> {
        let all = [self.mean_p, self.mean_q, self.sigma_pp, self.sigma_qq, self.sigma_pq];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Gaussian state moments".into()));
        }
        if self.sigma_pp <= 0.0 || self.sigma_qq <= 0.0 {
            return Err(Error::invalid("Gaussian variances must be positive"));
        }
        if self.det() <= 0.0 {
            return Err(Error::invalid("dispersion matrix must be positive definite"));
        }
        Ok(())
    }

    /// `T = σpp + σqq`.
    pub fn trace(&self) -> f64 {
        self.sigma_pp + self.sigma_qq
    }

    /// `d = σpp·σqq − σpq²`.
    pub fn det(&self) -> f64 {
        self.sigma_pp * self.sigma_qq - self.sigma_pq * self.sigma_pq
    }

    pub fn is_pure(&self) -> bool {
        (self.det() - 0.25).abs() < PURITY_TOLERANCE
    }

    /// Whether either quadrature variance is below the vacuum value 1/2.
    pub fn is_squeezed(&self) -> bool {
        self.sigma_qq < 0.5 || self.sigma_pp < 0.5
    }

    /// Correlation coefficient and distance from the minimum of the
    /// Schrödinger–Robertson relation `σqq·σpp = (1/4)/(1 − r²)`.
    pub fn schroedinger_relation(&self) -> SchroedingerRelation {
        let r = self.sigma_pq / (self.sigma_qq * self.sigma_pp).sqrt();
        let residual = (self.sigma_qq * self.sigma_pp - 0.25 / (1.0 - r * r)).abs();
        SchroedingerRelation { r, residual }
    }

    /// Largest eigenvalue of the dispersion matrix.
    pub fn max_variance(&self) -> f64 {
        let half_tr = self.trace() / 2.0;
        half_tr + (half_tr * half_tr - self.det()).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchroedingerRelation {
    pub r: f64,
    pub residual: f64,
}

pub fn gaussian_from_epsilon(mode: &ModeFunction, alpha: Complex64) -> Result<GaussianState> {
    GaussianState::from_mode(mode, alpha)
}

pub fn schroedinger_relation_check(state: &GaussianState) -> SchroedingerRelation {
    state.schroedinger_relation()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// `N^(±)` for total squared amplitude `|A|²`, in the overflow-free form
/// `1/√(2(1 ± e^{−2|A|²}))`.
pub(crate) fn cat_normalization(norm_sqr: f64, parity: Parity) -> Result<f64> {
    let overlap = (-2.0 * norm_sqr).exp();
    let denom = 2.0 * (1.0 + parity.sign() * overlap);
    if denom <= 0.0 || (parity == Parity::Odd && norm_sqr == 0.0) {
        return Err(Error::NormalizationDivergence);
    }
    Ok(1.0 / denom.sqrt())
}

/// Single-mode even/odd coherent state `N^(±)(|α⟩ ± |−α⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    alpha: Complex64,
    parity: Parity,
}

impl CatSpec {
    pub fn new(alpha: Complex64, parity: Parity) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::NonFinite("cat amplitude".into()));
        }
        if parity == Parity::Odd && alpha.norm_sqr() == 0.0 {
            return Err(Error::NormalizationDivergence);
        }
        Ok(Self { alpha, parity })
    }

    pub fn even(alpha: Complex64) -> Self {
        Self { alpha, parity: Parity::Even }
    }

    pub fn odd(alpha: Complex64) -> Result<Self> {
        Self::new(alpha, Parity::Odd)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn normalization(&self) -> f64 {
        cat_normalization(self.alpha.norm_sqr(), self.parity)
            .expect("validated at construction")
    }

    pub fn to_multimode(&self) -> MultimodeCatSpec {
        MultimodeCatSpec { alphas: vec![self.alpha], parity: self.parity }
    }
}

/// `N^(±)(|A⟩ ± |−A⟩)` for a vector of amplitudes `A = (α₁, …, αₙ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultimodeCatSpec {
    alphas: Vec<Complex64>,
    parity: Parity,
}

impl MultimodeCatSpec {
    pub fn new(alphas: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid("multimode cat needs at least one mode"));
        }
        if alphas.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("cat amplitude".into()));
        }
        let s = Self { alphas, parity };
        if parity == Parity::Odd && s.norm_sqr() == 0.0 {
            return Err(Error::NormalizationDivergence);
        }
        Ok(s)
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn modes(&self) -> usize {
        self.alphas.len()
    }

    /// `|A|² = Σ|αᵢ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.alphas.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalization(&self) -> f64 {
        cat_normalization(self.norm_sqr(), self.parity).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{solve_epsilon, OscillatorParams};

    #[test]
    fn vacuum_from_initial_mode() {
        let s = gaussian_from_epsilon(&ModeFunction::INITIAL, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s, GaussianState::vacuum());
        assert!(s.is_pure());
        let rel = s.schroedinger_relation();
        assert_eq!(rel.r, 0.0);
        assert_eq!(rel.residual, 0.0);
    }

    #[test]
    fn coherent_means() {
        let s = gaussian_from_epsilon(&ModeFunction::INITIAL, Complex64::new(1.0, 0.0)).unwrap();
        assert!((s.mean_q - SQRT_2).abs() < 1e-15);
        assert_eq!(s.mean_p, 0.0);
        let s = gaussian_from_epsilon(&ModeFunction::INITIAL, Complex64::new(0.0, 1.0)).unwrap();
        assert!(s.mean_q.abs() < 1e-15);
        assert!((s.mean_p - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn thermal_like_state_does_not_minimize() {
        let s = GaussianState::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        assert!((s.schroedinger_relation().residual - 0.75).abs() < 1e-15);
        assert!(!s.is_pure());
    }

    #[test]
    fn purity_along_driven_trajectory() {
        let p = OscillatorParams::new(0.4, 2.0).unwrap();
        let traj = solve_epsilon(&p, 5.0, 500, 1e-12).unwrap();
        let s = gaussian_from_epsilon(&traj.mode(500), Complex64::new(0.3, -0.2)).unwrap();
        assert!((s.det() - 0.25).abs() < 1e-10);
        assert!(s.schroedinger_relation().residual < 1e-10);
    }

    #[test]
    fn squeezing_appears_only_with_drive() {
        let stat = solve_epsilon(&OscillatorParams::static_trap(), 10.0, 1000, 1e-12).unwrap();
        for m in stat.modes() {
            let s = GaussianState::from_mode(&m, Complex64::new(0.0, 0.0)).unwrap();
            assert!((s.sigma_qq - 0.5).abs() < 1e-10);
        }
        let driven = solve_epsilon(&OscillatorParams::new(1.0, 1.0).unwrap(), 10.0, 1000, 1e-12).unwrap();
        let min_qq = driven
            .modes()
            .map(|m| GaussianState::from_mode(&m, Complex64::new(0.0, 0.0)).unwrap().sigma_qq)
            .fold(f64::INFINITY, f64::min);
        assert!(min_qq < 0.5, "no squeezing found, min σqq = {min_qq}");
    }

    #[test]
    fn invalid_states() {
        assert!(GaussianState::new(0.0, 0.0, -1.0, 1.0, 0.0).is_err());
        assert!(GaussianState::new(0.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(CatSpec::odd(Complex64::new(0.0, 0.0)).is_err());
        assert!(MultimodeCatSpec::new(vec![], Parity::Even).is_err());
        assert!(MultimodeCatSpec::new(vec![Complex64::new(0.0, 0.0); 2], Parity::Odd).is_err());
    }

    #[test]
    fn normalization_matches_closed_form() {
        let a = Complex64::new(1.3, 0.4);
        let n2 = a.norm_sqr();
        let even = CatSpec::even(a).normalization();
        let odd = CatSpec::odd(a).unwrap().normalization();
        assert!((even - (n2 / 2.0).exp() / (2.0 * n2.cosh().sqrt())).abs() < 1e-14);
        assert!((odd - (n2 / 2.0).exp() / (2.0 * n2.sinh().sqrt())).abs() < 1e-14);
    }
}

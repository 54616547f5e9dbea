//! Closed-form tomograms of Gaussian, Fock, and even/odd cat states.

use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use super::{check_frame, Tomogram, TomogramQuery, Window};
use crate::error::{Error, Result};
use crate::states::{hermite_function, CatSpec, GaussianState};

/// Half-width of support windows, in standard deviations.
const WINDOW_SIGMAS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTomogram {
    pub state: GaussianState,
}

impl GaussianTomogram {
    pub fn new(state: GaussianState) -> Self {
        Self { state }
    }

    /// `σ_X = μ²σqq + ν²σpp + 2μνσpq`.
    pub fn variance(&self, mu: f64, nu: f64) -> f64 {
        let s = &self.state;
        mu * mu * s.sigma_qq + nu * nu * s.sigma_pp + 2.0 * mu * nu * s.sigma_pq
    }

    /// `X̄ − δ = μ⟨q⟩ + ν⟨p⟩`.
    pub fn mean(&self, mu: f64, nu: f64) -> f64 {
        mu * self.state.mean_q + nu * self.state.mean_p
    }
}

impl Tomogram for GaussianTomogram {
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64> {
        check_frame(mu, nu)?;
        let var = self.variance(mu, nu);
        if !(var > 0.0) {
            return Err(Error::DegenerateFrame { mu, nu });
        }
        let d = y - self.mean(mu, nu);
        Ok((-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
    }

    fn window(&self, mu: f64, nu: f64) -> Window {
        Window {
            center: self.mean(mu, nu),
            half_width: WINDOW_SIGMAS * self.variance(mu, nu).max(0.0).sqrt(),
        }
    }
}

pub fn tomogram_gaussian(state: &GaussianState, q: &TomogramQuery) -> Result<f64> {
    GaussianTomogram::new(*state).eval(q)
}

/// Number state `|m⟩`: `P = φₘ(Y/r)² / r` with `r = √(μ² + ν²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTomogram {
    pub m: u32,
}

impl Tomogram for FockTomogram {
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64> {
        let r = check_frame(mu, nu)?.sqrt();
        let h = hermite_function(self.m, y / r);
        Ok(h * h / r)
    }

    fn window(&self, mu: f64, nu: f64) -> Window {
        let r = mu.hypot(nu);
        Window {
            center: 0.0,
            half_width: r * ((2.0 * self.m as f64 + 1.0).sqrt() + WINDOW_SIGMAS),
        }
    }
}

/// The pieces of the cat tomogram
/// `N²/√(π(μ²+ν²)) · [w₁ + w₂ ± (w₃ + w₄)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatTomogramTerms {
    pub prefactor: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: Complex64,
    pub w4: Complex64,
    pub sign: f64,
}

impl CatTomogramTerms {
    pub fn interference(&self) -> Complex64 {
        self.w3 + self.w4
    }

    pub fn total(&self) -> Complex64 {
        self.prefactor * (self.w1 + self.w2 + self.sign * self.interference())
    }
}

/// Displacement `s = α(μ − iν)/√2`; the coherent components are centred at
/// `±(s + s*) = ±(μ⟨q⟩_α + ν⟨p⟩_α)`.
fn displacement(alpha: Complex64, mu: f64, nu: f64) -> Complex64 {
    alpha * Complex64::new(mu, -nu) / SQRT_2
}

pub fn cat_tomogram_terms(spec: &CatSpec, y: f64, mu: f64, nu: f64) -> Result<CatTomogramTerms> {
    let r2 = check_frame(mu, nu)?;
    let alpha = spec.alpha();
    let s = displacement(alpha, mu, nu);
    let shift = s + s.conj(); // real
    let twist = s - s.conj(); // imaginary
    let n = spec.normalization();
    let overlap = -2.0 * alpha.norm_sqr();
    let w1 = (-(y - shift.re).powi(2) / r2).exp();
    let w2 = (-(y + shift.re).powi(2) / r2).exp();
    let w3 = (overlap - (y - twist).powi(2) / r2).exp();
    let w4 = (overlap - (y + twist).powi(2) / r2).exp();
    Ok(CatTomogramTerms {
        prefactor: n * n / (PI * r2).sqrt(),
        w1,
        w2,
        w3,
        w4,
        sign: spec.parity().sign(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatTomogram {
    pub spec: CatSpec,
}

impl CatTomogram {
    pub fn new(spec: CatSpec) -> Self {
        Self { spec }
    }
}

impl Tomogram for CatTomogram {
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64> {
        Ok(cat_tomogram_terms(&self.spec, y, mu, nu)?.total().re)
    }

    fn window(&self, mu: f64, nu: f64) -> Window {
        let r = mu.hypot(nu);
        let shift = 2.0 * displacement(self.spec.alpha(), mu, nu).re.abs();
        Window { center: 0.0, half_width: shift + WINDOW_SIGMAS * r / SQRT_2 }
    }
}

pub fn tomogram_cat(spec: &CatSpec, q: &TomogramQuery) -> Result<f64> {
    CatTomogram::new(*spec).eval(q)
}

//! Symplectic tomograms `w(X, μ, ν, δ)`: the probability density of the
//! quadrature `X̂ = μq̂ + νp̂ + δ`.
//!
//! Tomograms depend on `X` and `δ` only through `Y = X − δ`, so the
//! [`Tomogram`] trait is written in terms of `P(Y, μ, ν)`. Every tomogram is
//! homogeneous: `P(λY, λμ, λν) = |λ|⁻¹ P(Y, μ, ν)`.

mod analytic;
mod evolve;
mod fourier;
mod projection;
mod radon;
mod sinogram;

pub use analytic::{
    cat_tomogram_terms, tomogram_cat, tomogram_gaussian, CatTomogram, CatTomogramTerms,
    FockTomogram, GaussianTomogram,
};
pub use evolve::{evolve_tomogram, optical_slice, EvolvedTomogram};
pub use fourier::{invert_to_wigner, FourierInversion};
pub use projection::{project_wigner, project_wigner_fn, Projection, BOUNDARY_MASS_LIMIT};
pub use radon::{radon_reconstruct, Apodization, FbpOptions, MIN_ANGLES};
pub use sinogram::OpticalSinogram;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomogramQuery {
    pub x: f64,
    pub mu: f64,
    pub nu: f64,
    pub delta: f64,
}

impl TomogramQuery {
    pub fn new(x: f64, mu: f64, nu: f64, delta: f64) -> Self {
        Self { x, mu, nu, delta }
    }

    /// Rotated quadrature at angle `phi`, no shift.
    pub fn optical(x: f64, phi: f64) -> Self {
        Self { x, mu: phi.cos(), nu: phi.sin(), delta: 0.0 }
    }

    pub fn y(&self) -> f64 {
        self.x - self.delta
    }
}

/// Interval `center ± half_width` in `Y` outside of which `P(Y, μ, ν)` is
/// negligible for a given frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: f64,
    pub half_width: f64,
}

pub trait Tomogram: Sync {
    /// `P(Y, μ, ν)`.
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64>;

    fn window(&self, mu: f64, nu: f64) -> Window;

    fn eval(&self, q: &TomogramQuery) -> Result<f64> {
        self.density(q.y(), q.mu, q.nu)
    }

    /// `∫ w dX` over the support window, by trapezoid quadrature.
    fn integral(&self, mu: f64, nu: f64, n: usize) -> Result<f64> {
        let win = self.window(mu, nu);
        let axis = Axis::new(win.center - win.half_width, win.center + win.half_width, n)?;
        let mut total = 0.0;
        for (i, w) in axis.weights().into_iter().enumerate() {
            total += w * self.density(axis.at(i), mu, nu)?;
        }
        Ok(total)
    }
}

impl<T: Tomogram + ?Sized> Tomogram for &T {
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64> {
        (**self).density(y, mu, nu)
    }
    fn window(&self, mu: f64, nu: f64) -> Window {
        (**self).window(mu, nu)
    }
}

impl<T: Tomogram + ?Sized> Tomogram for Box<T> {
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64> {
        (**self).density(y, mu, nu)
    }
    fn window(&self, mu: f64, nu: f64) -> Window {
        (**self).window(mu, nu)
    }
}

pub(crate) fn check_frame(mu: f64, nu: f64) -> Result<f64> {
    let r2 = mu * mu + nu * nu;
    if r2 == 0.0 || !r2.is_finite() {
        return Err(Error::DegenerateFrame { mu, nu });
    }
    Ok(r2)
}

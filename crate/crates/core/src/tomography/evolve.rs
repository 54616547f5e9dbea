use super::{Tomogram, TomogramQuery, Window};
use crate::error::{Error, Result};
use crate::oscillator::{symplectic_map, ModeFunction, SymplecticMap};

/// Tomogram at time `t` obtained from the initial one by the frame
/// replacement `w(X, μ, ν, δ, t) = w₀(X − δ, μ(t), ν(t))`.
#[derive(Debug, Clone, Copy)]
pub struct EvolvedTomogram<T> {
    initial: T,
    map: SymplecticMap,
}

impl<T: Tomogram> EvolvedTomogram<T> {
    pub fn new(initial: T, mode: &ModeFunction) -> Result<Self> {
        Ok(Self { initial, map: symplectic_map(mode)? })
    }

    pub fn from_map(initial: T, map: SymplecticMap) -> Self {
        Self { initial, map }
    }

    pub fn initial(&self) -> &T {
        &self.initial
    }

    pub fn map(&self) -> &SymplecticMap {
        &self.map
    }
}

impl<T: Tomogram> Tomogram for EvolvedTomogram<T> {
    fn density(&self, y: f64, mu: f64, nu: f64) -> Result<f64> {
        let (mu_t, nu_t) = self.map.frame(mu, nu);
        if mu_t == 0.0 && nu_t == 0.0 {
            return Err(Error::DegenerateFrame { mu, nu });
        }
        self.initial.density(y, mu_t, nu_t)
    }

    fn window(&self, mu: f64, nu: f64) -> Window {
        let (mu_t, nu_t) = self.map.frame(mu, nu);
        self.initial.window(mu_t, nu_t)
    }
}

pub fn evolve_tomogram<T: Tomogram + ?Sized>(
    initial: &T,
    mode: &ModeFunction,
    q: &TomogramQuery,
) -> Result<f64> {
    let map = symplectic_map(mode)?;
    let (mu_t, nu_t) = map.frame(q.mu, q.nu);
    if mu_t == 0.0 && nu_t == 0.0 {
        return Err(Error::DegenerateFrame { mu: q.mu, nu: q.nu });
    }
    initial.density(q.y(), mu_t, nu_t)
}

/// Optical (homodyne) tomogram: `μ = cos φ`, `ν = sin φ`, `δ = 0`, with the
/// frame carried to time `t` when the trajectory point is supplied.
pub fn optical_slice<T: Tomogram + ?Sized>(
    tomogram: &T,
    phi: f64,
    x: f64,
    mode: Option<&ModeFunction>,
) -> Result<f64> {
    let q = TomogramQuery::optical(x, phi);
    match mode {
        Some(m) => evolve_tomogram(tomogram, m, &q),
        None => tomogram.eval(&q),
    }
}

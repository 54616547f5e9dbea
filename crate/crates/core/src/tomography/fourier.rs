//! Wigner function from a symplectic tomogram by Fourier inversion,
//! `W(q, p) = (2π)⁻¹ ∫∫ dμ dν F(μ, ν) e^{−i(μq + νp)}` with
//! `F(μ, ν) = ∫ P(Y, μ, ν) e^{iY} dY`.
//!
//! Homogeneity turns the inner integral into one over the unit frame,
//! `F(μ, ν) = ∫ P(X, μ/r, ν/r) e^{irX} dX`, so the `X` grid never has to
//! stretch with `r`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::Tomogram;
use crate::error::{Error, Result};
use crate::states::{Axis, WignerGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourierInversion {
    /// Half-width of the square `(μ, ν)` integration domain.
    pub k_max: f64,
    /// Points per axis of the `(μ, ν)` grid. Must be odd.
    pub n_k: usize,
    /// Points of the `X` quadrature over the unit-frame support window.
    pub n_x: usize,
    /// Allowed `|∫∫W dq dp / 2π − 1|` on the output grid.
    pub norm_tolerance: f64,
}

impl Default for FourierInversion {
    fn default() -> Self {
        Self { k_max: 12.0, n_k: 193, n_x: 513, norm_tolerance: 1e-2 }
    }
}

impl FourierInversion {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > 0.0 && self.k_max.is_finite()) {
            return Err(Error::invalid(format!("k_max must be positive, got {}", self.k_max)));
        }
        if self.n_k < 3 || self.n_k % 2 == 0 {
            return Err(Error::invalid(format!("n_k must be odd and at least 3, got {}", self.n_k)));
        }
        if self.n_x < 3 {
            return Err(Error::invalid(format!("n_x must be at least 3, got {}", self.n_x)));
        }
        if !(self.norm_tolerance > 0.0) {
            return Err(Error::invalid("norm_tolerance must be positive"));
        }
        Ok(())
    }
}

/// Characteristic function `F(μ, ν)` at one frame.
fn characteristic<T: Tomogram + ?Sized>(tomo: &T, mu: f64, nu: f64, n_x: usize) -> Result<Complex64> {
    let r = mu.hypot(nu);
    let (mu_hat, nu_hat) = if r == 0.0 { (1.0, 0.0) } else { (mu / r, nu / r) };
    let win = tomo.window(mu_hat, nu_hat);
    let axis = Axis::new(win.center - win.half_width, win.center + win.half_width, n_x)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, w) in axis.weights().into_iter().enumerate() {
        let x = axis.at(i);
        acc += w * tomo.density(x, mu_hat, nu_hat)? * Complex64::from_polar(1.0, r * x);
    }
    Ok(acc)
}

pub fn invert_to_wigner<T: Tomogram + ?Sized>(
    tomo: &T,
    q_axis: Axis,
    p_axis: Axis,
    opts: &FourierInversion,
) -> Result<WignerGrid> {
    opts.validate()?;
    q_axis.validate()?;
    p_axis.validate()?;
    let k_axis = Axis::new(-opts.k_max, opts.k_max, opts.n_k)?;
    let ks = k_axis.points();
    let kw = k_axis.weights();
    let n = opts.n_k;
    let mid = n / 2;

    // F(−μ, −ν) = F(μ, ν)*, so only rows μ ≤ 0 are evaluated.
    let half: Result<Vec<Vec<Complex64>>> = (0..=mid)
        .into_par_iter()
        .map(|a| ks.iter().map(|&nu| characteristic(tomo, ks[a], nu, opts.n_x)).collect())
        .collect();
    let half = half?;
    let f = |a: usize, b: usize| -> Complex64 {
        if a <= mid {
            half[a][b]
        } else {
            half[n - 1 - a][n - 1 - b].conj()
        }
    };

    let ps = p_axis.points();
    let qs = q_axis.points();
    // G[a][j] = Σ_b w_b F(μ_a, ν_b) e^{−iν_b p_j}
    let g: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            ps.iter()
                .map(|&p| (0..n).map(|b| kw[b] * f(a, b) * Complex64::from_polar(1.0, -ks[b] * p)).sum())
                .collect()
        })
        .collect();
    let rows: Vec<Vec<f64>> = qs
        .par_iter()
        .map(|&q| {
            let phase: Vec<Complex64> =
                (0..n).map(|a| kw[a] * Complex64::from_polar(1.0, -ks[a] * q)).collect();
            (0..ps.len())
                .map(|j| {
                    let s: Complex64 = (0..n).map(|a| phase[a] * g[a][j]).sum();
                    s.re / (2.0 * PI)
                })
                .collect()
        })
        .collect();
    let grid = WignerGrid::new(q_axis, p_axis, rows.into_iter().flatten().collect())?;
    let normalization = grid.normalization();
    if (normalization - 1.0).abs() > opts.norm_tolerance {
        return Err(Error::ReconstructionQuality { normalization, tolerance: opts.norm_tolerance });
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::GaussianState;
    use crate::tomography::GaussianTomogram;

    #[test]
    fn vacuum_origin() {
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let axis = Axis::new(-5.0, 5.0, 41).unwrap();
        let w = invert_to_wigner(&vac, axis, axis, &FourierInversion::default()).unwrap();
        assert!((w.get(20, 20) - 2.0).abs() < 1e-6, "{}", w.get(20, 20));
        assert!((w.get(24, 20) - 2.0 * (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn truncated_grid_fails_normalization() {
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let axis = Axis::new(-0.5, 0.5, 11).unwrap();
        let opts = FourierInversion { n_k: 61, ..Default::default() };
        assert!(matches!(
            invert_to_wigner(&vac, axis, axis, &opts),
            Err(Error::ReconstructionQuality { .. })
        ));
    }

    #[test]
    fn even_grid_rejected() {
        let opts = FourierInversion { n_k: 64, ..Default::default() };
        assert!(opts.validate().is_err());
    }
}

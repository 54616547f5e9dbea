use rayon::prelude::*;
use std::f64::consts::PI;

use super::{optical_slice, Tomogram};
use crate::error::{Error, Result};
use crate::oscillator::ModeFunction;
use crate::states::Axis;

/// Optical tomogram `w(X, φ)` sampled at `φₖ = kπ/n_phi` (covering `[0, π)`)
/// and on a uniform `X` grid. Stored row-major with `φ` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalSinogram {
    n_phi: usize,
    x_axis: Axis,
    values: Vec<f64>,
}

impl OpticalSinogram {
    pub fn new(n_phi: usize, x_axis: Axis, values: Vec<f64>) -> Result<Self> {
        x_axis.validate()?;
        if n_phi == 0 {
            return Err(Error::invalid("sinogram needs at least one angle"));
        }
        if values.len() != n_phi * x_axis.n {
            return Err(Error::Format(format!(
                "sinogram has {} values, expected {}",
                values.len(),
                n_phi * x_axis.n
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sinogram value at index {k}")));
        }
        Ok(Self { n_phi, x_axis, values })
    }

    /// Samples the optical slices of `tomogram`, optionally at the time
    /// described by `mode`. Angles are evaluated in parallel.
    pub fn from_tomogram<T: Tomogram + ?Sized>(
        tomogram: &T,
        n_phi: usize,
        x_axis: Axis,
        mode: Option<&ModeFunction>,
    ) -> Result<Self> {
        x_axis.validate()?;
        if n_phi == 0 {
            return Err(Error::invalid("sinogram needs at least one angle"));
        }
        let xs = x_axis.points();
        let rows: Result<Vec<Vec<f64>>> = (0..n_phi)
            .into_par_iter()
            .map(|k| {
                let phi = k as f64 * PI / n_phi as f64;
                xs.iter().map(|&x| optical_slice(tomogram, phi, x, mode)).collect()
            })
            .collect();
        let values = rows?.into_iter().flatten().collect();
        Self::new(n_phi, x_axis, values)
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn phi(&self, k: usize) -> f64 {
        k as f64 * PI / self.n_phi as f64
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi).map(|k| self.phi(k)).collect()
    }

    pub fn x_axis(&self) -> Axis {
        self.x_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.values[k * self.x_axis.n..(k + 1) * self.x_axis.n]
    }

    /// `∫ w(X, φₖ) dX` for every angle.
    pub fn column_integrals(&self) -> Vec<f64> {
        let w = self.x_axis.weights();
        (0..self.n_phi)
            .map(|k| self.column(k).iter().zip(&w).map(|(v, a)| v * a).sum())
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::GaussianState;
    use crate::tomography::GaussianTomogram;

    #[test]
    fn vacuum_columns_identical_and_normalized() {
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let axis = Axis::new(-8.0, 8.0, 257).unwrap();
        let s = OpticalSinogram::from_tomogram(&vac, 36, axis, None).unwrap();
        for k in 1..36 {
            for (a, b) in s.column(k).iter().zip(s.column(0)) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        for n in s.column_integrals() {
            assert!((n - 1.0).abs() < 1e-10);
        }
        assert!(s.min_value() >= 0.0);
    }

    #[test]
    fn shape_validation() {
        let axis = Axis::new(-1.0, 1.0, 3).unwrap();
        assert!(OpticalSinogram::new(2, axis, vec![0.0; 5]).is_err());
        assert!(OpticalSinogram::new(0, axis, vec![]).is_err());
        assert!(OpticalSinogram::new(1, axis, vec![0.0, f64::INFINITY, 0.0]).is_err());
    }
}

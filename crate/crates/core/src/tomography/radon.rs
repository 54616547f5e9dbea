//! Filtered back-projection of an optical sinogram onto a Wigner grid.

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::OpticalSinogram;
use crate::error::{Error, Result};
use crate::states::{Axis, WignerGrid};

/// Fewest projection angles accepted by [`radon_reconstruct`].
pub const MIN_ANGLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Apodization {
    None,
    #[default]
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FbpOptions {
    pub apodization: Apodization,
}

/// Ram-Lak kernel sampled in space, so its DC term is exact.
fn ramp_response(len: usize, dx: f64, apod: Apodization) -> Vec<f64> {
    let mut kernel = vec![Complex::new(0.0, 0.0); len];
    kernel[0].re = 1.0 / (4.0 * dx * dx);
    for n in (1..len / 2).step_by(2) {
        let v = -1.0 / ((n * n) as f64 * PI * PI * dx * dx);
        kernel[n].re = v;
        kernel[len - n].re = v;
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut kernel);
    (0..len)
        .map(|k| {
            let f = k.min(len - k) as f64 / len as f64; // in units of 1/dx, Nyquist at 1/2
            let window = match apod {
                Apodization::None => 1.0,
                Apodization::Hann => 0.5 * (1.0 + (2.0 * PI * f).cos()),
            };
            kernel[k].re * window
        })
        .collect()
}

fn filter_columns(sino: &OpticalSinogram, apod: Apodization) -> Vec<Vec<f64>> {
    let axis = sino.x_axis();
    let nx = axis.n;
    let dx = axis.step();
    let len = (2 * nx).next_power_of_two();
    let response = ramp_response(len, dx, apod);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    (0..sino.n_phi())
        .into_par_iter()
        .map(|k| {
            let mut buf = vec![Complex::new(0.0, 0.0); len];
            for (b, &v) in buf.iter_mut().zip(sino.column(k)) {
                b.re = v;
            }
            fwd.process(&mut buf);
            for (b, h) in buf.iter_mut().zip(&response) {
                *b *= h;
            }
            inv.process(&mut buf);
            buf[..nx].iter().map(|c| c.re * dx / len as f64).collect()
        })
        .collect()
}

fn sample_linear(col: &[f64], axis: &Axis, x: f64) -> f64 {
    let u = (x - axis.min) / axis.step();
    if !(u >= 0.0) || u > (axis.n - 1) as f64 {
        return 0.0;
    }
    let i = (u.floor() as usize).min(axis.n - 2);
    let t = u - i as f64;
    col[i] * (1.0 - t) + col[i + 1] * t
}

/// `W(q, p) = 2π · (π/n_φ) Σₖ Qₖ(q cos φₖ + p sin φₖ)` with `Qₖ` the
/// ramp-filtered projection at angle `φₖ`.
pub fn radon_reconstruct(
    sino: &OpticalSinogram,
    q_axis: Axis,
    p_axis: Axis,
    opts: &FbpOptions,
) -> Result<WignerGrid> {
    q_axis.validate()?;
    p_axis.validate()?;
    if sino.n_phi() < MIN_ANGLES {
        return Err(Error::InsufficientAngles { got: sino.n_phi(), required: MIN_ANGLES });
    }
    if sino.x_axis().n < 2 {
        return Err(Error::invalid("sinogram needs at least two X samples"));
    }
    let filtered = filter_columns(sino, opts.apodization);
    let x_axis = sino.x_axis();
    let trig: Vec<(f64, f64)> = sino.phis().iter().map(|p| (p.cos(), p.sin())).collect();
    let scale = 2.0 * PI * PI / sino.n_phi() as f64;
    let ps = p_axis.points();
    let rows: Vec<Vec<f64>> = q_axis
        .points()
        .par_iter()
        .map(|&q| {
            ps.iter()
                .map(|&p| {
                    let s: f64 = trig
                        .iter()
                        .zip(&filtered)
                        .map(|(&(c, s), col)| sample_linear(col, &x_axis, q * c + p * s))
                        .sum();
                    s * scale
                })
                .collect()
        })
        .collect();
    WignerGrid::new(q_axis, p_axis, rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::GaussianState;
    use crate::tomography::GaussianTomogram;

    #[test]
    fn vacuum_origin() {
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let x = Axis::new(-8.0, 8.0, 257).unwrap();
        let sino = OpticalSinogram::from_tomogram(&vac, 90, x, None).unwrap();
        let axis = Axis::new(-4.0, 4.0, 41).unwrap();
        let w = radon_reconstruct(&sino, axis, axis, &FbpOptions::default()).unwrap();
        assert!((w.get(20, 20) - 2.0).abs() < 0.02, "{}", w.get(20, 20));
        assert!((w.normalization() - 1.0).abs() < 0.01);
    }

    #[test]
    fn too_few_angles() {
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let x = Axis::new(-8.0, 8.0, 65).unwrap();
        let sino = OpticalSinogram::from_tomogram(&vac, 8, x, None).unwrap();
        assert!(matches!(
            radon_reconstruct(&sino, x, x, &FbpOptions::default()),
            Err(Error::InsufficientAngles { got: 8, required: 16 })
        ));
    }
}

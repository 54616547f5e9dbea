use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::Wigner;
use crate::error::{Error, Result};

/// Uniform grid `min, min + h, …, max` with `n ≥ 2` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        let a = Self { min, max, n };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::invalid(format!(
                "axis bounds must be finite with max > min, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.n < 2 {
            return Err(Error::invalid(format!("axis needs at least 2 points, got {}", self.n)));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n)
            .map(|i| if i == 0 || i + 1 == self.n { 0.5 * h } else { h })
            .collect()
    }
}

/// Wigner function sampled on a rectangular `(q, p)` grid, stored row-major
/// with `q` as the slow index. Normalization convention `∫∫ W = 2π`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    q_axis: Axis,
    p_axis: Axis,
    values: Vec<f64>,
}

/// Moments of a gridded Wigner function, computed by trapezoid quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMoments {
    pub normalization: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_qq: f64,
    pub sigma_pp: f64,
    pub sigma_pq: f64,
}

impl WignerGrid {
    pub fn new(q_axis: Axis, p_axis: Axis, values: Vec<f64>) -> Result<Self> {
        q_axis.validate()?;
        p_axis.validate()?;
        if values.len() != q_axis.n * p_axis.n {
            return Err(Error::Format(format!(
                "grid has {} values, axes need {}",
                values.len(),
                q_axis.n * p_axis.n
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("Wigner grid value at index {k}")));
        }
        Ok(Self { q_axis, p_axis, values })
    }

    /// Samples `w` on the grid. Rows are filled in parallel; each value is
    /// computed independently, so the result does not depend on threading.
    pub fn sample<W: Wigner + ?Sized>(w: &W, q_axis: Axis, p_axis: Axis) -> Self {
        let ps = p_axis.points();
        let values: Vec<f64> = (0..q_axis.n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let q = q_axis.at(i);
                ps.iter().map(move |&p| w.wigner(q, p)).collect::<Vec<_>>()
            })
            .collect();
        Self { q_axis, p_axis, values }
    }

    pub fn q_axis(&self) -> Axis {
        self.q_axis
    }

    pub fn p_axis(&self) -> Axis {
        self.p_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_axis.n + j]
    }

    pub fn integral(&self) -> f64 {
        let wq = self.q_axis.weights();
        let wp = self.p_axis.weights();
        let mut total = 0.0;
        for (i, a) in wq.iter().enumerate() {
            let row = &self.values[i * self.p_axis.n..(i + 1) * self.p_axis.n];
            total += a * row.iter().zip(&wp).map(|(v, b)| v * b).sum::<f64>();
        }
        total
    }

    /// `∫∫ W dq dp / 2π`.
    pub fn normalization(&self) -> f64 {
        self.integral() / (2.0 * PI)
    }

    pub fn moments(&self) -> GridMoments {
        let wq = self.q_axis.weights();
        let wp = self.p_axis.weights();
        let qs = self.q_axis.points();
        let ps = self.p_axis.points();
        let mut m = [0.0f64; 6]; // 1, q, p, qq, pp, qp
        for i in 0..self.q_axis.n {
            for j in 0..self.p_axis.n {
                let w = self.get(i, j) * wq[i] * wp[j];
                let (q, p) = (qs[i], ps[j]);
                m[0] += w;
                m[1] += w * q;
                m[2] += w * p;
                m[3] += w * q * q;
                m[4] += w * p * p;
                m[5] += w * q * p;
            }
        }
        let norm = m[0];
        let mean_q = m[1] / norm;
        let mean_p = m[2] / norm;
        GridMoments {
            normalization: norm / (2.0 * PI),
            mean_q,
            mean_p,
            sigma_qq: m[3] / norm - mean_q * mean_q,
            sigma_pp: m[4] / norm - mean_p * mean_p,
            sigma_pq: m[5] / norm - mean_q * mean_p,
        }
    }

    /// Cubic-convolution (Catmull–Rom) interpolation, zero outside the grid.
    pub fn interpolate(&self, q: f64, p: f64) -> f64 {
        let u = (q - self.q_axis.min) / self.q_axis.step();
        let v = (p - self.p_axis.min) / self.p_axis.step();
        let (nq, np) = (self.q_axis.n as isize, self.p_axis.n as isize);
        if !(u > -1.0 && v > -1.0 && u < nq as f64 && v < np as f64) {
            return 0.0;
        }
        let (i0, tu) = (u.floor() as isize, u - u.floor());
        let (j0, tv) = (v.floor() as isize, v - v.floor());
        let wu = keys_weights(tu);
        let wv = keys_weights(tv);
        let mut acc = 0.0;
        for (di, a) in wu.iter().enumerate() {
            let i = i0 - 1 + di as isize;
            if i < 0 || i >= nq || *a == 0.0 {
                continue;
            }
            let row = i as usize * self.p_axis.n;
            for (dj, b) in wv.iter().enumerate() {
                let j = j0 - 1 + dj as isize;
                if j < 0 || j >= np {
                    continue;
                }
                acc += a * b * self.values[row + j as usize];
            }
        }
        acc
    }

    fn same_axes(&self, other: &WignerGrid) -> Result<()> {
        if self.q_axis != other.q_axis || self.p_axis != other.p_axis {
            return Err(Error::invalid("grids have different axes"));
        }
        Ok(())
    }

    /// `‖self − reference‖₂ / ‖reference‖₂` over the grid samples.
    pub fn rel_l2_error(&self, reference: &WignerGrid) -> Result<f64> {
        self.same_axes(reference)?;
        let (mut num, mut den) = (0.0, 0.0);
        for (a, b) in self.values.iter().zip(&reference.values) {
            num += (a - b) * (a - b);
            den += b * b;
        }
        Ok((num / den).sqrt())
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> Result<f64> {
        self.same_axes(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Sample closest to `(q, p)`, for diagnostics.
    pub fn nearest(&self, q: f64, p: f64) -> f64 {
        let i = ((q - self.q_axis.min) / self.q_axis.step()).round();
        let j = ((p - self.p_axis.min) / self.p_axis.step()).round();
        let i = (i.max(0.0) as usize).min(self.q_axis.n - 1);
        let j = (j.max(0.0) as usize).min(self.p_axis.n - 1);
        self.get(i, j)
    }

    /// Position of the largest sample.
    pub fn argmax(&self) -> (f64, f64) {
        let k = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        (self.q_axis.at(k / self.p_axis.n), self.p_axis.at(k % self.p_axis.n))
    }
}

fn keys_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::GaussianState;

    #[test]
    fn axis_basics() {
        let a = Axis::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(a.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!((a.weights().iter().sum::<f64>() - 2.0).abs() < 1e-15);
        assert!(Axis::new(1.0, 1.0, 5).is_err());
        assert!(Axis::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn rejects_non_finite_and_wrong_size() {
        let a = Axis::new(0.0, 1.0, 2).unwrap();
        assert!(WignerGrid::new(a, a, vec![0.0; 3]).is_err());
        assert!(WignerGrid::new(a, a, vec![0.0, 1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_accurate_between() {
        let axis = Axis::new(-6.0, 6.0, 241).unwrap();
        let g = GaussianState::new(0.2, -0.3, 0.6, 0.5, 0.1).unwrap();
        let grid = WignerGrid::sample(&g, axis, axis);
        let node = grid.get(120, 37);
        assert!((grid.interpolate(axis.at(120), axis.at(37)) - node).abs() <= 1e-12 * node);
        let err = (grid.interpolate(0.123, -0.456) - g.wigner(0.123, -0.456)).abs();
        assert!(err < 1e-4, "{err}");
        assert_eq!(grid.interpolate(10.0, 0.0), 0.0);
    }

    #[test]
    fn moments_of_gaussian() {
        let axis = Axis::new(-8.0, 8.0, 201).unwrap();
        let g = GaussianState::new(0.5, -0.4, 0.7, 0.45, -0.15).unwrap();
        let m = WignerGrid::sample(&g, axis, axis).moments();
        assert!((m.normalization - 1.0).abs() < 1e-10);
        assert!((m.mean_q - g.mean_q).abs() < 1e-10);
        assert!((m.mean_p - g.mean_p).abs() < 1e-10);
        assert!((m.sigma_qq - g.sigma_qq).abs() < 1e-10);
        assert!((m.sigma_pp - g.sigma_pp).abs() < 1e-10);
        assert!((m.sigma_pq - g.sigma_pq).abs() < 1e-10);
    }
}

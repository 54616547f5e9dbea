//! Tomograms by direct line integration of a Wigner function,
//! `w(X, μ, ν, δ) = (2π r)⁻¹ ∫ W dτ` along the line `μq + νp = X − δ`.
//!
//! This is the independent reference for every closed-form tomogram.

use std::f64::consts::PI;

use super::{check_frame, TomogramQuery};
use crate::error::Result;
use crate::states::{Wigner, WignerGrid};

/// Points of the trapezoid rule along the line.
pub const LINE_POINTS: usize = 2049;

/// Edge mass of a grid above which projections are flagged as truncated.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub value: f64,
    /// `Σ|W|·ΔqΔp / 2π` over the outermost ring of grid nodes.
    pub boundary_mass: f64,
}

impl Projection {
    pub fn is_truncated(&self) -> bool {
        self.boundary_mass > BOUNDARY_MASS_LIMIT
    }
}

struct Line {
    foot: (f64, f64),
    dir: (f64, f64),
    r: f64,
}

impl Line {
    fn new(q: &TomogramQuery) -> Result<Self> {
        let r2 = check_frame(q.mu, q.nu)?;
        let r = r2.sqrt();
        let y = q.y();
        Ok(Self {
            foot: (q.mu * y / r2, q.nu * y / r2),
            dir: (-q.nu / r, q.mu / r),
            r,
        })
    }

    fn point(&self, tau: f64) -> (f64, f64) {
        (self.foot.0 + tau * self.dir.0, self.foot.1 + tau * self.dir.1)
    }

    fn integrate<F: Fn(f64, f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let n = LINE_POINTS;
        let h = (hi - lo) / (n - 1) as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let (q, p) = self.point(lo + k as f64 * h);
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            acc += w * f(q, p);
        }
        acc * h / (2.0 * PI * self.r)
    }
}

/// Line integral of an analytic Wigner function over its support disk.
pub fn project_wigner_fn<W: Wigner + ?Sized>(wigner: &W, q: &TomogramQuery) -> Result<f64> {
    let line = Line::new(q)?;
    let s = wigner.support();
    let tau_c = (s.center_q - line.foot.0) * line.dir.0 + (s.center_p - line.foot.1) * line.dir.1;
    Ok(line.integrate(tau_c - s.radius, tau_c + s.radius, |q, p| wigner.wigner(q, p)))
}

/// Line integral of a gridded Wigner function (cubic interpolation), clipped
/// to the grid rectangle.
pub fn project_wigner(grid: &WignerGrid, q: &TomogramQuery) -> Result<Projection> {
    let line = Line::new(q)?;
    let boundary_mass = boundary_mass(grid);
    if boundary_mass > BOUNDARY_MASS_LIMIT {
        log::warn!("Wigner grid may truncate the support: boundary mass {boundary_mass:.3e}");
    }
    let (qa, pa) = (grid.q_axis(), grid.p_axis());
    let clip = |foot: f64, dir: f64, lo: f64, hi: f64| -> (f64, f64) {
        if dir.abs() < 1e-15 {
            if foot >= lo && foot <= hi {
                (f64::NEG_INFINITY, f64::INFINITY)
            } else {
                (f64::INFINITY, f64::NEG_INFINITY)
            }
        } else {
            let (a, b) = ((lo - foot) / dir, (hi - foot) / dir);
            (a.min(b), a.max(b))
        }
    };
    let (a0, a1) = clip(line.foot.0, line.dir.0, qa.min, qa.max);
    let (b0, b1) = clip(line.foot.1, line.dir.1, pa.min, pa.max);
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    let value = if hi > lo {
        line.integrate(lo, hi, |q, p| grid.interpolate(q, p))
    } else {
        0.0
    };
    Ok(Projection { value, boundary_mass })
}

fn boundary_mass(grid: &WignerGrid) -> f64 {
    let (qa, pa) = (grid.q_axis(), grid.p_axis());
    let mut sum = 0.0;
    for i in 0..qa.n {
        for j in 0..pa.n {
            if i == 0 || j == 0 || i + 1 == qa.n || j + 1 == pa.n {
                sum += grid.get(i, j).abs();
            }
        }
    }
    sum * qa.step() * pa.step() / (2.0 * PI)
}

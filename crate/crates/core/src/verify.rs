//! Numerical checks of the tomogram evolution equation
//! `∂ₜw − μ ∂_ν w + ω²(t) ν ∂_μ w = 0`, of the moment equations of motion,
//! and of the structural tomogram properties.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::oscillator::{symplectic_map, EpsilonTrajectory, ModeFunction, OscillatorParams};
use crate::states::{eval_wavefunction, gaussian_from_epsilon, Axis, GaussianState, WavefunctionKind};
use crate::tomography::{evolve_tomogram, tomogram_gaussian, Tomogram, TomogramQuery};

/// Accepted range of the measured order of a second-order stencil.
pub const ORDER_RANGE: (f64, f64) = (1.7, 2.3);

/// Residuals below this are treated as roundoff; no order is estimated.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Homogeneity is checked to this relative tolerance.
pub const HOMOGENEITY_TOLERANCE: f64 = 1e-10;

/// `λ` values of the homogeneity check.
pub const HOMOGENEITY_LAMBDAS: [f64; 3] = [-2.0, 0.5, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range {
    fn axis(&self) -> Result<Axis> {
        Axis::new(self.min, self.max, self.n)
    }
}

/// Tensor grid of `(X, μ, ν, t)` probe points, repeated for each `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeGrid {
    pub x: Range,
    pub mu: Range,
    pub nu: Range,
    pub t: Range,
    pub deltas: Vec<f64>,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self {
            x: Range { min: -2.0, max: 2.0, n: 5 },
            mu: Range { min: 0.25, max: 1.25, n: 5 },
            nu: Range { min: -1.0, max: 1.0, n: 5 },
            t: Range { min: 0.5, max: 4.5, n: 5 },
            deltas: vec![-1.0, 0.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub query: TomogramQuery,
    pub t: f64,
}

impl ProbeGrid {
    pub fn validate(&self) -> Result<()> {
        for r in [&self.x, &self.mu, &self.nu, &self.t] {
            r.axis()?;
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("probe grid needs finite delta values"));
        }
        if self.t.min <= 0.0 {
            return Err(Error::invalid("probe times must be positive"));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<Probe>> {
        self.validate()?;
        let (xs, mus, nus, ts) = (
            self.x.axis()?.points(),
            self.mu.axis()?.points(),
            self.nu.axis()?.points(),
            self.t.axis()?.points(),
        );
        let mut out = Vec::with_capacity(xs.len() * mus.len() * nus.len() * ts.len() * self.deltas.len());
        for &t in &ts {
            for &delta in &self.deltas {
                for &mu in &mus {
                    for &nu in &nus {
                        for &x in &xs {
                            out.push(Probe { query: TomogramQuery::new(x, mu, nu, delta), t });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub probe_grid: Option<ProbeGrid>,
    pub points: usize,
    pub max_abs_residual: f64,
    pub rms_residual: f64,
    pub h_t: f64,
    pub h_mu: f64,
    pub h_nu: f64,
    /// Max residual with all steps halved.
    pub max_abs_residual_half: f64,
    /// `log₂` of the residual ratio between `h` and `h/2`; `None` at the
    /// noise floor.
    pub order: Option<f64>,
}

impl ResidualReport {
    pub fn order_ok(&self) -> bool {
        match self.order {
            Some(p) => p >= ORDER_RANGE.0 && p <= ORDER_RANGE.1,
            None => self.max_abs_residual < NOISE_FLOOR,
        }
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.max_abs_residual < threshold && self.order_ok()
    }
}

fn estimate_order(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > NOISE_FLOOR && fine > 0.0).then(|| (coarse / fine).log2())
}

/// A tomogram as a function of time, `w(X, μ, ν, δ, t)`.
pub trait TomogramEvolution: Sync {
    fn params(&self) -> &OscillatorParams;

    /// Evaluates at time `t`, integrating the mode function from sample
    /// `base` of the underlying trajectory.
    fn eval_from(&self, base: usize, q: &TomogramQuery, t: f64) -> Result<f64>;

    fn trajectory(&self) -> &EpsilonTrajectory;

    fn eval(&self, q: &TomogramQuery, t: f64) -> Result<f64> {
        let base = self.trajectory().sample_before(t)?;
        self.eval_from(base, q, t)
    }
}

/// Frame replacement `w₀(Y, μ(t), ν(t))` of an initial tomogram.
pub struct ReplacementEvolution<'a, T> {
    pub initial: T,
    pub traj: &'a EpsilonTrajectory,
}

impl<T: Tomogram> TomogramEvolution for ReplacementEvolution<'_, T> {
    fn params(&self) -> &OscillatorParams {
        self.traj.params()
    }
    fn trajectory(&self) -> &EpsilonTrajectory {
        self.traj
    }
    fn eval_from(&self, base: usize, q: &TomogramQuery, t: f64) -> Result<f64> {
        evolve_tomogram(&self.initial, &self.traj.propagate_from(base, t), q)
    }
}

/// Gaussian tomogram built directly from the time-`t` moments.
pub struct GaussianEvolution<'a> {
    pub alpha: Complex64,
    pub traj: &'a EpsilonTrajectory,
}

impl TomogramEvolution for GaussianEvolution<'_> {
    fn params(&self) -> &OscillatorParams {
        self.traj.params()
    }
    fn trajectory(&self) -> &EpsilonTrajectory {
        self.traj
    }
    fn eval_from(&self, base: usize, q: &TomogramQuery, t: f64) -> Result<f64> {
        let state = gaussian_from_epsilon(&self.traj.propagate_from(base, t), self.alpha)?;
        tomogram_gaussian(&state, q)
    }
}

/// Negative control: `μ` is held fixed while `ν` follows the dynamics.
pub struct FrozenEvolution<'a, T> {
    pub initial: T,
    pub traj: &'a EpsilonTrajectory,
}

impl<T: Tomogram> TomogramEvolution for FrozenEvolution<'_, T> {
    fn params(&self) -> &OscillatorParams {
        self.traj.params()
    }
    fn trajectory(&self) -> &EpsilonTrajectory {
        self.traj
    }
    fn eval_from(&self, base: usize, q: &TomogramQuery, t: f64) -> Result<f64> {
        let map = symplectic_map(&self.traj.propagate_from(base, t))?;
        let (_, nu_t) = map.frame(q.mu, q.nu);
        self.initial.density(q.y(), q.mu, nu_t)
    }
}

fn residual_at<E: TomogramEvolution + ?Sized>(evo: &E, p: &Probe, h: f64) -> Result<f64> {
    let base = evo.trajectory().sample_before(p.t - h)?;
    let q = p.query;
    let at = |mu: f64, nu: f64, t: f64| evo.eval_from(base, &TomogramQuery { mu, nu, ..q }, t);
    let dt = (at(q.mu, q.nu, p.t + h)? - at(q.mu, q.nu, p.t - h)?) / (2.0 * h);
    let dmu = (at(q.mu + h, q.nu, p.t)? - at(q.mu - h, q.nu, p.t)?) / (2.0 * h);
    let dnu = (at(q.mu, q.nu + h, p.t)? - at(q.mu, q.nu - h, p.t)?) / (2.0 * h);
    let r = dt - q.mu * dnu + evo.params().omega_squared(p.t) * q.nu * dmu;
    if !r.is_finite() {
        return Err(Error::NonFinite(format!("evolution residual at {p:?}")));
    }
    Ok(r)
}

fn residuals<E: TomogramEvolution + ?Sized>(evo: &E, probes: &[Probe], h: f64) -> Result<Vec<f64>> {
    probes.par_iter().map(|p| residual_at(evo, p, h)).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, r| m.max(r.abs()))
}

fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|r| r * r).sum::<f64>() / v.len() as f64).sqrt()
}

/// Central-difference residual of the evolution equation on every probe,
/// at step `h` and `h/2`.
pub fn pde_residual<E: TomogramEvolution + ?Sized>(
    name: &str,
    evo: &E,
    grid: &ProbeGrid,
    h: f64,
) -> Result<ResidualReport> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {h}")));
    }
    let probes = grid.points()?;
    let coarse = residuals(evo, &probes, h)?;
    let fine = residuals(evo, &probes, h / 2.0)?;
    let (max_c, max_f) = (max_abs(&coarse), max_abs(&fine));
    Ok(ResidualReport {
        name: name.to_owned(),
        probe_grid: Some(grid.clone()),
        points: probes.len(),
        max_abs_residual: max_c,
        rms_residual: rms(&coarse),
        h_t: h,
        h_mu: h,
        h_nu: h,
        max_abs_residual_half: max_f,
        order: estimate_order(max_c, max_f),
    })
}

/// `(⟨q⟩, ⟨p⟩, σqq, σpq, σpp)`.
fn moment_vector(s: &GaussianState) -> [f64; 5] {
    [s.mean_q, s.mean_p, s.sigma_qq, s.sigma_pq, s.sigma_pp]
}

fn moment_residuals(
    traj: &EpsilonTrajectory,
    alpha: Complex64,
    times: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    times
        .par_iter()
        .map(|&t| {
            let base = traj.sample_before(t - h)?;
            let m = |t| gaussian_from_epsilon(&traj.propagate_from(base, t), alpha).map(|s| moment_vector(&s));
            let (lo, mid, hi) = (m(t - h)?, m(t)?, m(t + h)?);
            let d: Vec<f64> = (0..5).map(|k| (hi[k] - lo[k]) / (2.0 * h)).collect();
            let w2 = traj.params().omega_squared(t);
            let [q, p, sqq, spq, spp] = mid;
            let r = [
                d[0] - p,
                d[1] + w2 * q,
                d[2] - 2.0 * spq,
                d[3] - (spp - w2 * sqq),
                d[4] + 2.0 * w2 * spq,
            ];
            Ok(r.iter().fold(0.0f64, |a, v| a.max(v.abs())))
        })
        .collect()
}

/// Finite-difference check of `d⟨q⟩/dt = ⟨p⟩`, `d⟨p⟩/dt = −ω²⟨q⟩`,
/// `σ̇qq = 2σpq`, `σ̇pq = σpp − ω²σqq`, `σ̇pp = −2ω²σpq` at `n_times`
/// interior times.
pub fn moment_odes_check(
    traj: &EpsilonTrajectory,
    alpha: Complex64,
    h: f64,
    n_times: usize,
) -> Result<ResidualReport> {
    if !(h > 0.0) || n_times < 1 {
        return Err(Error::invalid("moment check needs h > 0 and at least one time"));
    }
    let (lo, hi) = (2.0 * h, traj.t_end() - 2.0 * h);
    if hi <= lo {
        return Err(Error::invalid("trajectory too short for the moment check"));
    }
    let times: Vec<f64> = if n_times == 1 {
        vec![0.5 * (lo + hi)]
    } else {
        Axis::new(lo, hi, n_times)?.points()
    };
    let coarse = moment_residuals(traj, alpha, &times, h)?;
    let fine = moment_residuals(traj, alpha, &times, h / 2.0)?;
    let (max_c, max_f) = (max_abs(&coarse), max_abs(&fine));
    Ok(ResidualReport {
        name: "moment_odes".to_owned(),
        probe_grid: None,
        points: times.len(),
        max_abs_residual: max_c,
        rms_residual: rms(&coarse),
        h_t: h,
        h_mu: 0.0,
        h_nu: 0.0,
        max_abs_residual_half: max_f,
        order: estimate_order(max_c, max_f),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_qq: f64,
    pub sigma_pp: f64,
    pub sigma_pq: f64,
}

impl MomentSet {
    pub fn max_abs_diff(&self, s: &GaussianState) -> f64 {
        [
            self.mean_q - s.mean_q,
            self.mean_p - s.mean_p,
            self.sigma_qq - s.sigma_qq,
            self.sigma_pp - s.sigma_pp,
            self.sigma_pq - s.sigma_pq,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

fn quadrature_moments(kind: &WavefunctionKind, mode: &ModeFunction, alpha: Complex64, n: usize) -> Result<MomentSet> {
    let center = SQRT_2 * (alpha * mode.eps.conj()).re;
    let half = 12.0 * mode.eps.norm();
    let axis = Axis::new(center - half, center + half, n)?;
    let log_deriv = |x: f64| Complex64::i() * mode.deps * x / mode.eps + SQRT_2 * alpha / mode.eps;
    let mut s = [0.0f64; 6];
    for (i, w) in axis.weights().into_iter().enumerate() {
        let x = axis.at(i);
        let psi = eval_wavefunction(kind, mode, x)?;
        let rho = psi.norm_sqr();
        let dpsi = log_deriv(x) * psi;
        // ⟨p⟩ density: Re(Ψ* (−i) Ψ')
        let p_dens = (psi.conj() * -Complex64::i() * dpsi).re;
        s[0] += w * rho;
        s[1] += w * x * rho;
        s[2] += w * x * x * rho;
        s[3] += w * p_dens;
        s[4] += w * dpsi.norm_sqr();
        s[5] += w * x * p_dens;
    }
    let norm = s[0];
    let mean_q = s[1] / norm;
    let mean_p = s[3] / norm;
    Ok(MomentSet {
        mean_q,
        mean_p,
        sigma_qq: s[2] / norm - mean_q * mean_q,
        sigma_pp: s[4] / norm - mean_p * mean_p,
        sigma_pq: s[5] / norm - mean_q * mean_p,
    })
}

/// First and second moments of a ground or coherent wavefunction by direct
/// quadrature in `x`, with `Ψ'` taken from the closed form. The point count
/// is doubled until successive results agree to `1e-12`.
pub fn wavefunction_moment_oracle(kind: &WavefunctionKind, mode: &ModeFunction) -> Result<MomentSet> {
    let alpha = match *kind {
        WavefunctionKind::Ground => Complex64::new(0.0, 0.0),
        WavefunctionKind::Coherent(a) => a,
        _ => return Err(Error::invalid("moment oracle supports ground and coherent states only")),
    };
    mode.check()?;
    let mut n = 401;
    let mut prev = quadrature_moments(kind, mode, alpha, n)?;
    for _ in 0..6 {
        n = 2 * n - 1;
        let next = quadrature_moments(kind, mode, alpha, n)?;
        let diff = [
            next.mean_q - prev.mean_q,
            next.mean_p - prev.mean_p,
            next.sigma_qq - prev.sigma_qq,
            next.sigma_pp - prev.sigma_pp,
            next.sigma_pq - prev.sigma_pq,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        if diff < 1e-12 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence(format!("moment quadrature did not settle by n = {n}")))
}

/// `max |w(X, μ, ν, δ) − w(X − δ, μ, ν, 0)|` over the probes.
pub fn delta_covariance_defect<T: Tomogram + ?Sized>(tomo: &T, queries: &[TomogramQuery]) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in queries {
        let a = tomo.eval(q)?;
        let b = tomo.eval(&TomogramQuery::new(q.x - q.delta, q.mu, q.nu, 0.0))?;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// Largest relative defect of `|λ| w(λY, λμ, λν) = w(Y, μ, ν)` over the
/// probes and [`HOMOGENEITY_LAMBDAS`].
pub fn homogeneity_defect<T: Tomogram + ?Sized>(tomo: &T, queries: &[TomogramQuery]) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in queries {
        let y = q.y();
        let base = tomo.density(y, q.mu, q.nu)?;
        for l in HOMOGENEITY_LAMBDAS {
            let scaled = l.abs() * tomo.density(l * y, l * q.mu, l * q.nu)?;
            worst = worst.max((scaled - base).abs() / base.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Largest `|∫ w dX − 1|` over the given frames.
pub fn normalization_defect<T: Tomogram + ?Sized>(tomo: &T, frames: &[(f64, f64)], n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(mu, nu) in frames {
        worst = worst.max((tomo.integral(mu, nu, n)? - 1.0).abs());
    }
    Ok(worst)
}

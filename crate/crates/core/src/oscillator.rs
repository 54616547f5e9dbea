//! Classical mode function of the trapped ion.
//!
//! The ion is a parametric oscillator with `ω²(t) = 1 + κ² sin²(Ωt)` (units
//! with `ħ = m = ω(0) = 1`). Everything quantum about the Gaussian and cat
//! states reduces to the complex solution `ε(t)` of
//!
//! ```text
//! ε̈ + ω²(t) ε = 0,   ε(0) = 1,   ε̇(0) = i
//! ```
//!
//! and the linear phase-space map built from `(ε, ε̇)`.
//!
//! Large products `κΩ` make the mode oscillate quickly; the sample grid is
//! user controlled through `n_steps` and should be refined accordingly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used by [`ModeFunction::check`].
pub const WRONSKIAN_TOLERANCE: f64 = 1e-6;

/// Default local error tolerance for [`solve_epsilon`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default number of output samples per unit time.
pub const DEFAULT_SAMPLES_PER_UNIT: f64 = 100.0;

/// Tolerances below this cannot be met in double precision.
const MIN_TOL: f64 = 100.0 * f64::EPSILON;

const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    kappa: f64,
    omega_drive: f64,
}

impl OscillatorParams {
    pub fn new(kappa: f64, omega_drive: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::invalid(format!("kappa must be finite and >= 0, got {kappa}")));
        }
        if !(omega_drive.is_finite() && omega_drive > 0.0) {
            return Err(Error::invalid(format!(
                "drive frequency must be finite and > 0, got {omega_drive}"
            )));
        }
        Ok(Self { kappa, omega_drive })
    }

    /// Static trap, `κ = 0`.
    pub fn static_trap() -> Self {
        Self { kappa: 0.0, omega_drive: 1.0 }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn omega_drive(&self) -> f64 {
        self.omega_drive
    }

    pub fn omega_squared(&self, t: f64) -> f64 {
        omega_squared(t, self)
    }

    /// Upper bound of `ω(t)` over all times.
    pub fn omega_max(&self) -> f64 {
        (1.0 + self.kappa * self.kappa).sqrt()
    }
}

/// `ω²(t) = 1 + κ² sin²(Ωt)`.
pub fn omega_squared(t: f64, params: &OscillatorParams) -> f64 {
    let s = (params.omega_drive * t).sin();
    1.0 + params.kappa * params.kappa * s * s
}

/// A point `(ε, ε̇)` of the mode function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeFunction {
    pub eps: Complex64,
    pub deps: Complex64,
}

impl ModeFunction {
    /// `ε = 1`, `ε̇ = i`.
    pub const INITIAL: ModeFunction = ModeFunction {
        eps: Complex64::new(1.0, 0.0),
        deps: Complex64::new(0.0, 1.0),
    };

    pub fn new(eps: Complex64, deps: Complex64) -> Self {
        Self { eps, deps }
    }

    /// Exact solution of the static trap, `ε = e^{it}`.
    pub fn free(t: f64) -> Self {
        let eps = Complex64::from_polar(1.0, t);
        Self { eps, deps: Complex64::i() * eps }
    }

    /// `Im(ε*·ε̇)`, identically 1 along exact trajectories.
    pub fn wronskian(&self) -> f64 {
        (self.eps.conj() * self.deps).im
    }

    pub fn check(&self) -> Result<()> {
        let w = self.wronskian();
        if (w - 1.0).abs() < WRONSKIAN_TOLERANCE {
            Ok(())
        } else {
            Err(Error::WronskianViolation { wronskian: w })
        }
    }
}

impl Default for ModeFunction {
    fn default() -> Self {
        Self::INITIAL
    }
}

/// Sampled solution `ε(tᵢ), ε̇(tᵢ)` on a uniform grid starting at `t = 0`.
#[derive(Debug, Clone)]
pub struct EpsilonTrajectory {
    params: OscillatorParams,
    times: Vec<f64>,
    eps: Vec<Complex64>,
    deps: Vec<Complex64>,
}

impl EpsilonTrajectory {
    pub fn params(&self) -> &OscillatorParams {
        &self.params
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn eps(&self) -> &[Complex64] {
        &self.eps
    }

    pub fn deps(&self) -> &[Complex64] {
        &self.deps
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has samples")
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn mode(&self, i: usize) -> ModeFunction {
        ModeFunction { eps: self.eps[i], deps: self.deps[i] }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeFunction> + '_ {
        self.eps
            .iter()
            .zip(&self.deps)
            .map(|(&eps, &deps)| ModeFunction { eps, deps })
    }

    /// Largest `|Im(ε*ε̇) − 1|` over the samples.
    pub fn max_wronskian_deviation(&self) -> f64 {
        self.modes()
            .map(|m| (m.wronskian() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn bracket(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0 && t <= self.t_end()) {
            return Err(Error::invalid(format!(
                "t = {t} outside trajectory range [0, {}]",
                self.t_end()
            )));
        }
        let i = ((t / self.step()).floor() as usize).min(self.len() - 2);
        Ok(i)
    }

    /// Linear interpolation between neighbouring samples, `O(h²)` accurate.
    pub fn interpolate(&self, t: f64) -> Result<ModeFunction> {
        let i = self.bracket(t)?;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(ModeFunction {
            eps: self.eps[i] * (1.0 - w) + self.eps[i + 1] * w,
            deps: self.deps[i] * (1.0 - w) + self.deps[i + 1] * w,
        })
    }

    /// Accurate off-grid value: integrates from the preceding sample with
    /// short fixed RK4 substeps. Smooth in `t`, so it is safe to difference.
    pub fn propagate_to(&self, t: f64) -> Result<ModeFunction> {
        let i = self.bracket(t)?;
        Ok(self.propagate_from(i, t))
    }

    /// Index of the sample at or before `t`.
    pub fn sample_before(&self, t: f64) -> Result<usize> {
        self.bracket(t)
    }

    /// Integrates from sample `i` to `t` (either direction). Differencing
    /// values that share the same `i` avoids jumps from sample errors.
    pub fn propagate_from(&self, i: usize, t: f64) -> ModeFunction {
        propagate_fixed(&self.params, self.times[i], t, self.mode(i))
    }
}

type State = [Complex64; 2];

#[inline]
fn rhs(params: &OscillatorParams, t: f64, y: &State) -> State {
    [y[1], -omega_squared(t, params) * y[0]]
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            out[0] += k[0] * (h * c);
            out[1] += k[1] * (h * c);
        }
    }
    out
}

fn rk4_step(params: &OscillatorParams, t: f64, y: &State, h: f64) -> State {
    let k1 = rhs(params, t, y);
    let k2 = rhs(params, t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]));
    let k3 = rhs(params, t + 0.5 * h, &axpy(y, h, &[(0.5, &k2)]));
    let k4 = rhs(params, t + h, &axpy(y, h, &[(1.0, &k3)]));
    axpy(y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)])
}

fn propagate_fixed(params: &OscillatorParams, t0: f64, t1: f64, start: ModeFunction) -> ModeFunction {
    let dt = t1 - t0;
    if dt == 0.0 {
        return start;
    }
    let h_max = 2e-4 / params.omega_max().max(params.omega_drive);
    let n = (dt.abs() / h_max).ceil().max(1.0) as usize;
    let h = dt / n as f64;
    let mut y = [start.eps, start.deps];
    for k in 0..n {
        y = rk4_step(params, t0 + k as f64 * h, &y, h);
    }
    ModeFunction { eps: y[0], deps: y[1] }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step; returns the 5th-order solution and the scaled
/// error norm (accept when `<= 1`).
fn dopri_step(params: &OscillatorParams, t: f64, y: &State, h: f64, tol: f64) -> (State, f64) {
    let k1 = rhs(params, t, y);
    let k2 = rhs(params, t + C[1] * h, &axpy(y, h, &[(A2[0], &k1)]));
    let k3 = rhs(params, t + C[2] * h, &axpy(y, h, &[(A3[0], &k1), (A3[1], &k2)]));
    let k4 = rhs(
        params,
        t + C[3] * h,
        &axpy(y, h, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]),
    );
    let k5 = rhs(
        params,
        t + C[4] * h,
        &axpy(y, h, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]),
    );
    let k6 = rhs(
        params,
        t + C[5] * h,
        &axpy(
            y,
            h,
            &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(B[0], &k1), (B[2], &k3), (B[3], &k4), (B[4], &k5), (B[5], &k6)],
    );
    let k7 = rhs(params, t + h, &y_new);
    let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = 0.0f64;
    for comp in 0..2 {
        let mut e = Complex64::new(0.0, 0.0);
        for (c, k) in E.iter().zip(ks) {
            e += k[comp] * *c;
        }
        let scale = tol * (1.0 + y[comp].norm().max(y_new[comp].norm()));
        err = err.max((e * h).norm() / scale);
    }
    (y_new, err)
}

/// Solves the mode equation on `n_steps` uniform intervals of `[0, t_end]`.
///
/// Each interval is covered by adaptive Dormand–Prince 5(4) substeps with the
/// local error held below `tol` (mixed absolute/relative). The returned
/// trajectory has `n_steps + 1` samples.
pub fn solve_epsilon(
    params: &OscillatorParams,
    t_end: f64,
    n_steps: usize,
    tol: f64,
) -> Result<EpsilonTrajectory> {
    validate_grid(t_end, n_steps)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0, got {tol}")));
    }
    if tol < MIN_TOL {
        return Err(Error::SolverFailure {
            t: 0.0,
            reason: format!("tolerance {tol:e} is below attainable precision {MIN_TOL:e}"),
        });
    }

    let dt = t_end / n_steps as f64;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut eps = Vec::with_capacity(n_steps + 1);
    let mut deps = Vec::with_capacity(n_steps + 1);

    let mut y: State = [ModeFunction::INITIAL.eps, ModeFunction::INITIAL.deps];
    times.push(0.0);
    eps.push(y[0]);
    deps.push(y[1]);

    let mut h = dt.min(0.1 / params.omega_max().max(params.omega_drive));
    let mut steps = 0usize;
    for i in 0..n_steps {
        let t_start = i as f64 * dt;
        let t_stop = (i + 1) as f64 * dt;
        let mut t = t_start;
        while t < t_stop {
            let last = t + h >= t_stop;
            let h_try = if last { t_stop - t } else { h };
            let (y_new, err) = dopri_step(params, t, &y, h_try, tol);
            if !err.is_finite() {
                return Err(Error::SolverFailure { t, reason: "non-finite error estimate".into() });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { t_stop } else { t + h_try };
                y = y_new;
                // A clipped final step says nothing about the natural size.
                if !last || factor < 1.0 {
                    h = h_try * factor;
                }
            } else {
                h = h_try * factor;
            }
            if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::SolverFailure {
                    t,
                    reason: format!("step size underflow (h = {h:e}) at tol = {tol:e}"),
                });
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::SolverFailure { t, reason: "step budget exhausted".into() });
            }
        }
        times.push(t_stop);
        eps.push(y[0]);
        deps.push(y[1]);
    }

    Ok(EpsilonTrajectory { params: *params, times, eps, deps })
}

/// Classical RK4 with exactly one step per interval. Used for
/// grid-refinement studies, where a fixed order is needed.
pub fn solve_epsilon_rk4(
    params: &OscillatorParams,
    t_end: f64,
    n_steps: usize,
) -> Result<EpsilonTrajectory> {
    validate_grid(t_end, n_steps)?;
    let h = t_end / n_steps as f64;
    let mut y: State = [ModeFunction::INITIAL.eps, ModeFunction::INITIAL.deps];
    let mut times = vec![0.0];
    let mut eps = vec![y[0]];
    let mut deps = vec![y[1]];
    for i in 0..n_steps {
        y = rk4_step(params, i as f64 * h, &y, h);
        times.push((i + 1) as f64 * h);
        eps.push(y[0]);
        deps.push(y[1]);
    }
    Ok(EpsilonTrajectory { params: *params, times, eps, deps })
}

fn validate_grid(t_end: f64, n_steps: usize) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid(format!("t_end must be > 0, got {t_end}")));
    }
    if n_steps < 2 {
        return Err(Error::invalid(format!("n_steps must be >= 2, got {n_steps}")));
    }
    Ok(())
}

/// Linear phase-space map from `(p, q)` at time `t` to the initial point
/// `(p₀, q₀)` of the classical trajectory through it:
///
/// ```text
/// p₀ =  Re(ε)·p − Re(ε̇)·q
/// q₀ = −Im(ε)·p + Im(ε̇)·q
/// ```
///
/// Its determinant is the Wronskian, hence 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMap {
    pub lambda_pp: f64,
    pub lambda_pq: f64,
    pub lambda_qp: f64,
    pub lambda_qq: f64,
}

impl SymplecticMap {
    pub const IDENTITY: SymplecticMap = SymplecticMap {
        lambda_pp: 1.0,
        lambda_pq: 0.0,
        lambda_qp: 0.0,
        lambda_qq: 1.0,
    };

    pub fn determinant(&self) -> f64 {
        self.lambda_pp * self.lambda_qq - self.lambda_pq * self.lambda_qp
    }

    /// `(p, q) ↦ (p₀, q₀)`.
    pub fn apply(&self, p: f64, q: f64) -> (f64, f64) {
        (
            self.lambda_pp * p + self.lambda_pq * q,
            self.lambda_qp * p + self.lambda_qq * q,
        )
    }

    /// Inverse map `(p₀, q₀) ↦ (p, q)`, i.e. the classical flow.
    pub fn apply_inverse(&self, p0: f64, q0: f64) -> (f64, f64) {
        let det = self.determinant();
        (
            (self.lambda_qq * p0 - self.lambda_pq * q0) / det,
            (-self.lambda_qp * p0 + self.lambda_pp * q0) / det,
        )
    }

    /// Frame replacement for tomograms:
    /// `μ(t) = Re(ε̇)ν + Re(ε)μ`, `ν(t) = Im(ε̇)ν + Im(ε)μ`.
    pub fn frame(&self, mu: f64, nu: f64) -> (f64, f64) {
        (
            self.lambda_pp * mu - self.lambda_pq * nu,
            -self.lambda_qp * mu + self.lambda_qq * nu,
        )
    }

    /// Spectral norm (largest singular value).
    pub fn norm(&self) -> f64 {
        let fro2 = self.lambda_pp.powi(2)
            + self.lambda_pq.powi(2)
            + self.lambda_qp.powi(2)
            + self.lambda_qq.powi(2);
        let det = self.determinant();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        ((fro2 + disc) / 2.0).sqrt()
    }
}

pub fn symplectic_map(mode: &ModeFunction) -> Result<SymplecticMap> {
    mode.check()?;
    Ok(SymplecticMap {
        lambda_pp: mode.eps.re,
        lambda_pq: -mode.deps.re,
        lambda_qp: -mode.eps.im,
        lambda_qq: mode.deps.im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn omega_squared_values() {
        let p = OscillatorParams::new(0.5, 2.0).unwrap();
        assert_eq!(omega_squared(0.0, &p), 1.0);
        let p0 = OscillatorParams::new(0.0, 3.7).unwrap();
        assert_eq!(omega_squared(12.3, &p0), 1.0);
        let p1 = OscillatorParams::new(1.0, 1.0).unwrap();
        assert!((omega_squared(FRAC_PI_4, &p1) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(OscillatorParams::new(-0.1, 1.0).is_err());
        assert!(OscillatorParams::new(0.1, 0.0).is_err());
        assert!(OscillatorParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn static_trap_quarter_period() {
        let traj = solve_epsilon(&OscillatorParams::static_trap(), FRAC_PI_2, 50, 1e-12).unwrap();
        let m = traj.mode(traj.len() - 1);
        assert!((m.eps - Complex64::i()).norm() < 1e-10);
        assert!((m.deps + 1.0).norm() < 1e-10);
    }

    #[test]
    fn wronskian_and_closed_form() {
        let p = OscillatorParams::static_trap();
        let tol = 1e-11;
        let traj = solve_epsilon(&p, 20.0, 2000, tol).unwrap();
        assert!(traj.max_wronskian_deviation() <= 10.0 * tol);
        let sup = traj
            .times()
            .iter()
            .zip(traj.eps())
            .map(|(&t, &e)| (e - Complex64::from_polar(1.0, t)).norm())
            .fold(0.0, f64::max);
        assert!(sup <= 100.0 * tol, "sup = {sup:e}");
    }

    #[test]
    fn driven_wronskian() {
        let p = OscillatorParams::new(1.0, 2.0).unwrap();
        let tol = 1e-10;
        let traj = solve_epsilon(&p, 20.0, 400, tol).unwrap();
        assert!(traj.max_wronskian_deviation() <= 10.0 * tol);
    }

    #[test]
    fn unreachable_tolerance_fails() {
        let p = OscillatorParams::new(0.4, 2.0).unwrap();
        let err = solve_epsilon(&p, 1.0, 10, 1e-20).unwrap_err();
        assert!(matches!(err, Error::SolverFailure { .. }));
    }

    #[test]
    fn bad_grid_rejected() {
        let p = OscillatorParams::static_trap();
        assert!(solve_epsilon(&p, 0.0, 10, 1e-10).is_err());
        assert!(solve_epsilon(&p, 1.0, 1, 1e-10).is_err());
        assert!(solve_epsilon(&p, 1.0, 10, -1.0).is_err());
    }

    #[test]
    fn rk4_grid_refinement_is_fourth_order() {
        let p = OscillatorParams::new(0.4, 2.0).unwrap();
        let reference = solve_epsilon(&p, 5.0, 10, 1e-13).unwrap();
        let exact = reference.mode(10).eps;
        let err = |n| {
            let t = solve_epsilon_rk4(&p, 5.0, n).unwrap();
            (t.mode(n).eps - exact).norm()
        };
        let (e1, e2) = (err(100), err(200));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn interpolation_and_propagation() {
        let p = OscillatorParams::static_trap();
        let traj = solve_epsilon(&p, 2.0, 200, 1e-12).unwrap();
        let t = 1.2345;
        let lin = traj.interpolate(t).unwrap();
        let acc = traj.propagate_to(t).unwrap();
        let exact = ModeFunction::free(t);
        assert!((lin.eps - exact.eps).norm() < 1e-4);
        assert!((acc.eps - exact.eps).norm() < 1e-11);
        assert!((acc.deps - exact.deps).norm() < 1e-11);
        assert!(traj.interpolate(2.5).is_err());
        assert!(traj.propagate_to(-0.1).is_err());
    }

    #[test]
    fn identity_and_rotation_maps() {
        let id = symplectic_map(&ModeFunction::INITIAL).unwrap();
        assert_eq!(id, SymplecticMap::IDENTITY);
        let rot = symplectic_map(&ModeFunction::new(Complex64::i(), Complex64::new(-1.0, 0.0)))
            .unwrap();
        let (p0, q0) = rot.apply(0.3, 0.7);
        assert!((p0 - 0.7).abs() < 1e-15);
        assert!((q0 + 0.3).abs() < 1e-15);
        assert!((rot.determinant() - 1.0).abs() < 1e-15);
        let (p, q) = rot.apply_inverse(p0, q0);
        assert!((p - 0.3).abs() < 1e-15 && (q - 0.7).abs() < 1e-15);
    }

    #[test]
    fn map_matches_harmonic_flow() {
        // At κ = 0 the classical flow is q = q₀cos t + p₀sin t, p = p₀cos t − q₀sin t.
        let t = 0.9;
        let map = symplectic_map(&ModeFunction::free(t)).unwrap();
        let (p0, q0) = (0.4, -1.1);
        let (p, q) = map.apply_inverse(p0, q0);
        assert!((q - (q0 * t.cos() + p0 * t.sin())).abs() < 1e-14);
        assert!((p - (p0 * t.cos() - q0 * t.sin())).abs() < 1e-14);
        assert!((map.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wronskian_violation_rejected() {
        let bad = ModeFunction::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0));
        assert!(matches!(symplectic_map(&bad), Err(Error::WronskianViolation { .. })));
    }
}

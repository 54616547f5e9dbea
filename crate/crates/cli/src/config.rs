use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use symtomo::io::Format;
use symtomo::oscillator::{DEFAULT_SAMPLES_PER_UNIT, DEFAULT_TOL};
use symtomo::states::{Axis, CatSpec, Parity};
use symtomo::tomography::{FbpOptions, FourierInversion, TomogramQuery};
use symtomo::verify::ProbeGrid;
use symtomo::{Complex64, OscillatorParams};

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub state: Option<StateConfig>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub tomogram: Option<TomogramConfig>,
    #[serde(default)]
    pub reconstruct: Option<ReconstructConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Reserved for sampling features; validated but unused.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    pub kappa: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub t_end: f64,
    pub samples_per_unit: f64,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { t_end: 20.0, samples_per_unit: DEFAULT_SAMPLES_PER_UNIT, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateConfig {
    /// Coherent state `α` (vacuum for `α = 0`).
    Gaussian {
        #[serde(default)]
        alpha: [f64; 2],
    },
    Cat {
        alpha: [f64; 2],
        #[serde(default = "even")]
        parity: Parity,
    },
    Number {
        m: u32,
    },
}

fn even() -> Parity {
    Parity::Even
}

impl StateConfig {
    pub fn alpha(&self) -> Complex64 {
        match *self {
            StateConfig::Gaussian { alpha } | StateConfig::Cat { alpha, .. } => {
                Complex64::new(alpha[0], alpha[1])
            }
            StateConfig::Number { .. } => Complex64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum TomogramConfig {
    /// Optical slices `φₖ = kπ/n_phi` on a uniform `X` grid.
    Sinogram { n_phi: usize, x: Axis },
    Points { queries: Vec<TomogramQuery> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fbp,
    Fourier,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    pub method: Method,
    /// Sinogram file, required for `fbp`.
    #[serde(default)]
    pub input: Option<PathBuf>,
    pub q: Axis,
    pub p: Axis,
    #[serde(default)]
    pub fbp: FbpOptions,
    #[serde(default)]
    pub fourier: FourierInversion,
    /// Compare against the analytic Wigner function of `state`.
    #[serde(default)]
    pub reference: bool,
    #[serde(default)]
    pub max_rel_l2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub h: f64,
    pub threshold: f64,
    pub probe_grid: ProbeGrid,
    pub negative_control: bool,
    pub moment_h: f64,
    pub moment_threshold: f64,
    pub moment_times: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            h: 1e-3,
            threshold: 1e-4,
            probe_grid: ProbeGrid::default(),
            negative_control: false,
            moment_h: 1e-4,
            moment_threshold: 1e-6,
            moment_times: 200,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
    pub plot: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be finite")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn out_path(&self) -> Result<&Path, CliError> {
        let p = self.output.path.as_deref().ok_or_else(|| usage("no output path (use --out)"))?;
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !dir.is_dir() {
                return Err(usage(format!("output directory {} does not exist", dir.display())));
            }
        }
        Ok(p)
    }

    pub fn params(&self) -> Result<OscillatorParams, CliError> {
        let o = self.oscillator.ok_or_else(|| usage("config needs an \"oscillator\" section with kappa and omega"))?;
        OscillatorParams::new(o.kappa, o.omega).map_err(|e| usage(e.to_string()))
    }

    pub fn state(&self) -> Result<StateConfig, CliError> {
        let s = self.state.ok_or_else(|| usage("config needs a \"state\" section"))?;
        match s {
            StateConfig::Gaussian { alpha } => {
                finite("state.alpha", alpha[0])?;
                finite("state.alpha", alpha[1])?;
            }
            StateConfig::Cat { alpha, parity } => {
                CatSpec::new(Complex64::new(alpha[0], alpha[1]), parity).map_err(|e| usage(e.to_string()))?;
            }
            StateConfig::Number { m } => {
                if m > symtomo::states::MAX_NUMBER_STATE {
                    return Err(usage(format!("number state index {m} too large")));
                }
            }
        }
        Ok(s)
    }

    /// Evaluation times; defaults to `[0]`.
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        if self.times.is_empty() {
            return Ok(vec![0.0]);
        }
        for &t in &self.times {
            if !(t.is_finite() && t >= 0.0) {
                return Err(usage(format!("times must be finite and non-negative, got {t}")));
            }
        }
        Ok(self.times.clone())
    }

    pub fn validate_solver(&self) -> Result<(), CliError> {
        let s = &self.solver;
        if !(s.t_end.is_finite() && s.t_end > 0.0) {
            return Err(usage("solver.t_end must be positive"));
        }
        if !(s.samples_per_unit.is_finite() && s.samples_per_unit > 0.0) {
            return Err(usage("solver.samples_per_unit must be positive"));
        }
        if !(s.tol > 0.0 && s.tol < 1.0) {
            return Err(usage("solver.tol must be in (0, 1)"));
        }
        Ok(())
    }

    pub fn validate_tomogram(&self) -> Result<&TomogramConfig, CliError> {
        let t = self.tomogram.as_ref().ok_or_else(|| usage("config needs a \"tomogram\" section"))?;
        match t {
            TomogramConfig::Sinogram { n_phi, x } => {
                if *n_phi == 0 {
                    return Err(usage("tomogram.n_phi must be positive"));
                }
                x.validate().map_err(|e| usage(format!("tomogram.x: {e}")))?;
            }
            TomogramConfig::Points { queries } => {
                if queries.is_empty() {
                    return Err(usage("tomogram.queries is empty"));
                }
                for q in queries {
                    if q.mu == 0.0 && q.nu == 0.0 {
                        return Err(usage(format!("degenerate frame μ = ν = 0 at X = {}", q.x)));
                    }
                    for v in [q.x, q.mu, q.nu, q.delta] {
                        finite("tomogram query", v)?;
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn validate_reconstruct(&self) -> Result<&ReconstructConfig, CliError> {
        let r = self.reconstruct.as_ref().ok_or_else(|| usage("config needs a \"reconstruct\" section"))?;
        r.q.validate().map_err(|e| usage(format!("reconstruct.q: {e}")))?;
        r.p.validate().map_err(|e| usage(format!("reconstruct.p: {e}")))?;
        match r.method {
            Method::Fbp => {
                let input = r.input.as_ref().ok_or_else(|| usage("fbp needs reconstruct.input"))?;
                if !input.is_file() {
                    return Err(usage(format!("input {} does not exist", input.display())));
                }
            }
            Method::Fourier => {
                self.state()?;
                r.fourier.validate().map_err(|e| usage(e.to_string()))?;
            }
        }
        if r.reference {
            self.state()?;
        }
        if let Some(m) = r.max_rel_l2 {
            if !(m > 0.0) {
                return Err(usage("reconstruct.max_rel_l2 must be positive"));
            }
            if !r.reference {
                return Err(usage("reconstruct.max_rel_l2 needs reference = true"));
            }
        }
        let times = self.times()?;
        if times.len() > 1 {
            return Err(usage("reconstruct takes at most one time"));
        }
        if times[0] > 0.0 {
            self.params()?;
        }
        Ok(r)
    }

    pub fn validate_verify(&self) -> Result<(), CliError> {
        let v = &self.verify;
        for (name, x) in [("verify.h", v.h), ("verify.threshold", v.threshold), ("verify.moment_h", v.moment_h), ("verify.moment_threshold", v.moment_threshold)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(usage(format!("{name} must be positive")));
            }
        }
        if v.moment_times == 0 {
            return Err(usage("verify.moment_times must be positive"));
        }
        v.probe_grid.validate().map_err(|e| usage(format!("verify.probe_grid: {e}")))?;
        if v.h >= v.probe_grid.t.min {
            return Err(usage("verify.h must be smaller than the first probe time"));
        }
        self.params()?;
        if self.state.is_some() {
            self.state()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"oscilator": {"kappa": 0, "omega": 1}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"oscillator": {"kappa": 0, "omega": 1, "x": 2}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"state": {"kind": "cat", "alpha": [1, 0], "n": 1}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"verify": {"probe_grid": {"y": 1}}}"#).is_err());
    }

    #[test]
    fn full_config_parses() {
        let c: RunConfig = serde_json::from_str(
            r#"{
              "oscillator": {"kappa": 0.4, "omega": 2},
              "solver": {"t_end": 5},
              "state": {"kind": "cat", "alpha": [2, 0], "parity": "odd"},
              "times": [0, 1.5],
              "tomogram": {"mode": "sinogram", "n_phi": 32, "x": {"min": -8, "max": 8, "n": 129}},
              "reconstruct": {"method": "fourier", "q": {"min": -5, "max": 5, "n": 41}, "p": {"min": -5, "max": 5, "n": 41}},
              "output": {"path": "out.csv", "format": "bin", "plot": true},
              "seed": 7
            }"#,
        )
        .unwrap();
        assert_eq!(c.state().unwrap().alpha(), Complex64::new(2.0, 0.0));
        assert_eq!(c.output.format, Format::Bin);
        assert!(c.validate_tomogram().is_ok());
    }

    #[test]
    fn odd_cat_at_zero_rejected() {
        let c: RunConfig = serde_json::from_str(r#"{"state": {"kind": "cat", "alpha": [0, 0], "parity": "odd"}}"#).unwrap();
        assert!(c.state().is_err());
    }
}

use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use symtomo::io::{read_sinogram, write_grid, write_sinogram, Format};
use symtomo::oscillator::{solve_epsilon, symplectic_map, EpsilonTrajectory, ModeFunction};
use symtomo::states::{Axis, CatSpec, EvolvedWigner, FockState, GridMoments, Wigner, WignerGrid};
use symtomo::tomography::{
    invert_to_wigner, radon_reconstruct, CatTomogram, EvolvedTomogram, FockTomogram,
    GaussianTomogram, OpticalSinogram, Tomogram, MIN_ANGLES,
};
use symtomo::verify::{
    delta_covariance_defect, homogeneity_defect, moment_odes_check, normalization_defect,
    pde_residual, FrozenEvolution, GaussianEvolution, ReplacementEvolution, ResidualReport,
    HOMOGENEITY_TOLERANCE,
};
use symtomo::{gaussian_from_epsilon, OscillatorParams};

use crate::config::{Method, RunConfig, StateConfig, TomogramConfig};
use crate::svg::{self, Heatmap, Series};
use crate::CliError;

/// Files to write and threshold failures to report once they are written.
#[derive(Default)]
pub struct Outcome {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub failures: Vec<String>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn svg_path(out: &Path) -> PathBuf {
    out.with_extension("svg")
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

/// `out` itself for a single time, `stem_t{k}.ext` otherwise.
fn indexed(out: &Path, k: usize, n: usize) -> PathBuf {
    if n == 1 {
        return out.to_path_buf();
    }
    let ext = out.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    sibling(out, &format!("_t{k}{ext}"))
}

fn trajectory(cfg: &RunConfig, params: &OscillatorParams, t_end: f64) -> Result<EpsilonTrajectory, CliError> {
    let n = ((t_end * cfg.solver.samples_per_unit).ceil() as usize).max(2);
    Ok(solve_epsilon(params, t_end, n, cfg.solver.tol)?)
}

/// Mode function at each requested time; a trajectory is only solved when
/// some time is positive.
fn modes_at(cfg: &RunConfig, times: &[f64]) -> Result<Vec<ModeFunction>, CliError> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if t_max == 0.0 {
        return Ok(vec![ModeFunction::INITIAL; times.len()]);
    }
    let traj = trajectory(cfg, &cfg.params()?, t_max)?;
    times.iter().map(|&t| Ok(traj.propagate_to(t)?)).collect()
}

fn initial_tomogram(state: &StateConfig) -> Result<Box<dyn Tomogram>, CliError> {
    Ok(match *state {
        StateConfig::Gaussian { .. } => Box::new(GaussianTomogram::new(gaussian_from_epsilon(
            &ModeFunction::INITIAL,
            state.alpha(),
        )?)),
        StateConfig::Cat { parity, .. } => Box::new(CatTomogram::new(CatSpec::new(state.alpha(), parity)?)),
        StateConfig::Number { m } => Box::new(FockTomogram { m }),
    })
}

fn tomogram_at(state: &StateConfig, mode: &ModeFunction) -> Result<Box<dyn Tomogram>, CliError> {
    let initial = initial_tomogram(state)?;
    if *mode == ModeFunction::INITIAL {
        return Ok(initial);
    }
    Ok(Box::new(EvolvedTomogram::new(initial, mode)?))
}

fn wigner_at(state: &StateConfig, mode: &ModeFunction) -> Result<Box<dyn Wigner>, CliError> {
    let initial: Box<dyn Wigner> = match *state {
        StateConfig::Gaussian { .. } => Box::new(gaussian_from_epsilon(&ModeFunction::INITIAL, state.alpha())?),
        StateConfig::Cat { parity, .. } => Box::new(CatSpec::new(state.alpha(), parity)?),
        StateConfig::Number { m } => Box::new(FockState::new(m)?),
    };
    if *mode == ModeFunction::INITIAL {
        return Ok(initial);
    }
    Ok(Box::new(EvolvedWigner::new(initial, symplectic_map(mode)?)))
}

pub fn epsilon(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = cfg.out_path()?.to_path_buf();
    let params = cfg.params()?;
    cfg.validate_solver()?;
    if cfg.output.format != Format::Csv {
        return Err(usage("epsilon output is CSV only"));
    }
    let traj = trajectory(cfg, &params, cfg.solver.t_end)?;
    let mut csv = String::from("t,re_eps,im_eps,re_deps,im_deps,wronskian_residual\n");
    let mut residual = Vec::with_capacity(traj.len());
    for (i, &t) in traj.times().iter().enumerate() {
        let m = traj.mode(i);
        let r = m.wronskian() - 1.0;
        residual.push(r);
        let _ = writeln!(csv, "{t},{},{},{},{},{r}", m.eps.re, m.eps.im, m.deps.re, m.deps.im);
    }
    let mut outcome = Outcome::default();
    let worst = traj.max_wronskian_deviation();
    let limit = 10.0 * cfg.solver.tol;
    if worst > limit {
        outcome.failures.push(format!("Wronskian deviation {worst:.3e} exceeds {limit:.1e}"));
    }
    if cfg.output.plot {
        let re: Vec<f64> = traj.eps().iter().map(|e| e.re).collect();
        let im: Vec<f64> = traj.eps().iter().map(|e| e.im).collect();
        let svg = svg::line_plot(
            &format!("mode function, κ = {}, Ω = {}", params.kappa(), params.omega_drive()),
            "t",
            "ε",
            &[
                Series { label: "Re ε", x: traj.times(), y: &re },
                Series { label: "Im ε", x: traj.times(), y: &im },
            ],
        );
        outcome.files.push((svg_path(&out), svg.into_bytes()));
        let svg = svg::line_plot("Wronskian residual", "t", "Im(ε*ε̇) − 1", &[Series { label: "residual", x: traj.times(), y: &residual }]);
        outcome.files.push((sibling(&out, "_wronskian.svg"), svg.into_bytes()));
    }
    outcome.files.insert(0, (out, csv.into_bytes()));
    Ok(outcome)
}

pub fn tomogram(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = cfg.out_path()?.to_path_buf();
    let state = cfg.state()?;
    let spec = cfg.validate_tomogram()?.clone();
    let times = cfg.times()?;
    if times.iter().any(|&t| t > 0.0) {
        cfg.params()?;
        cfg.validate_solver()?;
    }
    if matches!(spec, TomogramConfig::Points { .. }) && cfg.output.format != Format::Csv {
        return Err(usage("point tomograms are written as CSV only"));
    }
    let modes = modes_at(cfg, &times)?;
    let mut outcome = Outcome::default();
    for (k, (mode, &t)) in modes.iter().zip(&times).enumerate() {
        let tomo = tomogram_at(&state, mode)?;
        let path = indexed(&out, k, times.len());
        match &spec {
            TomogramConfig::Sinogram { n_phi, x } => {
                let sino = OpticalSinogram::from_tomogram(&tomo, *n_phi, *x, None)?;
                let mut buf = Vec::new();
                write_sinogram(&sino, cfg.output.format, &mut buf)?;
                if cfg.output.plot {
                    let svg = svg::heatmap(&Heatmap {
                        title: &format!("optical tomogram, t = {t}"),
                        x_label: "φ",
                        y_label: "X",
                        values: sino.values(),
                        nx: sino.n_phi(),
                        ny: x.n,
                        x_range: (0.0, sino.phi(sino.n_phi() - 1)),
                        y_range: (x.min, x.max),
                    });
                    outcome.files.push((svg_path(&path), svg.into_bytes()));
                }
                outcome.files.push((path, buf));
            }
            TomogramConfig::Points { queries } => {
                let mut csv = String::from("x,mu,nu,delta,w\n");
                let mut ws = Vec::with_capacity(queries.len());
                for q in queries {
                    let w = tomo.eval(q)?;
                    ws.push(w);
                    let _ = writeln!(csv, "{},{},{},{},{w}", q.x, q.mu, q.nu, q.delta);
                }
                if cfg.output.plot {
                    let xs: Vec<f64> = queries.iter().map(|q| q.x).collect();
                    let svg = svg::line_plot(&format!("tomogram samples, t = {t}"), "X", "w", &[Series { label: "w", x: &xs, y: &ws }]);
                    outcome.files.push((svg_path(&path), svg.into_bytes()));
                }
                outcome.files.push((path, csv.into_bytes()));
            }
        }
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct ReferenceComparison {
    rel_l2_error: f64,
    max_abs_diff: f64,
    max_rel_l2: Option<f64>,
}

#[derive(Serialize)]
struct QualityReport {
    method: Method,
    time: f64,
    normalization: f64,
    norm_tolerance: f64,
    moments: GridMoments,
    reference: Option<ReferenceComparison>,
    passed: bool,
}

pub fn reconstruct(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = cfg.out_path()?.to_path_buf();
    let rc = cfg.validate_reconstruct()?.clone();
    let t = cfg.times()?[0];
    if t > 0.0 {
        cfg.validate_solver()?;
    }
    let sino = match rc.method {
        Method::Fbp => {
            let path = rc.input.as_ref().expect("validated");
            let file = std::fs::File::open(path)
                .map_err(|e| usage(format!("cannot open {}: {e}", path.display())))?;
            let sino = read_sinogram(file).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            if sino.n_phi() < MIN_ANGLES {
                return Err(usage(format!("sinogram has {} angles, at least {MIN_ANGLES} needed", sino.n_phi())));
            }
            Some(sino)
        }
        Method::Fourier => None,
    };
    let mode = modes_at(cfg, &[t])?[0];
    let grid = match &sino {
        Some(s) => radon_reconstruct(s, rc.q, rc.p, &rc.fbp)?,
        None => invert_to_wigner(&tomogram_at(&cfg.state()?, &mode)?, rc.q, rc.p, &rc.fourier)?,
    };
    let moments = grid.moments();
    let mut outcome = Outcome::default();
    let norm_tolerance = rc.fourier.norm_tolerance;
    if (moments.normalization - 1.0).abs() > norm_tolerance {
        outcome.failures.push(format!(
            "normalization {:.4} outside 1 ± {norm_tolerance:e}",
            moments.normalization
        ));
    }
    let reference = if rc.reference {
        let w = wigner_at(&cfg.state()?, &mode)?;
        let exact = WignerGrid::sample(&w, rc.q, rc.p);
        let rel = grid.rel_l2_error(&exact)?;
        if let Some(limit) = rc.max_rel_l2 {
            if rel > limit {
                outcome.failures.push(format!("relative L2 error {rel:.4} exceeds {limit}"));
            }
        }
        Some(ReferenceComparison { rel_l2_error: rel, max_abs_diff: grid.max_abs_diff(&exact)?, max_rel_l2: rc.max_rel_l2 })
    } else {
        None
    };
    let report = QualityReport {
        method: rc.method,
        time: t,
        normalization: moments.normalization,
        norm_tolerance,
        moments,
        reference,
        passed: outcome.failures.is_empty(),
    };
    let mut buf = Vec::new();
    write_grid(&grid, cfg.output.format, &mut buf)?;
    outcome.files.push((out.clone(), buf));
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))?;
    json.push(b'\n');
    outcome.files.push((sibling(&out, ".quality.json"), json));
    if cfg.output.plot {
        outcome.files.push((svg_path(&out), grid_heatmap(&grid, "reconstructed Wigner function").into_bytes()));
    }
    Ok(outcome)
}

fn grid_heatmap(grid: &WignerGrid, title: &str) -> String {
    let (q, p): (Axis, Axis) = (grid.q_axis(), grid.p_axis());
    svg::heatmap(&Heatmap {
        title,
        x_label: "q",
        y_label: "p",
        values: grid.values(),
        nx: q.n,
        ny: p.n,
        x_range: (q.min, q.max),
        y_range: (p.min, p.max),
    })
}

#[derive(Serialize)]
struct ResidualCheck {
    state: String,
    evolution: &'static str,
    threshold: f64,
    passed: bool,
    report: ResidualReport,
}

#[derive(Serialize)]
struct PropertyCheck {
    state: String,
    property: &'static str,
    defect: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct VerifySummary {
    passed: bool,
    negative_control: bool,
    kappa: f64,
    omega: f64,
    residuals: Vec<ResidualCheck>,
    moments: Vec<ResidualCheck>,
    properties: Vec<PropertyCheck>,
}

fn describe(state: &StateConfig) -> String {
    match *state {
        StateConfig::Gaussian { .. } => format!("coherent α = {}", state.alpha()),
        StateConfig::Cat { parity, .. } => format!("{parity:?} cat α = {}", state.alpha()).to_lowercase(),
        StateConfig::Number { m } => format!("number state {m}"),
    }
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = cfg.out_path()?.to_path_buf();
    cfg.validate_verify()?;
    cfg.validate_solver()?;
    let params = cfg.params()?;
    let v = &cfg.verify;
    let grid = &v.probe_grid;
    let states = match cfg.state {
        Some(s) => vec![s],
        None => vec![
            StateConfig::Gaussian { alpha: [1.0, 0.0] },
            StateConfig::Cat { alpha: [1.0, 0.0], parity: symtomo::states::Parity::Even },
        ],
    };
    let t_end = grid.t.max + 2.0 * v.h + 0.1;
    let traj = trajectory(cfg, &params, t_end)?;
    let probes = grid.points()?;
    let queries: Vec<_> = probes.iter().map(|p| p.query).collect();
    let frames: Vec<(f64, f64)> = {
        let mut f: Vec<(f64, f64)> = queries.iter().map(|q| (q.mu, q.nu)).collect();
        f.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        f.dedup();
        f
    };
    let late = traj.propagate_to(grid.t.max)?;

    let mut residuals = Vec::new();
    let mut moments = Vec::new();
    let mut properties = Vec::new();
    for state in &states {
        let name = describe(state);
        let initial = initial_tomogram(state)?;
        let mut push = |evolution: &'static str, report: ResidualReport| {
            let passed = report.passes(v.threshold);
            residuals.push(ResidualCheck { state: name.clone(), evolution, threshold: v.threshold, passed, report });
        };
        if v.negative_control {
            let evo = FrozenEvolution { initial: &initial, traj: &traj };
            push("frozen", pde_residual(&name, &evo, grid, v.h)?);
        } else {
            let evo = ReplacementEvolution { initial: &initial, traj: &traj };
            push("replacement", pde_residual(&name, &evo, grid, v.h)?);
            if let StateConfig::Gaussian { .. } = state {
                let evo = GaussianEvolution { alpha: state.alpha(), traj: &traj };
                push("direct", pde_residual(&name, &evo, grid, v.h)?);
            }
        }
        if let StateConfig::Gaussian { .. } = state {
            let report = moment_odes_check(&traj, state.alpha(), v.moment_h, v.moment_times)?;
            let passed = report.passes(v.moment_threshold);
            moments.push(ResidualCheck {
                state: name.clone(),
                evolution: "moments",
                threshold: v.moment_threshold,
                passed,
                report,
            });
        }
        let evolved = EvolvedTomogram::new(&initial, &late)?;
        let hom = homogeneity_defect(&initial, &queries)?.max(homogeneity_defect(&evolved, &queries)?);
        let cov = delta_covariance_defect(&initial, &queries)?.max(delta_covariance_defect(&evolved, &queries)?);
        let norm = normalization_defect(&evolved, &frames, 2001)?;
        for (property, defect, tolerance) in [
            ("homogeneity", hom, HOMOGENEITY_TOLERANCE),
            ("delta_covariance", cov, 0.0),
            ("normalization", norm, 1e-6),
        ] {
            properties.push(PropertyCheck { state: name.clone(), property, defect, tolerance, passed: defect <= tolerance });
        }
    }
    let passed = residuals.iter().chain(&moments).all(|r| r.passed) && properties.iter().all(|p| p.passed);
    let summary = VerifySummary {
        passed,
        negative_control: v.negative_control,
        kappa: params.kappa(),
        omega: params.omega_drive(),
        residuals,
        moments,
        properties,
    };
    let mut outcome = Outcome::default();
    for r in summary.residuals.iter().chain(&summary.moments).filter(|r| !r.passed) {
        outcome.failures.push(format!(
            "{} ({}): residual {:.3e}, order {:?}, threshold {:e}",
            r.state, r.evolution, r.report.max_abs_residual, r.report.order, r.threshold
        ));
    }
    for p in summary.properties.iter().filter(|p| !p.passed) {
        outcome.failures.push(format!("{} {}: defect {:.3e} > {:e}", p.state, p.property, p.defect, p.tolerance));
    }
    let mut json = serde_json::to_vec_pretty(&summary).map_err(|e| CliError::Internal(e.to_string()))?;
    json.push(b'\n');
    outcome.files.push((out, json));
    Ok(outcome)
}

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use symtomo::io::Format;

mod commands;
mod config;
mod svg;

use config::{Method, OscillatorConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] symtomo::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use symtomo::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::InvalidParameter(_)
                | E::DegenerateFrame { .. }
                | E::InsufficientAngles { .. }
                | E::Format(_)
                | E::Io(_)
                | E::Csv(_)
                | E::Json(_),
            ) => 2,
            CliError::Core(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "symtomo", version, about = "Trapped-ion state tomography toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the mode function and write it as CSV.
    Epsilon(Common),
    /// Sample a tomogram or optical sinogram.
    Tomogram(Common),
    /// Reconstruct a Wigner function from a sinogram or analytic tomogram.
    Reconstruct(ReconstructArgs),
    /// Check the evolution equation, moment equations and tomogram properties.
    Verify(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fbp,
    Fourier,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots next to the output.
    #[arg(long)]
    plot: bool,
    /// Run single-threaded.
    #[arg(long)]
    serial: bool,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    common: Common,
    /// Sinogram file for filtered back-projection.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(f) = common.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Bin => Format::Bin,
        };
    }
    cfg.output.plot |= common.plot;
    match (common.kappa, common.omega, cfg.oscillator.as_mut()) {
        (None, None, _) => {}
        (k, w, Some(o)) => {
            o.kappa = k.unwrap_or(o.kappa);
            o.omega = w.unwrap_or(o.omega);
        }
        (Some(kappa), Some(omega), None) => cfg.oscillator = Some(OscillatorConfig { kappa, omega }),
        _ => return Err(CliError::Usage("--kappa and --omega must be given together without an oscillator section".into())),
    }
    Ok(cfg)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let common = match &cli.command {
        Command::Epsilon(c) | Command::Tomogram(c) | Command::Verify(c) => c,
        Command::Reconstruct(r) => &r.common,
    };
    if common.serial {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let mut cfg = load(common)?;
    if let Some(seed) = cfg.seed {
        log::debug!("seed {seed} is reserved and has no effect");
    }
    let outcome = match &cli.command {
        Command::Epsilon(_) => commands::epsilon(&cfg)?,
        Command::Tomogram(_) => commands::tomogram(&cfg)?,
        Command::Verify(_) => commands::verify(&cfg)?,
        Command::Reconstruct(r) => {
            if r.input.is_some() || r.method.is_some() {
                let rc = cfg
                    .reconstruct
                    .as_mut()
                    .ok_or_else(|| CliError::Usage("config needs a \"reconstruct\" section".into()))?;
                if let Some(input) = &r.input {
                    rc.input = Some(input.clone());
                }
                if let Some(m) = r.method {
                    rc.method = match m {
                        MethodArg::Fbp => Method::Fbp,
                        MethodArg::Fourier => Method::Fourier,
                    };
                }
            }
            commands::reconstruct(&cfg)?
        }
    };
    for (path, bytes) in &outcome.files {
        write_atomic(path, bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(outcome.failures)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in failures {
                eprintln!("symtomo: threshold failure: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("symtomo: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `lattice-spectral`: batch experiments for `H = -Δ + V` on `Z`.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use output::Artifacts;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message,
        }
    }
}

impl From<lattice_spectral::Error> for CliError {
    fn from(e: lattice_spectral::Error) -> Self {
        use lattice_spectral::Error as E;
        let code = match e {
            E::SingularSystem { .. }
            | E::WronskianVanishes { .. }
            | E::EnlargeWindow { .. }
            | E::QuadratureNotConverged { .. } => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lattice-spectral", version, about = "Spectral and dispersive experiments for -Δ + V on Z")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Window half-width N (sites -N..=N).
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Weight exponent σ.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Largest sample time.
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Seed for random ensembles.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Zero-energy genericity by both criteria, and scattering tables.
    Genericity,
    /// Eigenvalues outside the band.
    Spectrum,
    /// Limiting-absorption and edge-expansion tables.
    Resolvent,
    /// Kernel dumps of e^{itH} P_ac.
    Evolve,
    /// Decay norms and the fitted exponent.
    DecayFit,
    /// Sup over a of the model oscillatory integral.
    Oscillatory,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Genericity => "genericity",
            Command::Spectrum => "spectrum",
            Command::Resolvent => "resolvent",
            Command::Evolve => "evolve",
            Command::DecayFit => "decay-fit",
            Command::Oscillatory => "oscillatory",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file = RunConfig::load(cli.config.as_deref())?;
    let flags = Overrides {
        window: cli.window,
        sigma: cli.sigma,
        tmax: cli.tmax,
        seed: cli.seed,
    };
    let config_dir = cli.config.as_deref().and_then(|p| p.parent());
    let cfg = RunConfig::resolve(cli.command.name(), file, flags, config_dir)?;
    log::info!("running {} with window {}", cfg.command, cfg.window);
    let mut out = Artifacts::new(&cli.out, &cfg)?;
    match cli.command {
        Command::Genericity => commands::genericity(&cfg, &mut out),
        Command::Spectrum => commands::spectrum(&cfg, &mut out),
        Command::Resolvent => commands::resolvent(&cfg, &mut out),
        Command::Evolve => commands::evolve(&cfg, &mut out),
        Command::DecayFit => commands::decay_fit(&cfg, &mut out),
        Command::Oscillatory => commands::oscillatory(&cfg, &mut out),
    }?;
    for path in out.written() {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    // so that the sidecar log has somewhere to go even if validation fails
    let _ = std::fs::create_dir_all(&cli.out);
    let status = match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    if cli.out.is_dir() {
        output::sidecar_log(&cli.out, cli.command.name(), status.into(), start.elapsed().as_secs_f64());
    }
    ExitCode::from(status)
}

//! `spinvalve`: analysis and simulation of spinful matter-wave transport
//! through a localized spin-orbit-coupled condensate.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinvalve_core::criticals::CriticalKind;
use spinvalve_core::Error;

use config::RunConfig;
use output::{Format, OutputDir};

#[derive(Parser)]
#[command(
    name = "spinvalve",
    version,
    about = "Spinful matter-wave valve: scattering analysis, operating points, and wavepacket simulation",
    after_help = "Exit codes: 0 success, 1 other, 2 validation error, 3 infeasible point, 4 numerical failure."
)]
struct Cli {
    /// Configuration file (TOML, or JSON with a .json extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides [output].dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Table format: csv or json (overrides [output].format).
    #[arg(long, global = true)]
    format: Option<String>,

    /// Worker threads for scans and multi-run jobs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dispersion relation and localized-mode eigenenergy curves.
    Modes,
    /// Spin textures of the transmission pair and the localized mode.
    Texture,
    /// Scattering-coefficient scan against quasimomentum.
    Smatrix,
    /// All operating points of the configured system.
    Criticals,
    /// Feasibility heatmaps over (g, lambda).
    Map {
        /// Comma-separated kinds: t_plus,t_minus,b_plus,b_minus,isolation,conversion.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<String>,
    },
    /// The perfect-isolation point and its omega(g) curve.
    Isolate,
    /// Maximal spin-conversion energies for the configured system.
    Convert,
    /// One time-domain wavepacket run.
    Simulate {
        /// Named operating-point run (e.g. transparency, blockade, conversion).
        #[arg(long)]
        preset: Option<String>,
    },
    /// Dispersion, eigenenergies, and spin textures.
    ReproduceFig2,
    /// All feasibility maps plus the isolation curve.
    ReproduceFig3,
    /// Every simulation panel, with closed-form predictions side by side.
    ReproduceFig4,
    /// Supplement datasets: period-10 texture and both S-matrix scans.
    ReproduceSupp,
}

fn run(cli: Cli) -> spinvalve_core::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::validation(format!("cannot size thread pool: {e}")))?;
    }
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let format: Format = cli
        .format
        .as_deref()
        .unwrap_or(&config.output.format)
        .parse()?;
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let out = OutputDir::create(&dir, config.echo(), format)?;

    match &cli.command {
        Command::Modes => commands::cmd_modes(&config, &out),
        Command::Texture => commands::cmd_texture(&config, &out),
        Command::Smatrix => commands::cmd_smatrix(&config, &out),
        Command::Criticals => commands::cmd_criticals(&config, &out),
        Command::Map { kinds } => {
            let kinds: Vec<CriticalKind> = if kinds.is_empty() {
                CriticalKind::all_mu_kinds().to_vec()
            } else {
                kinds
                    .iter()
                    .map(|k| k.parse())
                    .collect::<spinvalve_core::Result<_>>()?
            };
            commands::cmd_map(&config, &out, &kinds)
        }
        Command::Isolate => commands::cmd_isolate(&config, &out),
        Command::Convert => commands::cmd_convert(&config, &out),
        Command::Simulate { preset } => commands::cmd_simulate(&config, &out, preset.as_deref()),
        Command::ReproduceFig2 => commands::reproduce_fig2(&config, &out),
        Command::ReproduceFig3 => commands::reproduce_fig3(&config, &out),
        Command::ReproduceFig4 => commands::reproduce_fig4(&out),
        Command::ReproduceSupp => commands::reproduce_supp(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) => ExitCode::from(2),
                Error::Infeasible(_) => ExitCode::from(3),
                Error::Numerical(_) => ExitCode::from(4),
            }
        }
    }
}

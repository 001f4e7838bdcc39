use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ionscat::landau_zener::Formula;
use ionscat_cli::commands::{self, Status};
use ionscat_cli::config::RunConfig;
use ionscat_cli::plotdata::Style;

#[derive(Parser)]
#[command(
    name = "ionscat",
    version,
    about = "Coupled-channel Li + Ba+ scattering runs"
)]
struct Cli {
    /// Run configuration (TOML); built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads, overriding the configuration.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Keep archived blocks of an interrupted scan.
    #[arg(long, global = true)]
    resume: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the spin-free curves and spin-orbit couplings.
    PecDump,
    /// List case (e) channels.
    Channels {
        /// Show the channels of one J instead of the counts.
        #[arg(long)]
        j: Option<i32>,
        #[arg(long, default_value_t = 12)]
        j_max: i32,
    },
    /// Landau-Zener probabilities.
    Lz {
        /// Locate the crossings in the Omega = 0+ adiabats of the model.
        #[arg(long)]
        from_potentials: bool,
        /// printed or value-consistent.
        #[arg(long)]
        formula: Option<Formula>,
        /// Collision energy in kelvin.
        #[arg(long, default_value_t = 0.0)]
        energy_k: f64,
    },
    /// Cross sections over the energy grid.
    XsecScan,
    /// Thermal rate coefficients from a finished scan.
    ThermalRates {
        /// Temperatures in kelvin, overriding the configuration.
        #[arg(long, value_delimiter = ',')]
        temperatures: Vec<f64>,
    },
    /// Peaks in the scanned cross sections.
    ResonanceFind,
    /// Figure data, one CSV per panel.
    PlotData {
        #[arg(long, value_enum)]
        style: Style,
        /// J values of the case (e) adiabat panels.
        #[arg(long, value_delimiter = ',', default_values_t = [0, 3])]
        j: Vec<i32>,
    },
}

fn run(cli: Cli) -> ionscat::Result<Status> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    let out = cli.out.clone().unwrap_or_else(|| config.output_dir());
    let run = config.resolve()?;
    log::info!("configuration {}", run.hash);
    match cli.command {
        Command::PecDump => commands::pec_dump(&run, &out),
        Command::Channels { j, j_max } => commands::channels(&run, j, j_max),
        Command::Lz {
            from_potentials,
            formula,
            energy_k,
        } => commands::lz(&run, from_potentials, formula, energy_k),
        Command::XsecScan => commands::xsec_scan(&run, &out, cli.resume),
        Command::ThermalRates { temperatures } => {
            commands::thermal_rates(&run, &out, &temperatures)
        }
        Command::ResonanceFind => commands::resonance_find(&run, &out),
        Command::PlotData { style, j } => commands::plot_data(&run, &out, style, &j),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = match run(Cli::parse()) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

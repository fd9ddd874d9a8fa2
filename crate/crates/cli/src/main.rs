//! Batch front end for the MCC-KF experiments.
//!
//! Exit codes: 0 success, 1 checked criterion violated, 2 usage or
//! configuration error.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mcckf",
    version,
    about = "Maximum correntropy Kalman filter experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radar tracking Monte Carlo with every algorithm; checks that the RMSE
    /// curves coincide.
    Equivalence(Common),
    /// Radar tracking Monte Carlo for a chosen algorithm set.
    Example1(Common),
    /// Ill-conditioning sweep; checks that sr1b breaks down last.
    Sweep(Common),
    /// Writes one simulated radar trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Run index whose random stream is used.
        #[arg(long, default_value_t = 0)]
        run: u64,
    },
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed (`monte_carlo.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo runs (`sweep.runs` for the sweep, `monte_carlo.runs` otherwise).
    #[arg(long)]
    runs: Option<i64>,
    /// Comma-separated algorithms (conventional, sr1a, sr1b, kf_reference).
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Relative tolerance for the equivalence check (`monte_carlo.tolerance`).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Dotted-path override such as `shot_noise.fraction=0.1`; repeatable,
    /// applied after the file, last one wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// More log output; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (common, run) = match &cli.command {
        Command::Equivalence(c) | Command::Example1(c) | Command::Sweep(c) => (c, 0),
        Command::Simulate { common, run } => (common, *run),
    };
    init_logging(common.verbose);
    let is_sweep = matches!(cli.command, Command::Sweep(_));
    let loaded = match settings::load(common, is_sweep) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Equivalence(_) => commands::equivalence(&loaded),
        Command::Example1(_) => commands::example1(&loaded),
        Command::Sweep(_) => commands::sweep(&loaded),
        Command::Simulate { .. } => commands::simulate(&loaded, run),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end: `solve`, `sweep-snr`, `converge`, `ber-sweep`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dm_secrecy::beamformers::InitKind;
use dm_secrecy_cli::config::{ExperimentConfig, InitConfig};
use dm_secrecy_cli::rows::{write_rows, OutputFormat};
use dm_secrecy_cli::runner;
use dm_secrecy_cli::{resolve_seed, CliError};

#[derive(Parser)]
#[command(
    name = "dm-secrecy",
    about = "Secrecy-rate beamforming experiments for AN-aided directional modulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Base seed; overrides the DM_SECRECY_SEED environment variable and,
    /// for random initialization, the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output file for the result rows.
    #[arg(long)]
    out: PathBuf,
    /// Output encoding.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Max-SR solver once and print a JSON summary.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the JSON summary to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Secrecy rate of all three methods over the configured SNR list.
    SweepSnr {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Write every solved beamformer to this JSON file.
        #[arg(long)]
        dump_solutions: Option<PathBuf>,
    },
    /// Per-iteration secrecy rate for leakage and random initialization.
    Converge {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// BER versus receive angle for all three methods.
    BerSweep {
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

fn effective_init(config: &ExperimentConfig, seed_flag: Option<u64>) -> InitKind {
    match (config.init, seed_flag) {
        (InitConfig::Random { .. }, Some(seed)) => InitKind::Random { seed },
        (init, _) => init.to_init_kind(),
    }
}

fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { common, out } => {
            let config = ExperimentConfig::from_file(&common.config)?;
            let init = effective_init(&config, common.seed);
            let summary = runner::run_solve(&config, init)?;
            let text = serde_json::to_string_pretty(&summary)
                .map_err(|e| CliError::Io(format!("JSON encode failed: {e}")))?;
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(&path, format!("{text}\n"))
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::SweepSnr {
            sweep,
            dump_solutions,
        } => {
            let config = ExperimentConfig::from_file(&sweep.common.config)?;
            let init = effective_init(&config, sweep.common.seed);
            let timestamp = timestamp_now();
            let (mut rows, dumps) = runner::run_sr_vs_snr(&config, init, &timestamp)?;
            write_rows(&sweep.out, &mut rows, sweep.format)?;
            if let Some(path) = dump_solutions {
                let text = serde_json::to_string_pretty(&dumps)
                    .map_err(|e| CliError::Io(format!("JSON encode failed: {e}")))?;
                std::fs::write(&path, format!("{text}\n"))
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            if !sweep.common.quiet {
                eprintln!("wrote {} rows to {}", rows.len(), sweep.out.display());
            }
            Ok(())
        }
        Command::Converge { sweep } => {
            let config = ExperimentConfig::from_file(&sweep.common.config)?;
            let timestamp = timestamp_now();
            let mut rows = runner::run_convergence(&config, &timestamp)?;
            write_rows(&sweep.out, &mut rows, sweep.format)?;
            if !sweep.common.quiet {
                eprintln!("wrote {} rows to {}", rows.len(), sweep.out.display());
            }
            Ok(())
        }
        Command::BerSweep { sweep } => {
            let config = ExperimentConfig::from_file(&sweep.common.config)?;
            let init = effective_init(&config, sweep.common.seed);
            let link_seed = resolve_seed(sweep.common.seed)?;
            let timestamp = timestamp_now();
            let mut rows = runner::run_ber_sweep(&config, init, link_seed, &timestamp)?;
            write_rows(&sweep.out, &mut rows, sweep.format)?;
            if !sweep.common.quiet {
                eprintln!("wrote {} rows to {}", rows.len(), sweep.out.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

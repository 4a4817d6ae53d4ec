use std::path::PathBuf;
use std::process::ExitCode;

use cdrt_cli::config::Format;
use cdrt_cli::{cmd_optimize, cmd_sweep, cmd_validate, load_config, CliError, Overrides};
use clap::{Args, Parser, Subcommand};

/// Outage and effective-throughput evaluation for adaptive NOMA CDRT.
#[derive(Parser)]
#[command(name = "cdrt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare closed forms, quadrature and Monte Carlo over an SNR grid.
    Validate(Common),
    /// Run a parameter sweep and emit a plot-ready table.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Built-in sweep (fig2 .. fig7).
        #[arg(long)]
        preset: Option<String>,
    },
    /// Search the rate threshold that maximises effective sum throughput.
    Optimize(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            trials: self.trials,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Validate(c) | Command::Optimize(c) => c,
        Command::Sweep { common, .. } => common,
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let cfg = load_config(common.config.as_deref())?;
    let ov = common.overrides();
    match &cli.command {
        Command::Validate(_) => cmd_validate(&cfg, &ov),
        Command::Sweep { preset, .. } => cmd_sweep(&cfg, preset.as_deref(), &ov),
        Command::Optimize(_) => cmd_optimize(&cfg, &ov),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

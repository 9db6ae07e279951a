use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use onef_experiments::{report, run, RunError};

/// Sweeps and pulse optimization for a qubit under multi-state 1/f^α noise.
#[derive(Parser)]
#[command(name = "onef", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV file (stdout when omitted); a directory for `optimize`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Top-level seed, overriding the config's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectra of the five-RTN ensemble, the 32-level fluctuator and 1/f.
    Psd,
    /// Memory fidelity at 12π against τ_c.
    MemorySweep,
    /// Optimized memory fidelity against duration.
    DurationSweep,
    /// Memory fidelity at 12π against mean noise strength.
    StrengthSweep,
    /// Optimized memory fidelity against τ_c for several α.
    AlphaSweep,
    /// NOT fidelity against τ_c.
    NotSweep,
    /// Optimization dumps (JSON and pulse CSV) per τ_c.
    Optimize,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Psd => "psd",
            Command::MemorySweep => "memory-sweep",
            Command::DurationSweep => "duration-sweep",
            Command::StrengthSweep => "strength-sweep",
            Command::AlphaSweep => "alpha-sweep",
            Command::NotSweep => "not-sweep",
            Command::Optimize => "optimize",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let built = if n == 0 {
            Err(RunError::Config("--threads must be at least 1".into()))
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| RunError::Config(e.to_string()))
        };
        if let Err(e) = built {
            return ExitCode::from(report(&e) as u8);
        }
    }
    match run(cli.command.name(), cli.config.as_deref(), cli.out.as_deref(), cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(report(&e) as u8),
    }
}

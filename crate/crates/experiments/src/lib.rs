//! Batch sweeps over noise and pulse parameters for the `onef` command-line
//! tool. Every subcommand reads a JSON config, evaluates its grid points in
//! parallel and writes CSV rows (or JSON dumps) in grid order.

pub mod commands;
pub mod config;
pub mod error;
pub mod optimized;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

pub use error::{RunError, RunResult};

/// Subcommand names, as typed on the command line.
pub const SUBCOMMANDS: [&str; 7] = [
    "psd",
    "memory-sweep",
    "duration-sweep",
    "strength-sweep",
    "alpha-sweep",
    "not-sweep",
    "optimize",
];

fn write_table(table: &commands::Table, out: Option<&Path>) -> RunResult<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            fs::write(path, buf)?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

/// Dumps go to `<dir>/optimize_<target>_tau_c_<τ>.{json,csv}`.
fn write_dumps(dumps: &[commands::OptimizeDump], dir: &Path) -> RunResult<()> {
    fs::create_dir_all(dir)?;
    for d in dumps {
        let stem = format!("optimize_{}_tau_c_{}", d.config.problem.target, d.config.problem.tau_c);
        let mut json = serde_json::to_string_pretty(d).expect("dump serializes");
        json.push('\n');
        fs::write(dir.join(format!("{stem}.json")), json)?;
        let mut csv = Vec::new();
        d.pulse()?.write_csv(&mut csv)?;
        fs::write(dir.join(format!("{stem}.csv")), csv)?;
    }
    Ok(())
}

/// Run `subcommand` with the config at `config_path` (defaults when absent).
/// Tables go to `out` or stdout; `optimize` requires `out` as a directory.
pub fn run(
    subcommand: &str,
    config_path: Option<&Path>,
    out: Option<&Path>,
    seed: Option<u64>,
) -> RunResult<()> {
    use config::{load, resolve_seed};
    match subcommand {
        "psd" => {
            let cfg: config::PsdConfig = load(config_path)?;
            write_table(&commands::psd(&cfg)?, out)
        }
        "memory-sweep" => {
            let cfg: config::MemorySweepConfig = load(config_path)?;
            let seed = resolve_seed(cfg.seed, seed)?;
            write_table(&commands::memory_sweep(&cfg, seed)?, out)
        }
        "duration-sweep" => {
            let cfg: config::DurationSweepConfig = load(config_path)?;
            let seed = resolve_seed(cfg.seed, seed)?;
            write_table(&commands::duration_sweep(&cfg, seed)?, out)
        }
        "strength-sweep" => {
            let cfg: config::StrengthSweepConfig = load(config_path)?;
            let seed = resolve_seed(cfg.seed, seed)?;
            write_table(&commands::strength_sweep(&cfg, seed)?, out)
        }
        "alpha-sweep" => {
            let cfg: config::AlphaSweepConfig = load(config_path)?;
            let seed = resolve_seed(cfg.seed, seed)?;
            write_table(&commands::alpha_sweep(&cfg, seed)?, out)
        }
        "not-sweep" => {
            let cfg: config::NotSweepConfig = load(config_path)?;
            let seed = resolve_seed(cfg.seed, seed)?;
            write_table(&commands::not_sweep(&cfg, seed)?, out)
        }
        "optimize" => {
            let cfg: config::OptimizeConfig = load(config_path)?;
            let seed = resolve_seed(cfg.seed, seed)?;
            let dir = out.ok_or_else(|| RunError::Config("optimize needs --out <directory>".into()))?;
            write_dumps(&commands::optimize(&cfg, seed)?, dir)
        }
        other => Err(RunError::Config(format!("unknown subcommand {other}"))),
    }
}

/// Print `e` to stderr and return its exit code.
pub fn report(e: &RunError) -> i32 {
    let _ = writeln!(io::stderr(), "onef: {e}");
    e.exit_code()
}

//! The subcommands. Each returns its table (or dumps) without touching the
//! filesystem except for the optional optimization cache.

use std::f64::consts::PI;
use std::io::Write;

use onef::fidelity::{fidelity_for, Target};
use onef::noise::ideal_psd;
use onef::optimizer::OptimizationResult;
use onef::pulses::Segment;
use onef::NoiseModel;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    log_grid, AlphaSweepConfig, DurationSweepConfig, MemorySweepConfig, NoiseSettings,
    NotSweepConfig, OptimizeConfig, PsdConfig, StrengthSweepConfig,
};
use crate::error::RunResult;
use crate::optimized::{memory_references, not_references, Problem};

/// Memory sweeps are scored at this total duration.
pub const MEMORY_TOTAL: f64 = 12.0 * PI;

/// Fixed header and one row per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Values are written with the shortest representation that parses back
    /// to the same `f64`.
    pub fn write_csv<W: Write>(&self, out: W) -> RunResult<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Five telegraph sources with rates `γ₀(1 + 29k/4)` and amplitudes
/// `γ_k^{-1/2}`.
pub fn five_rtn_model(gamma0: f64) -> RunResult<NoiseModel> {
    let rates: Vec<f64> = (0..5).map(|k| gamma0 * (1.0 + 29.0 * k as f64 / 4.0)).collect();
    let deltas: Vec<f64> = rates.iter().map(|g| g.powf(-0.5)).collect();
    let taus: Vec<f64> = rates.iter().map(|g| 1.0 / g).collect();
    Ok(NoiseModel::rtn_ensemble(&deltas, &taus)?)
}

/// 32 levels, 31 rates uniform on `[γ₀, 30γ₀]`, `α = 1`.
pub fn markov32_model(gamma0: f64) -> RunResult<NoiseModel> {
    Ok(NoiseModel::multistate_fluctuator(5, gamma0, 29.0 * gamma0 / 30.0, 1.0)?)
}

pub fn psd(cfg: &PsdConfig) -> RunResult<Table> {
    cfg.validate()?;
    let rtn = five_rtn_model(cfg.gamma0)?;
    let markov = markov32_model(cfg.gamma0)?;
    let prefactor = markov.prefactor().expect("fluctuator carries a prefactor");
    let rows = log_grid(cfg.omega_min, cfg.omega_max, cfg.points)
        .into_iter()
        .map(|w| {
            let f = w * cfg.gamma0 / (2.0 * PI);
            Ok(vec![f, rtn.psd(f)?, markov.psd(f)?, ideal_psd(prefactor, 1.0, f)?])
        })
        .collect::<RunResult<_>>()?;
    Ok(Table::new(&["f", "S_rtn5", "S_markov32", "S_ideal"], rows))
}

/// Memory fidelities at `12π` of the optimized pulse (repeated) and of the
/// references under `noise` at `tau_c`. Columns follow
/// `MEMORY_COLUMNS[1..]`.
fn memory_row(
    problem: &Problem,
    noise: &NoiseSettings,
    tau_c: f64,
    seed: u64,
    cache: Option<&std::path::Path>,
) -> RunResult<Vec<f64>> {
    let model = noise.model(tau_c)?;
    let result = problem.solve(seed, cache)?;
    let repeats = (MEMORY_TOTAL / problem.duration).round() as usize;
    let id = Target::Identity.unitary();
    let mut row = vec![fidelity_for(&model, &result.pulse.repeat(repeats)?, &id)?];
    for (_, pulse) in memory_references(MEMORY_TOTAL)? {
        row.push(fidelity_for(&model, &pulse, &id)?);
    }
    Ok(row)
}

const MEMORY_COLUMNS: [&str; 7] = ["tau_c", "optimized", "two_pi", "corpse", "cpmg1", "cpmg2", "zero"];

pub fn memory_sweep(cfg: &MemorySweepConfig, seed: u64) -> RunResult<Table> {
    cfg.validate()?;
    let rows = cfg
        .tau_c
        .par_iter()
        .map(|&tau_c| {
            let problem = Problem::new(
                Target::Identity,
                cfg.optimized_pi * PI,
                tau_c,
                &cfg.noise,
                &cfg.optimizer,
            );
            let mut row = vec![tau_c];
            row.extend(memory_row(&problem, &cfg.noise, tau_c, seed, cfg.cache_dir.as_deref())?);
            Ok(row)
        })
        .collect::<RunResult<_>>()?;
    Ok(Table::new(&MEMORY_COLUMNS, rows))
}

pub fn strength_sweep(cfg: &StrengthSweepConfig, seed: u64) -> RunResult<Table> {
    cfg.validate()?;
    let rows = cfg
        .strength
        .par_iter()
        .map(|&strength| {
            let noise = NoiseSettings {
                strength,
                ..cfg.noise.clone()
            };
            let problem = Problem::new(
                Target::Identity,
                cfg.optimized_pi * PI,
                cfg.tau_c,
                &noise,
                &cfg.optimizer,
            );
            let mut row = vec![strength];
            row.extend(memory_row(&problem, &noise, cfg.tau_c, seed, cfg.cache_dir.as_deref())?);
            Ok(row)
        })
        .collect::<RunResult<_>>()?;
    let mut header = MEMORY_COLUMNS;
    header[0] = "strength";
    Ok(Table::new(&header, rows))
}

pub fn duration_sweep(cfg: &DurationSweepConfig, seed: u64) -> RunResult<Table> {
    cfg.validate()?;
    let rows = cfg
        .duration_pi
        .par_iter()
        .map(|&d| {
            let total = d * PI;
            let problem = Problem::new(Target::Identity, total, cfg.tau_c, &cfg.noise, &cfg.optimizer);
            let result = problem.solve(seed, cfg.cache_dir.as_deref())?;
            Ok(vec![d, total, result.fidelity])
        })
        .collect::<RunResult<_>>()?;
    Ok(Table::new(&["duration_pi", "T", "optimized"], rows))
}

pub fn alpha_sweep(cfg: &AlphaSweepConfig, seed: u64) -> RunResult<Table> {
    cfg.validate()?;
    let total = cfg.duration_pi * PI;
    let rows = cfg
        .tau_c
        .par_iter()
        .map(|&tau_c| {
            let mut row = vec![tau_c];
            for &alpha in &cfg.alpha {
                let noise = NoiseSettings {
                    alpha,
                    ..cfg.noise.clone()
                };
                let problem = Problem::new(Target::Identity, total, tau_c, &noise, &cfg.optimizer);
                row.push(problem.solve(seed, cfg.cache_dir.as_deref())?.fidelity);
            }
            Ok(row)
        })
        .collect::<RunResult<_>>()?;
    let mut header = vec!["tau_c".to_string()];
    header.extend(cfg.alpha.iter().map(|a| format!("alpha_{a}")));
    Ok(Table { header, rows })
}

pub fn not_sweep(cfg: &NotSweepConfig, seed: u64) -> RunResult<Table> {
    cfg.validate()?;
    let x = Target::Not.unitary();
    let rows = cfg
        .tau_c
        .par_iter()
        .map(|&tau_c| {
            let model = cfg.noise.model(tau_c)?;
            let mut row = vec![tau_c];
            for (_, pulse) in not_references() {
                row.push(fidelity_for(&model, &pulse, &x)?);
            }
            let problem = Problem::new(Target::Not, cfg.duration_pi * PI, tau_c, &cfg.noise, &cfg.optimizer);
            row.push(problem.solve(seed, cfg.cache_dir.as_deref())?.fidelity);
            Ok(row)
        })
        .collect::<RunResult<_>>()?;
    Ok(Table::new(&["tau_c", "pi", "corpse", "short_corpse", "optimized"], rows))
}

/// Full record of one optimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeDump {
    pub config: DumpConfig,
    pub fidelity: f64,
    pub segments: Vec<Segment>,
    pub trace: Vec<f64>,
}

/// The problem, the seeds, and how the winning ascent ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DumpConfig {
    #[serde(flatten)]
    pub problem: Problem,
    pub seed: u64,
    pub derived_seed: u64,
    pub start_index: usize,
    pub iterations: usize,
    pub stop_reason: onef::optimizer::StopReason,
}

impl OptimizeDump {
    fn new(problem: Problem, seed: u64, result: OptimizationResult) -> Self {
        Self {
            config: DumpConfig {
                derived_seed: problem.derived_seed(seed),
                problem,
                seed,
                start_index: result.start_index,
                iterations: result.iterations,
                stop_reason: result.stop_reason,
            },
            fidelity: result.fidelity,
            segments: result.pulse.segments().to_vec(),
            trace: result.fidelity_trace,
        }
    }

    pub fn pulse(&self) -> RunResult<onef::PulseSequence> {
        Ok(onef::PulseSequence::new(self.segments.clone())?)
    }
}

/// One dump per `τ_c`, in grid order.
pub fn optimize(cfg: &OptimizeConfig, seed: u64) -> RunResult<Vec<OptimizeDump>> {
    cfg.validate()?;
    cfg.tau_c
        .par_iter()
        .map(|&tau_c| {
            let problem = Problem::new(cfg.target, cfg.duration_pi * PI, tau_c, &cfg.noise, &cfg.optimizer);
            let result = problem.solve(seed, cfg.cache_dir.as_deref())?;
            Ok(OptimizeDump::new(problem, seed, result))
        })
        .collect()
}

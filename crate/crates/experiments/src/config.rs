//! JSON run configurations, one document type per subcommand.
//!
//! Every field has a default, so `{}` is a valid document; unknown fields are
//! rejected. Durations are given in units of `π` (`duration_pi = 6` means
//! `T = 6π`).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use onef::fidelity::Target;
use onef::optimizer::OptimizerConfig;
use onef::NoiseModel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{RunError, RunResult};

/// `n` log-spaced points on `[lo, hi]`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

fn default_tau_grid() -> Vec<f64> {
    log_grid(0.1, 300.0, 20)
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn require_grid(name: &str, grid: &[f64], positive: bool) -> RunResult<()> {
    if grid.is_empty() {
        return Err(config_err(format!("{name}: grid is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite() || (positive && **v <= 0.0)) {
        return Err(config_err(format!("{name}: invalid grid value {v}")));
    }
    Ok(())
}

fn require_positive(name: &str, v: f64) -> RunResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Multi-state `1/f^α` noise with rates on `[1/τ_c, 30/τ_c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSettings {
    /// `M = 2^levels_exponent` noise levels.
    pub levels_exponent: u32,
    pub alpha: f64,
    /// Mean absolute noise amplitude `⟨|η|⟩`.
    pub strength: f64,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        Self {
            levels_exponent: 5,
            alpha: 1.0,
            strength: 0.125,
        }
    }
}

impl NoiseSettings {
    pub fn validate(&self) -> RunResult<()> {
        if !(2..=onef::noise::MAX_FLUCTUATOR_EXPONENT).contains(&self.levels_exponent) {
            return Err(config_err(format!(
                "levels_exponent {} outside 2..={}",
                self.levels_exponent,
                onef::noise::MAX_FLUCTUATOR_EXPONENT
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(config_err(format!("alpha {} outside (0, 2)", self.alpha)));
        }
        require_positive("strength", self.strength)
    }

    pub fn model(&self, tau_c: f64) -> RunResult<NoiseModel> {
        Ok(NoiseModel::one_over_f(self.levels_exponent, tau_c, self.alpha, self.strength)?)
    }
}

/// Optimizer knobs shared by the optimizing subcommands. The per-run seed is
/// derived, not configured here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    /// Segments per `π` of duration; `None` picks the subcommand default
    /// (4 for memory, 6 for NOT so that CORPSE boundaries at multiples of
    /// `π/3` fall on the grid).
    pub segments_per_pi: Option<f64>,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub initial_step: f64,
    pub n_starts: usize,
    /// Also start from every reference sequence that fits the segment grid.
    pub reference_starts: bool,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let base = OptimizerConfig::default();
        Self {
            segments_per_pi: None,
            max_iterations: base.max_iterations,
            gradient_tolerance: base.gradient_tolerance,
            initial_step: base.initial_step,
            n_starts: base.n_starts,
            reference_starts: true,
        }
    }
}

impl OptimizerSettings {
    pub fn default_segments_per_pi(target: Target) -> f64 {
        match target {
            Target::Identity => onef::optimizer::SEGMENTS_PER_PI,
            Target::Not => 6.0,
        }
    }

    pub fn segments(&self, target: Target, total: f64) -> usize {
        let per_pi = self
            .segments_per_pi
            .unwrap_or_else(|| Self::default_segments_per_pi(target));
        ((total / PI * per_pi).round() as usize).max(1)
    }

    /// Core configuration for one run; `seed` is filled in by the caller.
    pub fn config(&self, target: Target, total: f64) -> OptimizerConfig {
        OptimizerConfig {
            n_segments: self.segments(target, total),
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            initial_step: self.initial_step,
            n_starts: self.n_starts,
            seed: 0,
            amplitude_bound: onef::pulses::A_MAX,
        }
    }

    pub fn validate(&self) -> RunResult<()> {
        if let Some(s) = self.segments_per_pi {
            require_positive("segments_per_pi", s)?;
        }
        self.config(Target::Identity, PI).validate()?;
        Ok(())
    }
}

/// Power spectra of the five-RTN ensemble, the 32-level fluctuator and the
/// ideal `1/f` law, on a log grid of `2πf/γ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsdConfig {
    pub gamma0: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub seed: Option<u64>,
}

impl Default for PsdConfig {
    fn default() -> Self {
        Self {
            gamma0: 1.0,
            omega_min: 0.1,
            omega_max: 1000.0,
            points: 200,
            seed: None,
        }
    }
}

impl PsdConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_positive("gamma0", self.gamma0)?;
        require_positive("omega_min", self.omega_min)?;
        require_positive("omega_max", self.omega_max)?;
        if self.omega_max <= self.omega_min || self.points < 2 {
            return Err(config_err("need omega_min < omega_max and at least two points"));
        }
        Ok(())
    }
}

/// Memory fidelity at `T = 12π` against `τ_c`: the optimized
/// `optimized_pi·π` pulse and the reference sequences, each repeated to fill
/// `12π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemorySweepConfig {
    pub tau_c: Vec<f64>,
    pub noise: NoiseSettings,
    pub optimizer: OptimizerSettings,
    pub optimized_pi: f64,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for MemorySweepConfig {
    fn default() -> Self {
        Self {
            tau_c: default_tau_grid(),
            noise: NoiseSettings::default(),
            optimizer: OptimizerSettings::default(),
            optimized_pi: 6.0,
            seed: None,
            cache_dir: None,
        }
    }
}

impl MemorySweepConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_grid("tau_c", &self.tau_c, true)?;
        require_positive("optimized_pi", self.optimized_pi)?;
        let repeats = 12.0 / self.optimized_pi;
        if (repeats - repeats.round()).abs() > 1e-12 {
            return Err(config_err("optimized_pi must divide 12"));
        }
        self.noise.validate()?;
        self.optimizer.validate()
    }
}

/// Optimized memory fidelity against duration at fixed `τ_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DurationSweepConfig {
    pub duration_pi: Vec<f64>,
    pub tau_c: f64,
    pub noise: NoiseSettings,
    pub optimizer: OptimizerSettings,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for DurationSweepConfig {
    fn default() -> Self {
        Self {
            duration_pi: (2..=16).map(|i| i as f64 / 2.0).collect(),
            tau_c: 3.0,
            noise: NoiseSettings::default(),
            optimizer: OptimizerSettings::default(),
            seed: None,
            cache_dir: None,
        }
    }
}

impl DurationSweepConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_grid("duration_pi", &self.duration_pi, true)?;
        require_positive("tau_c", self.tau_c)?;
        self.noise.validate()?;
        self.optimizer.validate()
    }
}

/// Memory fidelity at `T = 12π` against `⟨|η|⟩` at fixed `τ_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrengthSweepConfig {
    pub strength: Vec<f64>,
    pub tau_c: f64,
    /// `strength` inside is ignored; the grid above replaces it.
    pub noise: NoiseSettings,
    pub optimizer: OptimizerSettings,
    pub optimized_pi: f64,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for StrengthSweepConfig {
    fn default() -> Self {
        Self {
            strength: (1..=20).map(|i| 0.025 * i as f64).collect(),
            tau_c: 30.0,
            noise: NoiseSettings::default(),
            optimizer: OptimizerSettings::default(),
            optimized_pi: 6.0,
            seed: None,
            cache_dir: None,
        }
    }
}

impl StrengthSweepConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_grid("strength", &self.strength, true)?;
        require_positive("tau_c", self.tau_c)?;
        require_positive("optimized_pi", self.optimized_pi)?;
        let repeats = 12.0 / self.optimized_pi;
        if (repeats - repeats.round()).abs() > 1e-12 {
            return Err(config_err("optimized_pi must divide 12"));
        }
        self.noise.validate()?;
        self.optimizer.validate()
    }
}

/// Optimized memory fidelity at `T = duration_pi·π` against `τ_c`, one
/// column per noise exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaSweepConfig {
    pub alpha: Vec<f64>,
    pub tau_c: Vec<f64>,
    pub duration_pi: f64,
    /// `alpha` inside is ignored; the list above replaces it.
    pub noise: NoiseSettings,
    pub optimizer: OptimizerSettings,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for AlphaSweepConfig {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 1.25, 1.5, 1.75],
            tau_c: default_tau_grid(),
            duration_pi: 6.0,
            noise: NoiseSettings::default(),
            optimizer: OptimizerSettings::default(),
            seed: None,
            cache_dir: None,
        }
    }
}

impl AlphaSweepConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_grid("alpha", &self.alpha, true)?;
        require_grid("tau_c", &self.tau_c, true)?;
        require_positive("duration_pi", self.duration_pi)?;
        for a in &self.alpha {
            NoiseSettings {
                alpha: *a,
                ..self.noise.clone()
            }
            .validate()?;
        }
        self.optimizer.validate()
    }
}

/// NOT fidelity of the `π` pulse, CORPSE, short CORPSE and an optimized
/// pulse of duration `duration_pi·π` against `τ_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NotSweepConfig {
    pub tau_c: Vec<f64>,
    pub duration_pi: f64,
    pub noise: NoiseSettings,
    pub optimizer: OptimizerSettings,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for NotSweepConfig {
    fn default() -> Self {
        Self {
            tau_c: default_tau_grid(),
            duration_pi: 7.0 / 3.0,
            noise: NoiseSettings::default(),
            optimizer: OptimizerSettings::default(),
            seed: None,
            cache_dir: None,
        }
    }
}

impl NotSweepConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_grid("tau_c", &self.tau_c, true)?;
        require_positive("duration_pi", self.duration_pi)?;
        self.noise.validate()?;
        self.optimizer.validate()
    }
}

/// One full optimization per `τ_c`, dumped as JSON plus a pulse CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub target: Target,
    pub tau_c: Vec<f64>,
    pub duration_pi: f64,
    pub noise: NoiseSettings,
    pub optimizer: OptimizerSettings,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            target: Target::Not,
            tau_c: vec![45.0, 100.0, 150.0],
            duration_pi: 7.0 / 3.0,
            noise: NoiseSettings::default(),
            optimizer: OptimizerSettings::default(),
            seed: None,
            cache_dir: None,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> RunResult<()> {
        require_grid("tau_c", &self.tau_c, true)?;
        require_positive("duration_pi", self.duration_pi)?;
        self.noise.validate()?;
        self.optimizer.validate()
    }
}

/// Parse a config document from `path`, or the defaults when `path` is
/// `None`.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> RunResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| config_err(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))
        }
    }
}

/// The explicit seed: `--seed` wins over the document.
pub fn resolve_seed(from_config: Option<u64>, from_cli: Option<u64>) -> RunResult<u64> {
    from_cli
        .or(from_config)
        .ok_or_else(|| config_err("a seed is required: set \"seed\" in the config or pass --seed"))
}

//! Optimization problems shared by the subcommands, their seeds, and the
//! on-disk result cache.
//!
//! A problem is identified by its canonical JSON document. The seed of its
//! random starts is `derive_seed(seed, "optimize", h)` where `h` is the first
//! eight bytes (little endian) of the SHA-256 of that document, so the same
//! problem gets the same starts in every subcommand. Cache files are named
//! by the SHA-256 of the document together with the top-level seed.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use onef::fidelity::Target;
use onef::optimizer::{optimize_with_starts, OptimizationResult, OptimizerConfig};
use onef::pulses::{
    corpse_identity, corpse_not, cpmg_block, pi_pulse, short_corpse_not, two_pi_pulse, zero_pulse,
    PulseSequence,
};
use onef::seed::derive_seed;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{NoiseSettings, OptimizerSettings};
use crate::error::{RunError, RunResult};

/// Everything that determines an optimization apart from the top-level seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub target: Target,
    pub duration: f64,
    pub tau_c: f64,
    pub levels_exponent: u32,
    pub alpha: f64,
    pub strength: f64,
    pub n_segments: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub initial_step: f64,
    pub n_starts: usize,
    pub reference_starts: bool,
}

impl Problem {
    pub fn new(
        target: Target,
        duration: f64,
        tau_c: f64,
        noise: &NoiseSettings,
        optimizer: &OptimizerSettings,
    ) -> Self {
        let c = optimizer.config(target, duration);
        Self {
            target,
            duration,
            tau_c,
            levels_exponent: noise.levels_exponent,
            alpha: noise.alpha,
            strength: noise.strength,
            n_segments: c.n_segments,
            max_iterations: c.max_iterations,
            gradient_tolerance: c.gradient_tolerance,
            initial_step: c.initial_step,
            n_starts: c.n_starts,
            reference_starts: optimizer.reference_starts,
        }
    }

    pub fn noise(&self) -> NoiseSettings {
        NoiseSettings {
            levels_exponent: self.levels_exponent,
            alpha: self.alpha,
            strength: self.strength,
        }
    }

    fn document(&self) -> String {
        serde_json::to_string(self).expect("problem serializes")
    }

    /// Seed of the random starts under top-level seed `seed`.
    pub fn derived_seed(&self, seed: u64) -> u64 {
        let digest = Sha256::digest(self.document().as_bytes());
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        derive_seed(seed, "optimize", u64::from_le_bytes(head))
    }

    pub fn cache_key(&self, seed: u64) -> String {
        let mut h = Sha256::new();
        h.update(self.document().as_bytes());
        h.update(seed.to_le_bytes());
        hex::encode(h.finalize())
    }

    pub fn optimizer_config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            n_segments: self.n_segments,
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            initial_step: self.initial_step,
            n_starts: self.n_starts,
            seed: self.derived_seed(seed),
            amplitude_bound: onef::pulses::A_MAX,
        }
    }

    /// Reference sequences (or repetitions of them) lasting exactly
    /// `duration` whose boundaries fall on the segment grid, as amplitudes.
    pub fn reference_seeds(&self) -> Vec<Vec<f64>> {
        if !self.reference_starts {
            return Vec::new();
        }
        let blocks: Vec<PulseSequence> = match self.target {
            Target::Identity => vec![
                two_pi_pulse(),
                corpse_identity(),
                cpmg_block(PI).expect("valid gap"),
                cpmg_block(2.0 * PI).expect("valid gap"),
            ],
            Target::Not => vec![pi_pulse(), corpse_not(), short_corpse_not()],
        };
        blocks
            .iter()
            .filter_map(|b| {
                let reps = self.duration / b.duration();
                let whole = reps.round();
                let fits = whole >= 1.0 && (reps - whole).abs() < 1e-9;
                // Repeating a NOT sequence does not give a NOT for even counts.
                let allowed = self.target == Target::Identity || whole == 1.0;
                (fits && allowed)
                    .then(|| b.repeat(whole as usize).ok()?.resample_uniform(self.n_segments).ok())
                    .flatten()
            })
            .collect()
    }

    /// Run the optimization, reading and filling the cache in `cache_dir`
    /// when given.
    pub fn solve(&self, seed: u64, cache_dir: Option<&Path>) -> RunResult<OptimizationResult> {
        let cached = cache_dir.map(|d| d.join(format!("{}.json", self.cache_key(seed))));
        if let Some(path) = &cached {
            if let Ok(text) = fs::read_to_string(path) {
                if let Ok(result) = serde_json::from_str::<OptimizationResult>(&text) {
                    return Ok(result);
                }
            }
        }
        let model = self.noise().model(self.tau_c)?;
        let result = optimize_with_starts(
            &model,
            &self.target.unitary(),
            self.duration,
            &self.optimizer_config(seed),
            &self.reference_seeds(),
        )?;
        if let Some(path) = &cached {
            write_atomically(path, &serde_json::to_string(&result).expect("result serializes"))?;
        }
        Ok(result)
    }
}

fn write_atomically(path: &Path, contents: &str) -> RunResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).map_err(RunError::from)
}

/// Memory reference sequences repeated to `total`, in column order
/// `two_pi, corpse, cpmg1, cpmg2, zero`.
pub fn memory_references(total: f64) -> RunResult<Vec<(&'static str, PulseSequence)>> {
    let blocks = [
        ("two_pi", two_pi_pulse()),
        ("corpse", corpse_identity()),
        ("cpmg1", cpmg_block(PI)?),
        ("cpmg2", cpmg_block(2.0 * PI)?),
    ];
    let mut out = Vec::with_capacity(5);
    for (name, block) in blocks {
        let reps = total / block.duration();
        if (reps - reps.round()).abs() > 1e-9 || reps.round() < 1.0 {
            return Err(RunError::Config(format!(
                "{name} does not tile a duration of {total}"
            )));
        }
        out.push((name, block.repeat(reps.round() as usize)?));
    }
    out.push(("zero", zero_pulse(total)?));
    Ok(out)
}

/// NOT reference sequences in column order `pi, corpse, short_corpse`.
pub fn not_references() -> Vec<(&'static str, PulseSequence)> {
    vec![
        ("pi", pi_pulse()),
        ("corpse", corpse_not()),
        ("short_corpse", short_corpse_not()),
    ]
}

//! Projected gradient ascent on the average gate fidelity over
//! piecewise-constant amplitudes on a uniform time grid.
//!
//! The gradient is exact: each segment propagator `P_j = exp(G(a_j)Δt)` is
//! computed together with its Fréchet derivative in the control direction, the
//! Pauli images are propagated forward, the fidelity's coupling matrix is
//! propagated backward with `P_jᵀ`, and `∂Φ/∂a_j` is the contraction of the two
//! around the derivative of segment `j`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{bloch_generator, control_direction, MasterEquation, QubitOperator};
use crate::error::{Error, Result};
use crate::fidelity::gate_fidelity_from_transfer;
use crate::linalg::expm_frechet;
use crate::noise::NoiseModel;
use crate::pulses::{uniform_random_pulse, PulseSequence, A_MAX};
use crate::seed::derive_seed;

/// Segments per `π` of total duration used by `OptimizerConfig::for_duration`.
pub const SEGMENTS_PER_PI: f64 = 4.0;

/// Steps growing past this are capped.
const MAX_STEP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub n_segments: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub initial_step: f64,
    /// Random starts, in addition to the zero and constant-`a_max` starts.
    pub n_starts: usize,
    pub seed: u64,
    pub amplitude_bound: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_segments: 24,
            max_iterations: 2000,
            gradient_tolerance: 1e-7,
            initial_step: 1.0,
            n_starts: 8,
            seed: 0,
            amplitude_bound: A_MAX,
        }
    }
}

impl OptimizerConfig {
    /// Defaults with `4` segments per `π` of `total` (at least one).
    pub fn for_duration(total: f64) -> Self {
        Self {
            n_segments: ((SEGMENTS_PER_PI * total / PI).round() as usize).max(1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("optimizer {what}")));
        if self.n_segments == 0 {
            return bad("needs at least one segment");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.gradient_tolerance > 0.0 && self.gradient_tolerance.is_finite()) {
            return bad("gradient_tolerance must be positive");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step must be positive");
        }
        if !(self.amplitude_bound > 0.0 && self.amplitude_bound.is_finite()) {
            return bad("amplitude_bound must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Projected gradient below tolerance.
    Converged,
    MaxIterations,
    /// Backtracking shrank the step below floating-point resolution.
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub pulse: PulseSequence,
    pub fidelity: f64,
    /// Accepted steps of the winning start.
    pub iterations: usize,
    /// 0 is the zero pulse, 1 constant `a_max`, higher indices random.
    pub start_index: usize,
    /// Fidelity at the initial point and after every accepted step.
    pub fidelity_trace: Vec<f64>,
    pub seed: u64,
    pub stop_reason: StopReason,
    /// Final fidelity reached by each start, by index.
    pub start_fidelities: Vec<f64>,
}

impl OptimizationResult {
    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::Converged
    }
}

/// Gate fidelity as a function of the amplitudes on a fixed uniform grid.
pub struct GateObjective<'a> {
    master: MasterEquation<'a>,
    coupling: DMatrix<f64>,
    rotation: Matrix3<f64>,
    direction: DMatrix<f64>,
    total: f64,
    n_segments: usize,
    bound: f64,
}

impl<'a> GateObjective<'a> {
    pub fn new(
        model: &'a NoiseModel,
        target: &QubitOperator,
        total: f64,
        n_segments: usize,
        bound: f64,
    ) -> Result<Self> {
        target.require_unitary("target gate")?;
        if !(total > 0.0 && total.is_finite()) || n_segments == 0 {
            return Err(Error::InvalidArgument(format!(
                "objective over {n_segments} segments of total duration {total}"
            )));
        }
        let m = model.num_states();
        let rotation = target.rotation_matrix();
        let coupling = DMatrix::from_fn(3 * m, 3, |i, k| rotation[(i % 3, k)] / 12.0);
        let dt = total / n_segments as f64;
        Ok(Self {
            master: MasterEquation::with_cached_amplitudes(model, vec![-bound, 0.0, bound]),
            coupling,
            rotation,
            direction: control_direction(m) * dt,
            total,
            n_segments,
            bound,
        })
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn pulse(&self, amplitudes: &[f64]) -> Result<PulseSequence> {
        if amplitudes.len() != self.n_segments {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {} segments",
                amplitudes.len(),
                self.n_segments
            )));
        }
        PulseSequence::uniform(amplitudes, self.total, self.bound)
    }

    pub fn fidelity(&self, amplitudes: &[f64]) -> Result<f64> {
        let transfer = self.master.pauli_transfer(&self.pulse(amplitudes)?)?;
        Ok(gate_fidelity_from_transfer(&self.rotation, &transfer))
    }

    /// `∂Φ/∂a_j` for every segment.
    pub fn gradient(&self, amplitudes: &[f64]) -> Result<Vec<f64>> {
        let pulse = self.pulse(amplitudes)?;
        let model = self.master.model();
        let m = model.num_states();
        let mut y = DMatrix::zeros(3 * m, 3);
        for k in 0..m {
            for c in 0..3 {
                y[(3 * k + c, c)] = 2.0 / m as f64;
            }
        }
        let mut props = Vec::with_capacity(pulse.len());
        let mut derivs = Vec::with_capacity(pulse.len());
        for seg in pulse.segments() {
            let (p, d) = expm_frechet(&(bloch_generator(model, seg.amplitude) * seg.duration), &self.direction)?;
            derivs.push(d * &y);
            y = &p * y;
            props.push(p);
        }
        let mut lambda = self.coupling.clone();
        let mut grad = vec![0.0; pulse.len()];
        for j in (0..pulse.len()).rev() {
            grad[j] = lambda.component_mul(&derivs[j]).sum();
            lambda = props[j].tr_mul(&lambda);
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numerical("non-finite fidelity gradient".into()));
        }
        Ok(grad)
    }
}

/// Exact `∂Φ/∂a_j` for a pulse of equal-duration segments.
pub fn fidelity_gradient(
    model: &NoiseModel,
    target: &QubitOperator,
    pulse: &PulseSequence,
) -> Result<Vec<f64>> {
    if pulse.uniform_step().is_none() {
        return Err(Error::InvalidPulse(
            "gradient requires equal-duration segments".into(),
        ));
    }
    GateObjective::new(model, target, pulse.duration(), pulse.len(), pulse.a_max())?
        .gradient(&pulse.amplitudes())
}

/// Outcome of one ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent {
    pub amplitudes: Vec<f64>,
    pub fidelity: f64,
    pub iterations: usize,
    pub fidelity_trace: Vec<f64>,
    pub stop_reason: StopReason,
}

fn clip(x: f64, bound: f64) -> f64 {
    x.clamp(-bound, bound)
}

/// Largest component of the gradient projected onto the feasible box.
fn projected_norm(x: &[f64], g: &[f64], bound: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if (xi >= bound && gi > 0.0) || (xi <= -bound && gi < 0.0) {
                0.0
            } else {
                gi.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Projected gradient ascent with step doubling on acceptance and halving on
/// rejection. A trial point is accepted only if the fidelity does not drop.
pub fn ascend(objective: &GateObjective, initial: &[f64], config: &OptimizerConfig) -> Result<Ascent> {
    let bound = config.amplitude_bound;
    let mut x: Vec<f64> = initial.iter().map(|&a| clip(a, bound)).collect();
    let mut f = objective.fidelity(&x)?;
    let mut trace = vec![f];
    let mut g = objective.gradient(&x)?;
    let mut step = config.initial_step;
    let mut iterations = 0;
    let stop_reason = 'outer: loop {
        if projected_norm(&x, &g, bound) <= config.gradient_tolerance {
            break StopReason::Converged;
        }
        if iterations >= config.max_iterations {
            break StopReason::MaxIterations;
        }
        let gmax = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        loop {
            if step * gmax < f64::EPSILON * bound {
                break 'outer StopReason::StepUnderflow;
            }
            let trial: Vec<f64> = x.iter().zip(&g).map(|(&xi, &gi)| clip(xi + step * gi, bound)).collect();
            if trial == x {
                step *= 0.5;
                continue;
            }
            let ft = objective.fidelity(&trial)?;
            if ft >= f {
                x = trial;
                f = ft;
                step = (2.0 * step).min(MAX_STEP);
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        trace.push(f);
        g = objective.gradient(&x)?;
    };
    Ok(Ascent {
        amplitudes: x,
        fidelity: f,
        iterations,
        fidelity_trace: trace,
        stop_reason,
    })
}

/// Initial amplitudes for start `index`.
pub fn start_amplitudes(config: &OptimizerConfig, total: f64, index: usize) -> Result<Vec<f64>> {
    let n = config.n_segments;
    let bound = config.amplitude_bound;
    Ok(match index {
        0 => vec![0.0; n],
        1 => vec![bound; n],
        i => uniform_random_pulse(total, n, derive_seed(config.seed, "start", i as u64), A_MAX)?
            .amplitudes()
            .iter()
            .map(|a| a * bound / A_MAX)
            .collect(),
    })
}

/// Best of `n_starts + 2` ascents: from the zero pulse, from constant
/// `a_max`, and from `n_starts` seeded uniform random pulses. Starts run in
/// parallel; ties go to the lowest start index.
pub fn optimize(
    model: &NoiseModel,
    target: &QubitOperator,
    total: f64,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    optimize_with_starts(model, target, total, config, &[])
}

/// As `optimize`, with `extra` initial amplitude vectors appended after the
/// generated starts (indices `n_starts + 2..`).
///
/// Seeding with a reference sequence resampled onto the segment grid makes
/// the result at least as good as that reference, since ascent never lowers
/// the fidelity of its start.
pub fn optimize_with_starts(
    model: &NoiseModel,
    target: &QubitOperator,
    total: f64,
    config: &OptimizerConfig,
    extra: &[Vec<f64>],
) -> Result<OptimizationResult> {
    config.validate()?;
    let objective = GateObjective::new(model, target, total, config.n_segments, config.amplitude_bound)?;
    let generated = config.n_starts + 2;
    for (i, start) in extra.iter().enumerate() {
        if start.len() != config.n_segments {
            return Err(Error::InvalidArgument(format!(
                "extra start {i} has {} amplitudes, expected {}",
                start.len(),
                config.n_segments
            )));
        }
        if start.iter().any(|a| !(a.abs() <= config.amplitude_bound)) {
            return Err(Error::InvalidArgument(format!("extra start {i} exceeds the amplitude bound")));
        }
    }
    let ascents: Vec<Ascent> = (0..generated + extra.len())
        .into_par_iter()
        .map(|i| {
            let init = if i < generated {
                start_amplitudes(config, total, i)?
            } else {
                extra[i - generated].clone()
            };
            ascend(&objective, &init, config)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, a) in ascents.iter().enumerate() {
        if a.fidelity > ascents[best].fidelity {
            best = i;
        }
    }
    let start_fidelities = ascents.iter().map(|a| a.fidelity).collect();
    let winner = ascents.into_iter().nth(best).expect("at least two starts");
    Ok(OptimizationResult {
        pulse: objective.pulse(&winner.amplitudes)?,
        fidelity: winner.fidelity,
        iterations: winner.iterations,
        start_index: best,
        fidelity_trace: winner.fidelity_trace,
        seed: config.seed,
        stop_reason: winner.stop_reason,
        start_fidelities,
    })
}

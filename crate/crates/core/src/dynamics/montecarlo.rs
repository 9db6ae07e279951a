use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::QubitOperator;
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, NoiseTrajectory};
use crate::pulses::PulseSequence;
use crate::seed::derive_seed;

/// Smallest accepted ensemble for `monte_carlo_average`.
pub const MIN_TRAJECTORIES: usize = 100;

/// Product of the exact `2 × 2` unitaries over every maximal interval on
/// which both the control amplitude and the noise level are constant.
pub fn trajectory_unitary(
    pulse: &PulseSequence,
    traj: &NoiseTrajectory,
    model: &NoiseModel,
) -> Result<QubitOperator> {
    let total = pulse.duration();
    if (traj.total_time - total).abs() > 1e-9 * total.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "trajectory spans {} but the pulse lasts {total}",
            traj.total_time
        )));
    }
    let b = model.amplitudes();
    if let Some(&s) = traj.state_indices.iter().find(|&&s| s >= b.len()) {
        return Err(Error::InvalidArgument(format!("trajectory visits unknown level {s}")));
    }
    let segments = pulse.segments();
    let seg_ends = pulse.boundaries();
    let intervals: Vec<(f64, f64, usize)> = traj.intervals().collect();
    let mut u = QubitOperator::identity();
    let (mut i, mut j, mut t) = (0, 0, 0.0);
    while i < segments.len() && j < intervals.len() {
        let (_, int_end, level) = intervals[j];
        let end = seg_ends[i].min(int_end);
        if end > t {
            let omega = [segments[i].amplitude, 0.0, b[level]];
            u = QubitOperator::precession(omega, end - t) * u;
            t = end;
        }
        if seg_ends[i] <= end {
            i += 1;
        }
        if int_end <= end {
            j += 1;
        }
    }
    Ok(u)
}

/// `U ρ U†` for the unitary generated along one noise trajectory.
pub fn propagate_trajectory(
    pulse: &PulseSequence,
    traj: &NoiseTrajectory,
    model: &NoiseModel,
    initial: &QubitOperator,
) -> Result<QubitOperator> {
    Ok(initial.conjugated_by(&trajectory_unitary(pulse, traj, model)?))
}

/// Sample mean of trajectory-evolved operators with per-entry standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: QubitOperator,
    /// Standard error of the real (resp. imaginary) part of each entry in
    /// the real (resp. imaginary) slot.
    pub std_error: Matrix2<Complex64>,
    /// Sample variances of the Bloch components `tr(σ_c ρ)`.
    pub bloch_variance: [f64; 3],
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// Scale of the trace distance between the mean and the true average.
    ///
    /// For equal-trace Hermitian operators the trace distance is half the
    /// Euclidean length of the Bloch difference; this returns half the root
    /// of the summed Bloch-component variances of the mean.
    pub fn trace_distance_std_error(&self) -> f64 {
        let var: f64 = self.bloch_variance.iter().sum();
        0.5 * (var / self.samples as f64).sqrt()
    }
}

/// Average of `n` independent trajectory evolutions. Trajectory `i` draws its
/// noise from `derive_seed(seed, "trajectory", i)`, and the reduction runs in
/// index order, so the result does not depend on the thread count.
pub fn monte_carlo_average(
    model: &NoiseModel,
    pulse: &PulseSequence,
    initial: &QubitOperator,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n < MIN_TRAJECTORIES {
        return Err(Error::InvalidArgument(format!(
            "{n} trajectories; at least {MIN_TRAJECTORIES} are required"
        )));
    }
    initial.require_hermitian("initial operator")?;
    let total = pulse.duration();
    let samples: Vec<QubitOperator> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            if total == 0.0 {
                return Ok(*initial);
            }
            let traj = NoiseTrajectory::sample(model, total, derive_seed(seed, "trajectory", i))?;
            propagate_trajectory(pulse, &traj, model, initial)
        })
        .collect::<Result<_>>()?;

    let nf = n as f64;
    let mean = samples.iter().copied().sum::<QubitOperator>() * (1.0 / nf);
    let mut sq = Matrix2::<Complex64>::zeros();
    let mut bloch_var = [0.0; 3];
    let (_, mean_r) = mean.bloch();
    for s in &samples {
        let d = s.0 - mean.0;
        sq += d.map(|c| Complex64::new(c.re * c.re, c.im * c.im));
        let (_, r) = s.bloch();
        for c in 0..3 {
            bloch_var[c] += (r[c] - mean_r[c]).powi(2);
        }
    }
    let std_error = sq.map(|c| Complex64::new((c.re / (nf - 1.0) / nf).sqrt(), (c.im / (nf - 1.0) / nf).sqrt()));
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        bloch_variance: bloch_var.map(|v| v / (nf - 1.0)),
        samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{zero_pulse, PulseSequence};

    #[test]
    fn frozen_bias_is_a_phase() {
        let model = NoiseModel::static_bias(0.3).unwrap();
        let pulse = zero_pulse(2.0).unwrap();
        let traj = NoiseTrajectory {
            switch_times: vec![],
            state_indices: vec![0],
            total_time: 2.0,
        };
        let rho = QubitOperator::pure_along([1.0, 0.0, 0.0]);
        let out = propagate_trajectory(&pulse, &traj, &model, &rho).unwrap();
        let u = QubitOperator::precession([0.0, 0.0, 0.3], 2.0);
        assert!((out - rho.conjugated_by(&u)).max_abs() < 1e-15);
    }

    #[test]
    fn split_interval_is_group_property() {
        let model = NoiseModel::static_bias(0.3).unwrap();
        let whole = PulseSequence::from_pairs(&[(0.6, 1.5)]).unwrap();
        let halves = PulseSequence::from_pairs(&[(0.6, 0.5), (0.6, 1.0)]).unwrap();
        let traj = NoiseTrajectory {
            switch_times: vec![],
            state_indices: vec![1],
            total_time: 1.5,
        };
        let a = trajectory_unitary(&whole, &traj, &model).unwrap();
        let b = trajectory_unitary(&halves, &traj, &model).unwrap();
        assert!((a - b).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_mismatch_and_small_ensembles() {
        let model = NoiseModel::static_bias(0.3).unwrap();
        let pulse = zero_pulse(2.0).unwrap();
        let traj = NoiseTrajectory {
            switch_times: vec![],
            state_indices: vec![0],
            total_time: 1.0,
        };
        assert!(trajectory_unitary(&pulse, &traj, &model).is_err());
        assert!(monte_carlo_average(&model, &pulse, &QubitOperator::ground(), 10, 1).is_err());
    }
}

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::NoiseModel;
use crate::error::{Error, Result};
use crate::seed;

/// One sample path of the noise process on `[0, total_time]`.
///
/// `state_indices[0]` is the initial level and `state_indices[i + 1]` the
/// level entered at `switch_times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrajectory {
    pub switch_times: Vec<f64>,
    pub state_indices: Vec<usize>,
    pub total_time: f64,
}

impl NoiseTrajectory {
    /// Gillespie sampling: uniform initial level, exponential holding times
    /// with rate `−Γ_kk`, jump to `j ≠ k` with probability `Γ_jk / (−Γ_kk)`.
    pub fn sample(model: &NoiseModel, total_time: f64, seed: u64) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("trajectory length {total_time}")));
        }
        let gen = model.generator();
        let m = model.num_states();
        let mut rng = seed::rng(seed);
        let mut state = rng.random_range(0..m);
        let mut t = 0.0;
        let mut traj = Self {
            switch_times: Vec::new(),
            state_indices: vec![state],
            total_time,
        };
        loop {
            let rate = -gen[(state, state)];
            if rate <= 0.0 {
                break;
            }
            let exp = Exp::new(rate).map_err(|e| Error::Numerical(e.to_string()))?;
            t += exp.sample(&mut rng);
            if t >= total_time {
                break;
            }
            let mut u = rng.random::<f64>() * rate;
            let mut next = state;
            for j in (0..m).filter(|&j| j != state) {
                let r = gen[(j, state)].max(0.0);
                if r <= 0.0 {
                    continue;
                }
                next = j;
                if u < r {
                    break;
                }
                u -= r;
            }
            if next == state {
                break;
            }
            state = next;
            traj.switch_times.push(t);
            traj.state_indices.push(state);
        }
        Ok(traj)
    }

    pub fn num_switches(&self) -> usize {
        self.switch_times.len()
    }

    /// Level occupied at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> usize {
        let i = self.switch_times.partition_point(|s| *s <= t);
        self.state_indices[i]
    }

    /// Maximal constant intervals `(start, end, level)`.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        let starts = std::iter::once(0.0).chain(self.switch_times.iter().cloned());
        let ends = self
            .switch_times
            .iter()
            .cloned()
            .chain(std::iter::once(self.total_time));
        starts
            .zip(ends)
            .zip(self.state_indices.iter().cloned())
            .map(|((a, b), s)| (a, b, s))
    }

    /// Noise amplitude `η(n·dt)` for `n = 0..⌊T/dt⌋`.
    pub fn sample_grid(&self, model: &NoiseModel, dt: f64) -> Vec<f64> {
        let n = (self.total_time / dt).floor() as usize;
        let b = model.amplitudes();
        let mut out = Vec::with_capacity(n);
        let mut idx = 0;
        for i in 0..n {
            let t = i as f64 * dt;
            while idx < self.switch_times.len() && self.switch_times[idx] <= t {
                idx += 1;
            }
            out.push(b[self.state_indices[idx]]);
        }
        out
    }
}

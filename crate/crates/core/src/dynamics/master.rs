use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;

use super::QubitOperator;
use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::noise::NoiseModel;
use crate::pulses::{PulseSequence, A_MAX};

/// Propagators kept per `MasterEquation`; further ones are recomputed.
const CACHE_LIMIT: usize = 256;

/// Conditional density operators `ρ_k(t)`, one per noise level.
///
/// `tr ρ_k` is the probability of level `k` for density-operator inputs, and
/// `Σ_k ρ_k` is the noise-averaged qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    rhos: Vec<QubitOperator>,
    time: f64,
}

impl ConditionalState {
    pub fn new(rhos: Vec<QubitOperator>, time: f64) -> Self {
        Self { rhos, time }
    }

    /// Stationary start: `ρ_k(0) = initial / M`.
    pub fn stationary(initial: &QubitOperator, num_states: usize) -> Self {
        let share = *initial * (1.0 / num_states as f64);
        Self::new(vec![share; num_states], 0.0)
    }

    pub fn rhos(&self) -> &[QubitOperator] {
        &self.rhos
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn num_states(&self) -> usize {
        self.rhos.len()
    }

    /// Noise-averaged operator `Σ_k ρ_k`.
    pub fn total(&self) -> QubitOperator {
        self.rhos.iter().copied().sum()
    }

    /// `P_k = tr ρ_k`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.rhos.iter().map(|r| r.trace().re).collect()
    }

    pub fn total_trace(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    fn to_parts(&self) -> (DVector<f64>, DVector<f64>) {
        let m = self.rhos.len();
        let mut p = DVector::zeros(m);
        let mut r = DVector::zeros(3 * m);
        for (k, rho) in self.rhos.iter().enumerate() {
            let (tr, v) = rho.bloch();
            p[k] = tr;
            for c in 0..3 {
                r[3 * k + c] = v[c];
            }
        }
        (p, r)
    }

    fn from_parts(p: &DVector<f64>, r: &DVector<f64>, time: f64) -> Self {
        let rhos = (0..p.len())
            .map(|k| QubitOperator::from_bloch(p[k], [r[3 * k], r[3 * k + 1], r[3 * k + 2]]))
            .collect();
        Self::new(rhos, time)
    }
}

/// `H_k = ½ a σ_x + ½ b_k σ_z` for the zero-based level `k`.
pub fn conditional_hamiltonian(model: &NoiseModel, k: usize, a: f64) -> Result<QubitOperator> {
    if k >= model.num_states() {
        return Err(Error::InvalidArgument(format!(
            "level {k} out of range for a {}-level model",
            model.num_states()
        )));
    }
    if !a.is_finite() || a.abs() > A_MAX {
        return Err(Error::InvalidArgument(format!("control amplitude {a} outside bound")));
    }
    let b = model.amplitudes()[k];
    Ok(QubitOperator::sigma_x() * (0.5 * a) + QubitOperator::sigma_z() * (0.5 * b))
}

/// Generator of the stacked Bloch vectors `(x_k, y_k, z_k)`, `3M × 3M`.
///
/// Each level precesses as `dr_k/dt = ω_k × r_k` with `ω_k = (a, 0, b_k)`
/// and the levels are coupled by `Γ ⊗ I₃`. The traces `tr ρ_k` evolve under
/// `Γ` alone and are handled separately.
pub fn bloch_generator(model: &NoiseModel, a: f64) -> DMatrix<f64> {
    let m = model.num_states();
    let gamma = model.generator();
    let b = model.amplitudes();
    let mut g = DMatrix::zeros(3 * m, 3 * m);
    for k in 0..m {
        for j in 0..m {
            let rate = gamma[(k, j)];
            if rate != 0.0 {
                for c in 0..3 {
                    g[(3 * k + c, 3 * j + c)] = rate;
                }
            }
        }
        let o = 3 * k;
        g[(o, o + 1)] -= b[k];
        g[(o + 1, o)] += b[k];
        g[(o + 1, o + 2)] -= a;
        g[(o + 2, o + 1)] += a;
    }
    g
}

/// `∂G/∂a = I_M ⊗ X` with `X` the generator of rotations about `x`.
pub fn control_direction(num_states: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(3 * num_states, 3 * num_states);
    for k in 0..num_states {
        x[(3 * k + 1, 3 * k + 2)] = -1.0;
        x[(3 * k + 2, 3 * k + 1)] = 1.0;
    }
    x
}

type Key = (u64, u64);

/// Exact piecewise propagation of the conditional operators for one model,
/// with a bounded cache of segment propagators.
pub struct MasterEquation<'a> {
    model: &'a NoiseModel,
    cached_amplitudes: Option<Vec<f64>>,
    bloch_cache: Mutex<HashMap<Key, Arc<DMatrix<f64>>>>,
    trace_cache: Mutex<HashMap<u64, Arc<DMatrix<f64>>>>,
}

impl<'a> MasterEquation<'a> {
    pub fn new(model: &'a NoiseModel) -> Self {
        Self {
            model,
            cached_amplitudes: None,
            bloch_cache: Mutex::new(HashMap::new()),
            trace_cache: Mutex::new(HashMap::new()),
        }
    }

    /// Cache Bloch propagators only for the listed amplitudes, so that long
    /// searches over continuous amplitudes do not fill the cache.
    pub fn with_cached_amplitudes(model: &'a NoiseModel, amplitudes: Vec<f64>) -> Self {
        Self {
            cached_amplitudes: Some(amplitudes),
            ..Self::new(model)
        }
    }

    pub fn model(&self) -> &NoiseModel {
        self.model
    }

    /// `exp(G(a)·dt)` on the stacked Bloch vectors.
    pub fn bloch_propagator(&self, a: f64, dt: f64) -> Result<Arc<DMatrix<f64>>> {
        let cacheable = self
            .cached_amplitudes
            .as_ref()
            .is_none_or(|list| list.contains(&a));
        if !cacheable {
            return Ok(Arc::new(expm(&(bloch_generator(self.model, a) * dt))?));
        }
        let key = (a.to_bits(), dt.to_bits());
        if let Some(p) = self.bloch_cache.lock().expect("cache lock").get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(expm(&(bloch_generator(self.model, a) * dt))?);
        let mut cache = self.bloch_cache.lock().expect("cache lock");
        if cache.len() < CACHE_LIMIT {
            cache.insert(key, p.clone());
        }
        Ok(p)
    }

    /// `exp(Γ·dt)` on the level probabilities.
    pub fn trace_propagator(&self, dt: f64) -> Result<Arc<DMatrix<f64>>> {
        let key = dt.to_bits();
        if let Some(p) = self.trace_cache.lock().expect("cache lock").get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(expm(&(self.model.generator() * dt))?);
        let mut cache = self.trace_cache.lock().expect("cache lock");
        if cache.len() < CACHE_LIMIT {
            cache.insert(key, p.clone());
        }
        Ok(p)
    }

    /// Final conditional state for `initial` evolved under `pulse`.
    pub fn propagate(&self, pulse: &PulseSequence, initial: &QubitOperator) -> Result<ConditionalState> {
        Ok(self.history(pulse, initial)?.pop().expect("history includes the start"))
    }

    /// Conditional states at `t = 0` and at every segment boundary.
    pub fn history(
        &self,
        pulse: &PulseSequence,
        initial: &QubitOperator,
    ) -> Result<Vec<ConditionalState>> {
        initial.require_hermitian("initial operator")?;
        let start = ConditionalState::stationary(initial, self.model.num_states());
        let (mut p, mut r) = start.to_parts();
        let mut out = Vec::with_capacity(pulse.len() + 1);
        out.push(start);
        let mut t = 0.0;
        for seg in pulse.segments() {
            p = &*self.trace_propagator(seg.duration)? * p;
            r = &*self.bloch_propagator(seg.amplitude, seg.duration)? * r;
            t += seg.duration;
            if p.iter().chain(r.iter()).any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("non-finite state at t = {t}")));
            }
            out.push(ConditionalState::from_parts(&p, &r, t));
        }
        Ok(out)
    }

    /// Noise-averaged images of the Pauli operators as a `3 × 3` matrix whose
    /// column `k` is the Bloch vector `tr(σ_l E(σ_k))` of `E(σ_k)`.
    pub fn pauli_transfer(&self, pulse: &PulseSequence) -> Result<Matrix3<f64>> {
        let m = self.model.num_states();
        let mut y = DMatrix::zeros(3 * m, 3);
        for k in 0..m {
            for c in 0..3 {
                y[(3 * k + c, c)] = 2.0 / m as f64;
            }
        }
        for seg in pulse.segments() {
            y = &*self.bloch_propagator(seg.amplitude, seg.duration)? * y;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite Pauli transfer matrix".into()));
        }
        Ok(Matrix3::from_fn(|l, c| (0..m).map(|k| y[(3 * k + l, c)]).sum()))
    }

    /// `(E(σ_x), E(σ_y), E(σ_z))` for the averaged evolution.
    pub fn evolve_operator_basis(&self, pulse: &PulseSequence) -> Result<[QubitOperator; 3]> {
        let e = self.pauli_transfer(pulse)?;
        Ok([0, 1, 2].map(|k| QubitOperator::from_bloch(0.0, [e[(0, k)], e[(1, k)], e[(2, k)]])))
    }
}

pub fn propagate_master(
    model: &NoiseModel,
    pulse: &PulseSequence,
    initial: &QubitOperator,
) -> Result<ConditionalState> {
    MasterEquation::new(model).propagate(pulse, initial)
}

pub fn evolve_operator_basis(model: &NoiseModel, pulse: &PulseSequence) -> Result<[QubitOperator; 3]> {
    MasterEquation::new(model).evolve_operator_basis(pulse)
}

/// CSV time series: `t`, real and imaginary parts of the averaged operator
/// entries, then `P_1..P_M`.
pub fn write_history_csv<W: Write>(history: &[ConditionalState], out: W) -> Result<()> {
    let m = history.first().map_or(0, |s| s.num_states());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        header.push(format!("re_rho{i}{j}"));
        header.push(format!("im_rho{i}{j}"));
    }
    header.extend((1..=m).map(|k| format!("P_{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for state in history {
        let total = state.total();
        let mut row = vec![state.time().to_string()];
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let c: Complex64 = total.0[(i, j)];
            row.push(c.re.to_string());
            row.push(c.im.to_string());
        }
        row.extend(state.probabilities().iter().map(|p| p.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#![allow(dead_code)]

use nalgebra::Matrix2;
use num_complex::Complex64;
use onef::pulses::PulseSequence;
use onef::NoiseModel;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type C2 = Matrix2<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(−i H t)` for `H = ½(a σ_x + d σ_z)`, from the spectral form of a
/// traceless Hermitian `2×2` matrix.
pub fn oracle_unitary(a: f64, d: f64, t: f64) -> C2 {
    let w = (a * a + d * d).sqrt();
    let i = Complex64::new(0.0, 1.0);
    if w == 0.0 {
        return C2::identity();
    }
    let (s, c) = (w * t / 2.0).sin_cos();
    let h = C2::new(
        Complex64::new(d / w, 0.0),
        Complex64::new(a / w, 0.0),
        Complex64::new(a / w, 0.0),
        Complex64::new(-d / w, 0.0),
    );
    C2::identity() * Complex64::new(c, 0.0) - h * (i * s)
}

/// Product of segment unitaries under a constant bias `d`.
pub fn oracle_sequence(pulse: &PulseSequence, d: f64) -> C2 {
    pulse
        .segments()
        .iter()
        .fold(C2::identity(), |u, s| oracle_unitary(s.amplitude, d, s.duration) * u)
}

/// Average gate fidelity of a unitary `u` against `target`:
/// `(|tr(target† u)|² + 2) / 6`.
pub fn oracle_gate_fidelity(target: &C2, u: &C2) -> f64 {
    ((target.adjoint() * u).trace().norm_sqr() + 2.0) / 6.0
}

/// `|⟨0|u|0⟩|²`.
pub fn oracle_return_probability(u: &C2) -> f64 {
    u[(0, 0)].norm_sqr()
}

/// Random model among RTN ensembles (`K ≤ 3`) and Hadamard fluctuators
/// (`M ≤ 8`), scaled to a moderate strength.
pub fn random_model(rng: &mut ChaCha8Rng) -> NoiseModel {
    let strength = rng.random_range(0.05..0.6);
    if rng.random_bool(0.5) {
        let k = rng.random_range(1..=3);
        let deltas: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let taus: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..5.0)).collect();
        NoiseModel::rtn_ensemble(&deltas, &taus)
            .unwrap()
            .scale_to_strength(strength)
            .unwrap()
    } else {
        let m = rng.random_range(2..=3);
        let gmin = rng.random_range(0.1..2.0);
        let delta = gmin * rng.random_range(0.1..1.0);
        let alpha = rng.random_range(0.5..1.9);
        NoiseModel::multistate_fluctuator(m, gmin, delta, alpha)
            .unwrap()
            .scale_to_strength(strength)
            .unwrap()
    }
}

pub fn random_pulse(rng: &mut ChaCha8Rng, max_segments: usize) -> PulseSequence {
    let n = rng.random_range(1..=max_segments);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(-1.0..=1.0), rng.random_range(0.05..2.0)))
        .collect();
    PulseSequence::from_pairs(&pairs).unwrap()
}

pub fn max_abs(m: &C2) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

mod common;

use num_complex::Complex64;
use onef::dynamics::{
    evolve_operator_basis, monte_carlo_average, propagate_master, propagate_trajectory,
    MasterEquation,
};
use onef::pulses::{pi_pulse, zero_pulse, PulseSequence};
use onef::{NoiseModel, NoiseTrajectory, QubitOperator};
use proptest::prelude::*;
use rand::Rng;

fn random_hermitian(rng: &mut impl Rng) -> QubitOperator {
    QubitOperator::from_bloch(
        rng.random_range(-2.0..2.0),
        [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
    )
}

fn random_pure_state(rng: &mut impl Rng) -> QubitOperator {
    let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-3);
    QubitOperator::pure_along(v.map(|c| c / n))
}

fn split_segment(pulse: &PulseSequence, index: usize) -> PulseSequence {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for (i, s) in pulse.segments().iter().enumerate() {
        if i == index {
            pairs.push((s.amplitude, s.duration / 2.0));
            pairs.push((s.amplitude, s.duration / 2.0));
        } else {
            pairs.push((s.amplitude, s.duration));
        }
    }
    PulseSequence::from_pairs(&pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn master_equation_structural_properties(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let model = common::random_model(&mut rng);
        let pulse = common::random_pulse(&mut rng, 6);
        let eq = MasterEquation::new(&model);

        // Linearity.
        let (x, y) = (random_hermitian(&mut rng), random_hermitian(&mut rng));
        let (alpha, beta) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let combined = eq.propagate(&pulse, &(x * alpha + y * beta)).unwrap();
        let px = eq.propagate(&pulse, &x).unwrap();
        let py = eq.propagate(&pulse, &y).unwrap();
        for k in 0..model.num_states() {
            let want = px.rhos()[k] * alpha + py.rhos()[k] * beta;
            prop_assert!((combined.rhos()[k] - want).max_abs() < 1e-9);
        }

        // Trace, Hermiticity and positivity along the history.
        let rho0 = random_pure_state(&mut rng);
        let history = eq.history(&pulse, &rho0).unwrap();
        prop_assert_eq!(history.len(), pulse.len() + 1);
        for state in &history {
            prop_assert!((state.total_trace() - 1.0).abs() < 1e-10);
            for (rho, p) in state.rhos().iter().zip(state.probabilities()) {
                prop_assert!(rho.is_hermitian(1e-10));
                prop_assert!((-1e-10..=1.0 + 1e-10).contains(&p));
            }
        }
        let last = history.last().unwrap();
        prop_assert!((last.time() - pulse.duration()).abs() < 1e-12);
        prop_assert!(last.total().hermitian_eigenvalues()[0] >= -1e-9);

        // Splitting a segment in half changes nothing.
        let index = rng.random_range(0..pulse.len());
        let split = eq.propagate(&split_segment(&pulse, index), &rho0).unwrap();
        for (a, b) in split.rhos().iter().zip(last.rhos()) {
            prop_assert!((*a - *b).max_abs() < 1e-10);
        }

        // Pauli images stay traceless and Hermitian.
        for e in evolve_operator_basis(&model, &pulse).unwrap() {
            prop_assert!(e.trace().norm() < 1e-10);
            prop_assert!(e.is_hermitian(1e-10));
        }
    }
}

#[test]
fn zero_generator_leaves_state_alone() {
    let model = NoiseModel::noiseless();
    let rho = QubitOperator::pure_along([0.6, 0.0, 0.8]);
    for t in [0.3, 5.0, 40.0] {
        let out = propagate_master(&model, &zero_pulse(t).unwrap(), &rho).unwrap();
        assert!((out.total() - rho).max_abs() < 1e-14);
    }
}

#[test]
fn pi_pulse_inverts_population() {
    let out = propagate_master(&NoiseModel::noiseless(), &pi_pulse(), &QubitOperator::ground()).unwrap();
    assert!((out.total() - QubitOperator::excited()).max_abs() < 1e-10);
}

#[test]
fn stationary_start_is_uniform() {
    let model = NoiseModel::multistate_fluctuator(2, 1.0, 0.5, 1.0).unwrap();
    let out = propagate_master(&model, &zero_pulse(0.8).unwrap(), &QubitOperator::ground()).unwrap();
    for p in out.probabilities() {
        assert!((p - 0.25).abs() < 1e-12);
    }
}

#[test]
fn operator_basis_examples() {
    let paulis = QubitOperator::paulis();
    let model = NoiseModel::multistate_fluctuator(2, 1.0, 0.5, 1.0).unwrap();
    let same = evolve_operator_basis(&model, &PulseSequence::empty()).unwrap();
    for (a, b) in same.iter().zip(&paulis) {
        assert!((*a - *b).max_abs() < 1e-14);
    }
    let flipped = evolve_operator_basis(&NoiseModel::noiseless(), &pi_pulse()).unwrap();
    let want = [paulis[0], -paulis[1], -paulis[2]];
    for (a, b) in flipped.iter().zip(&want) {
        assert!((*a - *b).max_abs() < 1e-10);
    }
}

#[test]
fn trajectory_examples() {
    let model = NoiseModel::multistate_fluctuator(3, 0.5, 0.5, 1.0)
        .unwrap()
        .scale_to_strength(0.3)
        .unwrap();
    let mut rng = common::rng(9);
    for i in 0..10 {
        let pulse = common::random_pulse(&mut rng, 5);
        let traj = model.sample_trajectory(pulse.duration(), i).unwrap();
        let mixed = QubitOperator::maximally_mixed();
        let out = propagate_trajectory(&pulse, &traj, &model, &mixed).unwrap();
        assert!((out - mixed).max_abs() < 1e-14);
        let pure = random_pure_state(&mut rng);
        let out = propagate_trajectory(&pulse, &traj, &model, &pure).unwrap();
        assert!(((out * out).trace().re - 1.0).abs() < 1e-10);
    }
    // A single level held for time t is a rotation about z by b·t.
    let bias = NoiseModel::static_bias(0.4).unwrap();
    let traj = NoiseTrajectory {
        switch_times: vec![],
        state_indices: vec![1],
        total_time: 2.5,
    };
    let rho = QubitOperator::pure_along([1.0, 0.0, 0.0]);
    let out = propagate_trajectory(&zero_pulse(2.5).unwrap(), &traj, &bias, &rho).unwrap();
    let phase = Complex64::from_polar(1.0, 0.4 * 2.5);
    // Level 1 has b = −0.4, and exp(−ibtσ_z/2) multiplies ρ_01 by exp(−ibt).
    assert!((out.0[(0, 1)] - phase * 0.5).norm() < 1e-14);
}

#[test]
fn noise_free_monte_carlo_equals_master() {
    let model = NoiseModel::noiseless();
    let mut rng = common::rng(2);
    let pulse = common::random_pulse(&mut rng, 6);
    let rho = QubitOperator::pure_along([0.0, 0.6, 0.8]);
    let mc = monte_carlo_average(&model, &pulse, &rho, 100, 1).unwrap();
    let me = propagate_master(&model, &pulse, &rho).unwrap().total();
    assert!(mc.mean.trace_distance(&me) < 1e-12);
}

#[test]
fn monte_carlo_is_seed_deterministic() {
    let model = NoiseModel::multistate_fluctuator(2, 1.0, 1.0, 1.0).unwrap();
    let pulse = PulseSequence::from_pairs(&[(0.5, 1.0), (-0.3, 2.0)]).unwrap();
    let a = monte_carlo_average(&model, &pulse, &QubitOperator::ground(), 500, 77).unwrap();
    let b = monte_carlo_average(&model, &pulse, &QubitOperator::ground(), 500, 77).unwrap();
    assert_eq!(a, b);
    let c = monte_carlo_average(&model, &pulse, &QubitOperator::ground(), 500, 78).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn free_decay_of_coherence_matches_monte_carlo() {
    let model = NoiseModel::multistate_fluctuator(2, 0.5, 0.5, 1.0)
        .unwrap()
        .scale_to_strength(0.5)
        .unwrap();
    let rho = QubitOperator::pure_along([1.0, 0.0, 0.0]);
    for (i, t) in [1.0, 3.0, 6.0].into_iter().enumerate() {
        let pulse = zero_pulse(t).unwrap();
        let me = propagate_master(&model, &pulse, &rho).unwrap().total();
        let mc = monte_carlo_average(&model, &pulse, &rho, 10_000, i as u64).unwrap();
        let diff = mc.mean.0[(0, 1)] - me.0[(0, 1)];
        let se = mc.std_error[(0, 1)];
        assert!(diff.re.abs() <= 3.0 * se.re, "t = {t}: {diff} vs {se}");
        assert!(diff.im.abs() <= 3.0 * se.im.max(1e-15), "t = {t}: {diff} vs {se}");
    }
}

#[test]
fn master_equation_agrees_with_trajectory_average() {
    let mut rng = common::rng(2024);
    for case in 0..10 {
        let model = common::random_model(&mut rng);
        let pulse = common::random_pulse(&mut rng, 6);
        let rho = random_pure_state(&mut rng);
        let me = propagate_master(&model, &pulse, &rho).unwrap().total();
        let mc = monte_carlo_average(&model, &pulse, &rho, 10_000, case).unwrap();
        let d = mc.mean.trace_distance(&me);
        let se = mc.trace_distance_std_error();
        assert!(d <= 3.0 * se, "case {case} (M = {}): {d} > 3 × {se}", model.num_states());
    }
}

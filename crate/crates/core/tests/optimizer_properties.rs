mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use onef::fidelity::fidelity_for;
use onef::optimizer::{ascend, fidelity_gradient, optimize, start_amplitudes, GateObjective, OptimizerConfig};
use onef::pulses::{PulseSequence, A_MAX};
use onef::{NoiseModel, QubitOperator};
use rand::Rng;

fn random_target(rng: &mut impl Rng) -> QubitOperator {
    match rng.random_range(0..3) {
        0 => QubitOperator::identity(),
        1 => QubitOperator::sigma_x(),
        _ => QubitOperator::precession(
            [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            rng.random_range(0.0..6.0),
        ),
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = common::rng(99);
    for case in 0..20 {
        let model = common::random_model(&mut rng);
        let target = random_target(&mut rng);
        let n = rng.random_range(1..=12);
        let total = rng.random_range(0.5..12.0);
        let amps: Vec<f64> = (0..n).map(|_| rng.random_range(-0.99..0.99)).collect();
        let objective = GateObjective::new(&model, &target, total, n, A_MAX).unwrap();
        let grad = objective.gradient(&amps).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..n)
            .map(|j| {
                let mut up = amps.clone();
                let mut down = amps.clone();
                up[j] += h;
                down[j] -= h;
                (objective.fidelity(&up).unwrap() - objective.fidelity(&down).unwrap()) / (2.0 * h)
            })
            .collect();
        let scale = fd.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-3);
        for j in 0..n {
            assert!(
                (grad[j] - fd[j]).abs() <= 1e-6 * scale,
                "case {case}, segment {j}: {} vs {}",
                grad[j],
                fd[j]
            );
        }
    }
}

#[test]
fn gradient_examples() {
    let pulse = PulseSequence::uniform(&[0.0; 4], 2.0, A_MAX).unwrap();
    let g = fidelity_gradient(&NoiseModel::noiseless(), &QubitOperator::identity(), &pulse).unwrap();
    assert!(g.iter().all(|v| v.abs() < 1e-14));

    let model = NoiseModel::multistate_fluctuator(2, 1.0, 0.5, 1.0).unwrap();
    let pulse = PulseSequence::uniform(&[0.3, -0.7, 0.1, 0.9], 4.0, A_MAX).unwrap();
    let u = QubitOperator::sigma_x();
    let a = fidelity_gradient(&model, &u, &pulse).unwrap();
    let b = fidelity_gradient(&model, &(u * Complex64::from_polar(1.0, 0.77)), &pulse).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-14);
    }
}

#[test]
fn finds_the_pi_pulse_without_noise() {
    let config = OptimizerConfig {
        n_segments: 4,
        n_starts: 2,
        ..OptimizerConfig::default()
    };
    let result = optimize(&NoiseModel::noiseless(), &QubitOperator::sigma_x(), PI, &config).unwrap();
    assert!(result.fidelity >= 1.0 - 1e-6, "{}", result.fidelity);
}

#[test]
fn ascent_contracts() {
    let model = NoiseModel::one_over_f(3, 3.0, 1.0, 0.125).unwrap();
    let total = 3.0 * PI;
    let config = OptimizerConfig {
        n_segments: 12,
        n_starts: 3,
        max_iterations: 60,
        seed: 5,
        ..OptimizerConfig::default()
    };
    let target = QubitOperator::identity();
    let objective = GateObjective::new(&model, &target, total, config.n_segments, A_MAX).unwrap();
    for i in 0..config.n_starts + 2 {
        let init = start_amplitudes(&config, total, i).unwrap();
        assert!(init.iter().all(|a| a.abs() <= A_MAX));
        let ascent = ascend(&objective, &init, &config).unwrap();
        assert!(ascent.fidelity_trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(ascent.amplitudes.iter().all(|a| a.abs() <= A_MAX));
        assert!(ascent.fidelity >= objective.fidelity(&init).unwrap());
        assert_eq!(ascent.fidelity_trace.len(), ascent.iterations + 1);
    }

    let a = optimize(&model, &target, total, &config).unwrap();
    let b = optimize(&model, &target, total, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.fidelity, fidelity_for(&model, &a.pulse, &target).unwrap());
    assert_eq!(a.fidelity, *a.fidelity_trace.last().unwrap());
    let best = a.start_fidelities.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(a.fidelity, best);
    assert_eq!(a.start_fidelities.len(), config.n_starts + 2);
    assert!((a.pulse.duration() - total).abs() < 1e-12);
}

#[test]
fn optimizer_rejects_bad_configs() {
    let config = OptimizerConfig {
        gradient_tolerance: 0.0,
        ..OptimizerConfig::default()
    };
    assert!(optimize(&NoiseModel::noiseless(), &QubitOperator::identity(), 1.0, &config).is_err());
    let config = OptimizerConfig::default();
    assert!(optimize(&NoiseModel::noiseless(), &QubitOperator::identity(), -1.0, &config).is_err());
    assert!(optimize(&NoiseModel::noiseless(), &(QubitOperator::identity() * 2.0), 1.0, &config).is_err());
}

#[test]
fn seeded_reference_start_is_never_beaten_by_its_reference() {
    use onef::optimizer::optimize_with_starts;
    use onef::pulses::short_corpse_not;
    let model = NoiseModel::one_over_f(3, 20.0, 1.0, 0.125).unwrap();
    let reference = short_corpse_not();
    let config = OptimizerConfig {
        n_segments: 7,
        n_starts: 0,
        max_iterations: 20,
        ..OptimizerConfig::default()
    };
    let seed = reference.resample_uniform(config.n_segments).unwrap();
    let x = QubitOperator::sigma_x();
    let result = optimize_with_starts(&model, &x, reference.duration(), &config, &[seed]).unwrap();
    assert_eq!(result.start_fidelities.len(), 3);
    assert!(result.fidelity >= fidelity_for(&model, &reference, &x).unwrap());
    assert!(optimize_with_starts(&model, &x, reference.duration(), &config, &[vec![0.0; 3]]).is_err());
}

//! State and average gate fidelities.

use std::fmt;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::dynamics::{MasterEquation, QubitOperator};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::pulses::PulseSequence;

const IMAG_TOLERANCE: f64 = 1e-10;

/// Gates the pulses are scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Quantum memory.
    Identity,
    /// `σ_x`.
    Not,
}

impl Target {
    pub fn unitary(self) -> QubitOperator {
        match self {
            Target::Identity => QubitOperator::identity(),
            Target::Not => QubitOperator::sigma_x(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Target::Identity => "identity",
            Target::Not => "not",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `tr(ρ_f† ρ)` for Hermitian `ρ_f`, `ρ`.
pub fn state_fidelity(rho_f: &QubitOperator, rho: &QubitOperator) -> Result<f64> {
    rho_f.require_hermitian("target state")?;
    rho.require_hermitian("evolved state")?;
    let v = rho_f.overlap(rho);
    if v.im.abs() > IMAG_TOLERANCE {
        return Err(Error::Numerical(format!("state overlap has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

/// `½ + (1/12) Σ_k tr(U σ_k U† E(σ_k))` over `k = x, y, z`.
pub fn gate_fidelity(target: &QubitOperator, evolved: &[QubitOperator; 3]) -> Result<f64> {
    target.require_unitary("target gate")?;
    let paulis = QubitOperator::paulis();
    let mut sum = 0.0;
    for (sigma, e) in paulis.iter().zip(evolved) {
        let v = (sigma.conjugated_by(target) * *e).trace();
        if v.im.abs() > IMAG_TOLERANCE {
            return Err(Error::Numerical(format!("gate overlap has imaginary part {}", v.im)));
        }
        sum += v.re;
    }
    Ok(0.5 + sum / 12.0)
}

/// Gate fidelity from the target's rotation `R` and a Pauli transfer matrix
/// `E` (column `k` the Bloch vector of `E(σ_k)`): `½ + (1/12) Σ R ∘ E`.
pub fn gate_fidelity_from_transfer(rotation: &Matrix3<f64>, transfer: &Matrix3<f64>) -> f64 {
    0.5 + rotation.component_mul(transfer).sum() / 12.0
}

/// Gate fidelity of `pulse` under `model` against `target`.
pub fn fidelity_for(model: &NoiseModel, pulse: &PulseSequence, target: &QubitOperator) -> Result<f64> {
    target.require_unitary("target gate")?;
    let transfer = MasterEquation::new(model).pauli_transfer(pulse)?;
    Ok(gate_fidelity_from_transfer(&target.rotation_matrix(), &transfer))
}

/// `Φ(I)`.
pub fn memory_fidelity(model: &NoiseModel, pulse: &PulseSequence) -> Result<f64> {
    fidelity_for(model, pulse, &QubitOperator::identity())
}

/// `Φ(σ_x)`.
pub fn not_fidelity(model: &NoiseModel, pulse: &PulseSequence) -> Result<f64> {
    fidelity_for(model, pulse, &QubitOperator::sigma_x())
}

/// A scored evolution with descriptors of what was scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub value: f64,
    pub target: String,
    pub pulse: String,
    pub noise: String,
}

impl FidelityReport {
    pub fn evaluate(model: &NoiseModel, pulse: &PulseSequence, target: Target) -> Result<Self> {
        Ok(Self {
            value: fidelity_for(model, pulse, &target.unitary())?,
            target: target.label().into(),
            pulse: pulse.describe(),
            noise: model.describe(),
        })
    }
}

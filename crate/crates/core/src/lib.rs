//! Simulation and pulse synthesis for a single qubit driven along `x` and
//! dephased along `z` by classical noise with a `1/f^alpha` spectrum.
//!
//! The noise is a continuous-time Markov process over `M` discrete amplitude
//! levels. Its average effect on the qubit is computed exactly from the coupled
//! master equations for the conditional density operators `rho_k(t)`, one per
//! noise level, and piecewise-constant controls are optimized by projected
//! gradient ascent on the average gate fidelity.
//!
//! Units: `hbar = 1` and the control bound `a_max = 1`, so times are in units
//! of `hbar / a_max` and rates in `a_max / hbar`.

pub mod dynamics;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod noise;
pub mod optimizer;
pub mod pulses;
pub mod seed;

pub use dynamics::{ConditionalState, QubitOperator};
pub use error::{Error, Result};
pub use noise::{NoiseModel, NoiseTrajectory, SpectralDecomposition};
pub use pulses::PulseSequence;

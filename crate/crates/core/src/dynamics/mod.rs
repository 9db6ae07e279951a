//! Qubit evolution under the noise process.
//!
//! The deterministic path evolves one conditional density operator per noise
//! level with the coupled master equations; the stochastic path samples noise
//! trajectories and averages the resulting unitary evolutions, which serves
//! as an independent check of the first.

mod master;
mod montecarlo;
mod operator;

pub use master::{
    bloch_generator, conditional_hamiltonian, control_direction, evolve_operator_basis,
    propagate_master, write_history_csv, ConditionalState, MasterEquation,
};
pub use montecarlo::{
    monte_carlo_average, propagate_trajectory, trajectory_unitary, MonteCarloEstimate,
    MIN_TRAJECTORIES,
};
pub use operator::QubitOperator;

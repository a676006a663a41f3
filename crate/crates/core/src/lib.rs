//! Discrete-time quantum walks on the integer line.
//!
//! The crate covers the general two-state coin with site- and time-dependent
//! phases, step evolution, the closed-form solution for homogeneous coins,
//! probabilistic observables, the phase transformations that leave those
//! observables invariant, and the continuum reading of those transformations
//! as a gauge freedom of a (1+1)-dimensional electromagnetic potential.

pub mod closed_form;
pub mod coin;
pub mod error;
pub mod evolution;
pub mod field;
pub mod gauge;
pub mod invariance;
pub mod lattice;
pub mod observables;

pub use closed_form::{
    closed_form_amplitudes, closed_form_amplitudes_with, initial_velocities, lambda_explicit,
    lambda_table, omega, LambdaMethod, LambdaTable,
};
pub use coin::{bloch_vector, coin_matrix, CoinAngles, CoinDescriptor, CoinField, PhaseField};
pub use error::{Error, Result};
pub use evolution::{evolve, evolve_state, step_homogeneous, step_inhomogeneous, Evolution, Walker};
pub use field::{LatticeTable, ScalarField, Window};
pub use gauge::{
    efield_invariance_residual, electric_field, finite_difference_transform, forward_differences,
    potentials_from_transform, Domain, PotentialField, ResidualField, SmoothPhasePair, UnitSystem,
};
pub use invariance::{
    exact_transform, quasi_invariant_phases, transform_coin_field, verify_exact_invariance,
    verify_phase_invariance, verify_quasi_invariance, InvarianceReport, StepDeviation,
};
pub use lattice::{localized_state, Amplitude, InitialState, SpinorField};
pub use observables::ObservableRecord;

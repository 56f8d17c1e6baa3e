//! Circuit execution: exact statevectors, shot sampling and noisy density matrices.

mod noise;
mod sampling;
mod state;

pub use noise::{
    apply_gate_density, default_assignment, depolarize, run_noisy, thermal_relax,
    CouplingCalibration, NoiseModel, QubitCalibration, DEFAULT_1Q_GATE_NS, DENSITY_QUBIT_CAP,
};
pub use sampling::{expectation_sampled, sample_expectation, ExpectationResult, Readout, TermEstimate};
pub use state::{expectation_exact, run_statevector, QuantumState};

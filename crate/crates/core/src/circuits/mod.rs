//! Parameterized circuits: gates, UCCSD and heuristic ansatzes, native
//! lowering and CNOT folding.

mod ansatz;
mod circuit;
mod gate;

pub use ansatz::{build_heuristic, build_uccsd, UccsdSpec};
pub use circuit::{compile_native, fold_cnots, phase_insensitive_distance, Circuit};
pub use gate::{apply_pauli_evolution, Gate, Param};

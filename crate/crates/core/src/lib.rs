//! Small-molecule quantum chemistry on simulated quantum hardware.
//!
//! The crate covers the whole pipeline from integrals to spectroscopic
//! observables:
//!
//! - [`wavelet`]: Daubechies filters, cascade tables and wavelet orbitals.
//! - [`hamiltonian`]: FCIDUMP ingestion, active spaces, spin-orbital Hamiltonians, MP2.
//! - [`qubit_map`]: Pauli algebra, Jordan–Wigner and parity encodings, Z2 tapering.
//! - [`circuits`]: UCCSD and hardware-efficient ansatzes, native compilation, CNOT folding.
//! - [`backend`]: statevector, shot-sampled and noisy density-matrix execution.
//! - [`mitigation`]: readout-error inversion and linear zero-noise extrapolation.
//! - [`solver`]: VQE driver and the full-CI diagonalization oracle.
//! - [`analysis`]: potential-energy scans, harmonic frequencies, nonparallelity errors.

pub mod analysis;
pub mod backend;
pub mod circuits;
pub mod error;
pub mod hamiltonian;
pub mod mitigation;
pub mod qubit_map;
pub mod report;
pub mod rng;
pub mod solver;
pub mod wavelet;

pub use error::{Error, Result};

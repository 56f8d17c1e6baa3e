//! Molecular integrals, active spaces, second-quantized Hamiltonians and
//! MP2 amplitudes.

mod active_space;
mod fermion;
mod integrals;
mod manifest;
mod mp2;

pub use active_space::{apply_active_space, ActiveSpace};
pub use fermion::{spin_orbital, to_fermion_hamiltonian, FermionHamiltonian, SpinOrdering};
pub use integrals::{parse_fcidump, MolecularIntegrals, INTEGRAL_FLOOR};
pub use manifest::{FixtureEntry, FixtureManifest, FixtureSet, MANIFEST_NAME};
pub use mp2::{
    antisymmetrized, enumerate_excitations, fock_matrix, mp2_amplitudes, reference_occupation,
    Excitation, Mp2Amplitudes,
};

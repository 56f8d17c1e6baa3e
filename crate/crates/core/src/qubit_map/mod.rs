//! Pauli algebra, fermion-to-qubit encodings and Z2 tapering.

mod mapping;
mod pauli;
mod tapering;

pub use mapping::{blocked_index, jordan_wigner, parity_map, Encoding};
pub use pauli::{
    compact_bits, pauli_multiply, qubitwise_groups, Phase, PauliString, PauliSum, MAX_QUBITS,
    PRUNE_TOL,
};
pub use tapering::{taper_z2, taper_z2_in_sector, TaperingInfo};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// How spin orbitals become qubits for a given problem.
#[derive(Debug, Clone, PartialEq)]
pub enum QubitMapping {
    JordanWigner { n_modes: usize },
    ParityTapered(TaperingInfo),
}

impl QubitMapping {
    pub fn n_modes(&self) -> usize {
        match self {
            QubitMapping::JordanWigner { n_modes } => *n_modes,
            QubitMapping::ParityTapered(info) => info.n_qubits_full,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            QubitMapping::JordanWigner { n_modes } => *n_modes,
            QubitMapping::ParityTapered(info) => info.n_qubits_tapered(),
        }
    }

    /// Image of `coeff · Π ops` on the mapped register.
    pub fn map_operator(&self, ops: &[(usize, bool)], coeff: Complex64) -> Result<PauliSum> {
        let n = self.n_modes();
        if let Some(&(m, _)) = ops.iter().find(|(m, _)| *m >= n) {
            return Err(Error::QubitCountMismatch(m + 1, n));
        }
        match self {
            QubitMapping::JordanWigner { .. } => {
                PauliSum::from_terms(n, Encoding::JordanWigner.map_product(ops, coeff, n))
            }
            QubitMapping::ParityTapered(info) => {
                let full = PauliSum::from_terms(n, Encoding::Parity.map_product(ops, coeff, n))?;
                info.taper_sum(&full)
            }
        }
    }

    /// Basis state of the occupation vector (interleaved spin orbitals).
    pub fn reference_state(&self, occ: &[bool]) -> Result<u64> {
        if occ.len() != self.n_modes() {
            return Err(Error::QubitCountMismatch(occ.len(), self.n_modes()));
        }
        match self {
            QubitMapping::JordanWigner { .. } => Ok(Encoding::JordanWigner.encode_occupation(occ)),
            QubitMapping::ParityTapered(info) => {
                info.taper_basis_state(Encoding::Parity.encode_occupation(occ))
            }
        }
    }
}

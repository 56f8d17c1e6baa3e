//! Two-qubit Z2 reduction of parity-encoded Hamiltonians.

use std::collections::HashMap;

use num_complex::Complex64;

use super::pauli::{compact_bits, PauliString, PauliSum};
use crate::error::{Error, Result};

/// Record of a Z2 reduction: generators, the removed qubits and their
/// fixed eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct TaperingInfo {
    pub n_qubits_full: usize,
    pub generators: Vec<PauliString>,
    pub removed: Vec<usize>,
    pub sector: Vec<i8>,
}

impl TaperingInfo {
    /// Standard reduction for `n_qubits` parity qubits in blocked order.
    ///
    /// Qubit `N/2 - 1` carries the α-number parity and qubit `N - 1` the
    /// total parity.
    pub fn for_sector(n_qubits: usize, n_electrons: usize, two_ms: i32) -> Result<Self> {
        let twice_alpha = n_electrons as i32 + two_ms;
        if twice_alpha < 0 || twice_alpha % 2 != 0 || twice_alpha > 2 * n_electrons as i32 {
            return Err(Error::InvalidIntegrals(format!(
                "MS2={two_ms} inconsistent with {n_electrons} electrons"
            )));
        }
        let n_alpha = (twice_alpha / 2) as usize;
        let parity = |k: usize| if k % 2 == 0 { 1 } else { -1 };
        Self::with_sector(n_qubits, [parity(n_alpha), parity(n_electrons)])
    }

    /// Reduction with explicitly chosen eigenvalues for (α parity, total parity).
    pub fn with_sector(n_qubits: usize, sector: [i8; 2]) -> Result<Self> {
        if n_qubits < 2 || n_qubits % 2 != 0 {
            return Err(Error::InvalidIntegrals(format!(
                "tapering needs an even qubit count, got {n_qubits}"
            )));
        }
        if sector.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidIntegrals("sector eigenvalues must be ±1".into()));
        }
        let removed = vec![n_qubits / 2 - 1, n_qubits - 1];
        let generators = removed
            .iter()
            .map(|&q| PauliString::single(n_qubits, q, 'Z'))
            .collect::<Result<_>>()?;
        Ok(TaperingInfo {
            n_qubits_full: n_qubits,
            generators,
            removed,
            sector: sector.to_vec(),
        })
    }

    pub fn n_qubits_tapered(&self) -> usize {
        self.n_qubits_full - self.removed.len()
    }

    /// Reduced string and the scalar picked up from removed Z factors.
    pub fn taper_string(&self, p: &PauliString) -> Result<(PauliString, f64)> {
        if p.n_qubits() != self.n_qubits_full {
            return Err(Error::QubitCountMismatch(p.n_qubits(), self.n_qubits_full));
        }
        let mut factor = 1.0;
        for (g, (&q, &s)) in self.generators.iter().zip(self.removed.iter().zip(&self.sector)) {
            if !p.commutes_with(g) {
                return Err(Error::SymmetryViolated(p.label()));
            }
            if (p.z_mask() >> q) & 1 == 1 {
                factor *= s as f64;
            }
        }
        Ok((p.remove_qubits(&self.removed), factor))
    }

    pub fn taper_sum(&self, h: &PauliSum) -> Result<PauliSum> {
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for (p, c) in h.terms() {
            let (r, f) = self.taper_string(p)?;
            *acc.entry(r).or_default() += c * f;
        }
        Ok(PauliSum::from_map(self.n_qubits_tapered(), acc))
    }

    /// Reduced basis state, or an error when `bits` lies outside the sector.
    pub fn taper_basis_state(&self, bits: u64) -> Result<u64> {
        for (&q, &s) in self.removed.iter().zip(&self.sector) {
            let eig = if (bits >> q) & 1 == 0 { 1 } else { -1 };
            if eig != s {
                return Err(Error::ExcitationBreaksSector(format!(
                    "basis state {bits:b} has eigenvalue {eig} on qubit {q}, sector requires {s}"
                )));
            }
        }
        Ok(compact_bits(bits, self.n_qubits_full, &self.removed))
    }
}

/// Remove the two parity qubits, fixing them to the sector of
/// `n_electrons` and `two_ms`.
pub fn taper_z2(h: &PauliSum, n_electrons: usize, two_ms: i32) -> Result<(PauliSum, TaperingInfo)> {
    let info = TaperingInfo::for_sector(h.n_qubits(), n_electrons, two_ms)?;
    Ok((info.taper_sum(h)?, info))
}

/// As [`taper_z2`] with an explicit sector, for excited-sector studies.
pub fn taper_z2_in_sector(h: &PauliSum, sector: [i8; 2]) -> Result<(PauliSum, TaperingInfo)> {
    let info = TaperingInfo::with_sector(h.n_qubits(), sector)?;
    Ok((info.taper_sum(h)?, info))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_factors_become_eigenvalues() {
        let h = PauliSum::from_real_terms(4, &[("ZZZZ", 2.0), ("XZII", 1.0)]).unwrap();
        let (t, info) = taper_z2(&h, 2, 0).unwrap();
        assert_eq!(info.removed, vec![1, 3]);
        assert_eq!(info.sector, vec![-1, 1]);
        let expect = PauliSum::from_real_terms(2, &[("ZZ", -2.0), ("XI", -1.0)]).unwrap();
        assert_eq!(t, expect);
    }

    #[test]
    fn anticommuting_term_is_rejected() {
        let h = PauliSum::from_real_terms(4, &[("IXII", 1.0)]).unwrap();
        let err = taper_z2(&h, 2, 0).unwrap_err();
        assert!(err.to_string().contains("symmetry violated by term"));
    }

    #[test]
    fn basis_state_outside_sector() {
        let info = TaperingInfo::for_sector(4, 2, 0).unwrap();
        assert_eq!(info.taper_basis_state(0b0011).unwrap(), 0b01);
        assert!(info.taper_basis_state(0b0000).is_err());
    }

    #[test]
    fn odd_width_rejected() {
        assert!(TaperingInfo::with_sector(3, [1, 1]).is_err());
        assert!(TaperingInfo::with_sector(4, [0, 1]).is_err());
    }
}

//! UCCSD and hardware-efficient ansatz construction.

use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::{Gate, Param};
use crate::error::{Error, Result};
use crate::hamiltonian::{enumerate_excitations, Excitation, Mp2Amplitudes};
use crate::qubit_map::QubitMapping;

/// Excitations in factor order plus the reference occupation.
#[derive(Debug, Clone, PartialEq)]
pub struct UccsdSpec {
    /// `(excitation, MP2 amplitude)`, doubles by descending |t| then singles.
    pub excitations: Vec<(Excitation, f64)>,
    /// Reference occupation over interleaved spin orbitals.
    pub reference: Vec<bool>,
}

impl UccsdSpec {
    /// MP2-ordered spec; singles are dropped when `include_singles` is false.
    pub fn from_mp2(mp2: &Mp2Amplitudes, reference: Vec<bool>, include_singles: bool) -> Self {
        let excitations = mp2
            .ordered()
            .into_iter()
            .filter(|(e, _)| include_singles || e.is_double())
            .collect();
        UccsdSpec { excitations, reference }
    }

    /// Unordered spec with zero amplitudes (doubles first).
    pub fn all_excitations(reference: Vec<bool>, include_singles: bool) -> Self {
        let (singles, doubles) = enumerate_excitations(&reference);
        let mut excitations: Vec<(Excitation, f64)> = doubles.into_iter().map(|e| (e, 0.0)).collect();
        if include_singles {
            excitations.extend(singles.into_iter().map(|e| (e, 0.0)));
        }
        UccsdSpec { excitations, reference }
    }

    pub fn n_params(&self) -> usize {
        self.excitations.len()
    }

    /// MP2-informed starting point.
    pub fn initial_parameters(&self) -> Vec<f64> {
        self.excitations.iter().map(|(_, t)| *t).collect()
    }

    fn validate(&self) -> Result<()> {
        let n = self.reference.len();
        for (e, _) in &self.excitations {
            let (from, to): (Vec<usize>, Vec<usize>) = match *e {
                Excitation::Single { from, to } => (vec![from], vec![to]),
                Excitation::Double { from, to } => (from.to_vec(), to.to_vec()),
            };
            let ok = from.iter().chain(&to).all(|&m| m < n)
                && from.iter().all(|&m| self.reference[m])
                && to.iter().all(|&m| !self.reference[m]);
            let spin = |v: &[usize]| v.iter().map(|m| m % 2).sum::<usize>();
            if !ok || spin(&from) != spin(&to) {
                return Err(Error::InvalidCircuit(format!(
                    "excitation {e} is not a spin-conserving excitation out of the reference"
                )));
            }
        }
        Ok(())
    }
}

/// Reference preparation followed by one first-order Trotter factor
/// `exp(θ_k (T_k − T_k†))` per excitation.
pub fn build_uccsd(spec: &UccsdSpec, mapping: &QubitMapping) -> Result<Circuit> {
    if spec.reference.len() != mapping.n_modes() {
        return Err(Error::QubitCountMismatch(spec.reference.len(), mapping.n_modes()));
    }
    spec.validate()?;
    let n = mapping.n_qubits();
    let reference = mapping.reference_state(&spec.reference)?;
    let mut gates: Vec<Gate> = (0..n).filter(|q| (reference >> q) & 1 == 1).map(Gate::X).collect();

    for (k, (ex, _)) in spec.excitations.iter().enumerate() {
        let t = mapping
            .map_operator(&ex.ladder_ops(), Complex64::new(1.0, 0.0))
            .map_err(|e| match e {
                Error::SymmetryViolated(term) => {
                    Error::ExcitationBreaksSector(format!("{ex}: term {term}"))
                }
                other => other,
            })?;
        let generator = t.add(&t.adjoint().scale(Complex64::new(-1.0, 0.0)))?;
        // generator = Σ i a_j P_j; exp(θ i a_j P_j) = exp(-i (−2 a_j θ)/2 P_j).
        for (p, c) in generator.terms() {
            if c.re.abs() > 1e-10 {
                return Err(Error::InvalidCircuit(format!(
                    "generator of {ex} is not anti-Hermitian at {p}"
                )));
            }
            if p.is_identity() {
                continue;
            }
            gates.push(Gate::PauliEvolution(*p, Param::Bound { index: k, scale: -2.0 * c.im }));
        }
    }
    Circuit::new(n, gates, spec.n_params())
}

/// `layers` × [RY column, linear CNOT chain] followed by a final RY column.
pub fn build_heuristic(n_qubits: usize, layers: usize) -> Result<Circuit> {
    if layers < 1 {
        return Err(Error::InvalidCircuit("heuristic ansatz needs at least one layer".into()));
    }
    if n_qubits < 1 {
        return Err(Error::InvalidCircuit("heuristic ansatz needs at least one qubit".into()));
    }
    let mut gates = Vec::new();
    let mut k = 0;
    let mut column = |gates: &mut Vec<Gate>| {
        for q in 0..n_qubits {
            gates.push(Gate::Ry(q, Param::bound(k)));
            k += 1;
        }
    };
    for _ in 0..layers {
        column(&mut gates);
        for q in 0..n_qubits.saturating_sub(1) {
            gates.push(Gate::Cnot(q, q + 1));
        }
    }
    column(&mut gates);
    let n_params = (layers + 1) * n_qubits;
    Circuit::new(n_qubits, gates, n_params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::reference_occupation;
    use crate::qubit_map::TaperingInfo;

    #[test]
    fn heuristic_presets() {
        let c2 = build_heuristic(2, 1).unwrap();
        assert_eq!(c2.len(), 5);
        assert_eq!(c2.n_params(), 4);
        let c4 = build_heuristic(4, 1).unwrap();
        assert_eq!(c4.len(), 11);
        assert_eq!(c4.cnot_count(), 3);
        assert!(build_heuristic(4, 0).is_err());
    }

    #[test]
    fn h2_tapered_has_one_double() {
        let occ = reference_occupation(2, 1, 1);
        let spec = UccsdSpec::all_excitations(occ, false);
        let mapping = QubitMapping::ParityTapered(TaperingInfo::for_sector(4, 2, 0).unwrap());
        let c = build_uccsd(&spec, &mapping).unwrap();
        assert_eq!(c.n_params(), 1);
        assert_eq!(c.n_qubits(), 2);
    }

    #[test]
    fn singles_and_doubles_counts() {
        let occ = reference_occupation(4, 2, 2);
        let spec = UccsdSpec::all_excitations(occ, true);
        // 2·(2·2) singles, 1 + 1 + 16 doubles.
        assert_eq!(spec.n_params(), 8 + 18);
        let c = build_uccsd(&spec, &QubitMapping::JordanWigner { n_modes: 8 }).unwrap();
        assert_eq!(c.n_params(), 26);
    }

    #[test]
    fn invalid_excitation_rejected() {
        let spec = UccsdSpec {
            excitations: vec![(Excitation::Single { from: 0, to: 3 }, 0.0)],
            reference: reference_occupation(2, 1, 1),
        };
        assert!(build_uccsd(&spec, &QubitMapping::JordanWigner { n_modes: 4 }).is_err());
    }

    #[test]
    fn sector_mismatch_reported() {
        // Reference with three electrons against a two-electron sector.
        let spec = UccsdSpec::all_excitations(reference_occupation(2, 2, 1), false);
        let mapping = QubitMapping::ParityTapered(TaperingInfo::for_sector(4, 2, 0).unwrap());
        assert!(matches!(
            build_uccsd(&spec, &mapping),
            Err(Error::ExcitationBreaksSector(_))
        ));
    }
}

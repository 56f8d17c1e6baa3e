//! Pure and mixed register states, exact simulation and expectations.

use num_complex::Complex64;

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;

/// Register state: amplitudes, or a row-major density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Statevector { n_qubits: usize, amplitudes: Vec<Complex64> },
    Density { n_qubits: usize, rho: Vec<Complex64> },
}

impl QuantumState {
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        QuantumState::Statevector { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Statevector { n_qubits, .. } | QuantumState::Density { n_qubits, .. } => {
                *n_qubits
            }
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Density matrix of this state.
    pub fn to_density(&self) -> QuantumState {
        match self {
            QuantumState::Statevector { n_qubits, amplitudes } => {
                let d = amplitudes.len();
                let mut rho = vec![Complex64::default(); d * d];
                for i in 0..d {
                    for j in 0..d {
                        rho[i * d + j] = amplitudes[i] * amplitudes[j].conj();
                    }
                }
                QuantumState::Density { n_qubits: *n_qubits, rho }
            }
            d => d.clone(),
        }
    }

    /// Computational-basis outcome probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            QuantumState::Statevector { amplitudes, .. } => {
                amplitudes.iter().map(|a| a.norm_sqr()).collect()
            }
            QuantumState::Density { rho, .. } => {
                let d = self.dim();
                (0..d).map(|i| rho[i * d + i].re.max(0.0)).collect()
            }
        }
    }

    pub fn trace(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    /// Check norm/trace, Hermiticity and positivity to `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        match self {
            QuantumState::Statevector { amplitudes, .. } => {
                let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > tol {
                    return bad(format!("statevector norm {norm}"));
                }
            }
            QuantumState::Density { rho, .. } => {
                let d = self.dim();
                let m = nalgebra::DMatrix::from_row_slice(d, d, rho);
                let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if herm > tol {
                    return bad(format!("density matrix not Hermitian by {herm:e}"));
                }
                let tr: Complex64 = (0..d).map(|i| rho[i * d + i]).sum();
                if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
                    return bad(format!("density trace {tr}"));
                }
                let min = nalgebra::SymmetricEigen::new(m).eigenvalues.min();
                if min < -tol {
                    return bad(format!("density eigenvalue {min:e} below floor"));
                }
            }
        }
        Ok(())
    }
}

/// Exact pure-state simulation from |0…0⟩.
pub fn run_statevector(c: &Circuit, params: &[f64]) -> Result<QuantumState> {
    c.check_params(params)?;
    let mut state = QuantumState::zero_state(c.n_qubits());
    if let QuantumState::Statevector { amplitudes, .. } = &mut state {
        for g in c.gates() {
            g.apply(amplitudes, params);
        }
    }
    Ok(state)
}

/// `<ψ|H|ψ>` or `Tr(ρH)` for a Hermitian observable.
pub fn expectation_exact(state: &QuantumState, obs: &PauliSum) -> Result<f64> {
    if state.n_qubits() != obs.n_qubits() {
        return Err(Error::QubitCountMismatch(state.n_qubits(), obs.n_qubits()));
    }
    let terms = obs.real_terms(1e-10)?;
    let mut total = Complex64::default();
    match state {
        QuantumState::Statevector { amplitudes, .. } => {
            for (p, c) in &terms {
                let mut acc = Complex64::default();
                for (b, a) in amplitudes.iter().enumerate() {
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    let (t, ph) = p.apply_to_basis(b as u64);
                    acc += amplitudes[t as usize].conj() * ph * a;
                }
                total += acc * c;
            }
        }
        QuantumState::Density { rho, .. } => {
            let d = state.dim();
            // Tr(Pρ) = Σ_b <b|P ρ|b> = Σ_b ph(b') ρ[b'][b] with P|b'> = ph|b>.
            for (p, c) in &terms {
                let mut acc = Complex64::default();
                for b in 0..d {
                    let (t, ph) = p.apply_to_basis(b as u64);
                    acc += ph * rho[b * d + t as usize];
                }
                total += acc * c;
            }
        }
    }
    if total.im.abs() > 1e-10 {
        return Err(Error::NonHermitian {
            term: "expectation".into(),
            coeff: format!("{total}"),
        });
    }
    Ok(total.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{Gate, Param};

    #[test]
    fn empty_circuit_is_zero_state() {
        let c = Circuit::new(3, vec![], 0).unwrap();
        let s = run_statevector(&c, &[]).unwrap();
        assert_eq!(s, QuantumState::zero_state(3));
    }

    #[test]
    fn z_on_zero() {
        let s = QuantumState::zero_state(1);
        let z = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        assert_eq!(expectation_exact(&s, &z).unwrap(), 1.0);
        let id = PauliSum::identity(1, 1.0);
        assert_eq!(expectation_exact(&s, &id).unwrap(), 1.0);
    }

    #[test]
    fn density_and_pure_expectations_agree() {
        let c = Circuit::new(
            2,
            vec![Gate::Ry(0, Param::Fixed(0.3)), Gate::Cnot(0, 1), Gate::Rx(1, Param::Fixed(1.1))],
            0,
        )
        .unwrap();
        let s = run_statevector(&c, &[]).unwrap();
        let h = PauliSum::from_real_terms(2, &[("XY", 0.4), ("ZZ", -0.7), ("YI", 0.2), ("IX", 1.3)])
            .unwrap();
        let a = expectation_exact(&s, &h).unwrap();
        let b = expectation_exact(&s.to_density(), &h).unwrap();
        assert!((a - b).abs() < 1e-14);
        s.to_density().check_physical(1e-10).unwrap();
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let s = QuantumState::zero_state(1);
        let h = PauliSum::from_terms(
            1,
            vec![(crate::qubit_map::PauliString::from_label("Z").unwrap(), Complex64::new(0.0, 1.0))],
        )
        .unwrap();
        assert!(expectation_exact(&s, &h).is_err());
    }

    #[test]
    fn parameter_count_checked() {
        let c = Circuit::new(1, vec![Gate::Ry(0, Param::bound(0))], 1).unwrap();
        assert!(matches!(run_statevector(&c, &[]), Err(Error::ParameterCount { .. })));
    }
}

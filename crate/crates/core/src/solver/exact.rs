//! Lowest eigenvalue of a qubit operator.

use nalgebra::SymmetricEigen;

use super::eigen::lanczos_lowest;
use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;

pub const DENSE_QUBIT_LIMIT: usize = 10;
pub const QUBIT_LIMIT: usize = 14;

/// Minimum eigenvalue over the whole register (all particle sectors).
pub fn qubit_ground_energy(h: &PauliSum) -> Result<f64> {
    let n = h.n_qubits();
    if n > QUBIT_LIMIT {
        return Err(Error::Capacity(format!(
            "{n} qubits exceed the exact-diagonalization cap of {QUBIT_LIMIT}"
        )));
    }
    h.real_terms(1e-10)?;
    if n <= DENSE_QUBIT_LIMIT {
        let eig = SymmetricEigen::new(h.to_dense());
        return Ok(eig.eigenvalues.min());
    }
    lanczos_lowest(|v| h.apply(v), 1 << n, 1e-11)
}

/// Full ascending spectrum for small registers.
pub fn qubit_spectrum(h: &PauliSum) -> Result<Vec<f64>> {
    let n = h.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::Capacity(format!(
            "dense spectrum limited to {DENSE_QUBIT_LIMIT} qubits, got {n}"
        )));
    }
    let mut v: Vec<f64> = SymmetricEigen::new(h.to_dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_z() {
        let h = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        assert!((qubit_ground_energy(&h).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_qubit_brute_force() {
        let h = PauliSum::from_real_terms(2, &[("XX", 1.0), ("ZI", 1.0), ("IZ", 1.0)]).unwrap();
        // Even-parity block [[2, 1], [1, -2]] gives -sqrt(5); odd block gives ±1.
        assert!((qubit_ground_energy(&h).unwrap() + 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lanczos_path_on_decoupled_blocks() {
        // Five copies of the two-qubit block above plus a lone Z.
        let n = 11;
        let mut terms = vec![];
        for b in 0..5 {
            for pat in [["X", "X"], ["Z", "I"], ["I", "Z"]] {
                let mut l = vec!["I"; n];
                l[2 * b] = pat[0];
                l[2 * b + 1] = pat[1];
                terms.push((l.concat(), 1.0));
            }
        }
        let mut z = vec!["I"; n];
        z[10] = "Z";
        terms.push((z.concat(), 0.4));
        let refs: Vec<(&str, f64)> = terms.iter().map(|(l, c)| (l.as_str(), *c)).collect();
        let h = PauliSum::from_real_terms(n, &refs).unwrap();
        let e = qubit_ground_energy(&h).unwrap();
        assert!((e - (-5.0 * 5f64.sqrt() - 0.4)).abs() < 1e-9, "{e}");
    }
}

//! Per-qubit confusion matrices and their inversion.

use std::collections::BTreeMap;

use crate::backend::{sample_expectation, NoiseModel, QuantumState, Readout};
use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;

const SINGULAR_TOL: f64 = 1e-12;

/// `matrices[q][observed][true]`; columns sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutCalibration {
    pub matrices: Vec<[[f64; 2]; 2]>,
}

impl ReadoutCalibration {
    /// Symmetric flips with probability `p[q]`.
    pub fn symmetric(p: &[f64]) -> Result<ReadoutCalibration> {
        let matrices = p.iter().map(|&p| [[1.0 - p, p], [p, 1.0 - p]]).collect();
        let cal = ReadoutCalibration { matrices };
        cal.validate()?;
        Ok(cal)
    }

    /// Analytic calibration from the device readout errors under `assignment`.
    pub fn from_noise(noise: &NoiseModel, assignment: &[usize]) -> Result<ReadoutCalibration> {
        noise.check_assignment(assignment.len(), assignment)?;
        ReadoutCalibration::symmetric(&noise.readout_errors(assignment))
    }

    /// Estimate the confusion matrices by preparing |0…0⟩ and |1…1⟩ and
    /// reading them through `flip` with `shots` samples each.
    pub fn from_calibration_runs(flip: &[f64], shots: usize, seed: u64) -> Result<ReadoutCalibration> {
        let n = flip.len();
        let readout = Readout::with_flips(flip.to_vec());
        let mut matrices = Vec::with_capacity(n);
        let mut zmean = [vec![0.0; n], vec![0.0; n]];
        for (k, fill) in [0u64, (1u64 << n) - 1].into_iter().enumerate() {
            let mut amplitudes = vec![num_complex::Complex64::default(); 1 << n];
            amplitudes[fill as usize] = num_complex::Complex64::new(1.0, 0.0);
            let state = QuantumState::Statevector { n_qubits: n, amplitudes };
            let terms: Vec<(String, f64)> = (0..n)
                .map(|q| ((0..n).map(|i| if i == q { 'Z' } else { 'I' }).collect(), 1.0))
                .collect();
            let refs: Vec<(&str, f64)> = terms.iter().map(|(l, c)| (l.as_str(), *c)).collect();
            let obs = PauliSum::from_real_terms(n, &refs)?;
            let est = sample_expectation(&state, &obs, shots, crate::rng::derive_seed(seed, &[k as u64]), &readout)?;
            for t in &est.terms {
                let q = t.pauli.support().trailing_zeros() as usize;
                zmean[k][q] = t.mean;
            }
        }
        for q in 0..n {
            // <Z> = 1 - 2 p(read 1 | true 0), and -(1 - 2 p(read 0 | true 1)).
            let p01 = (1.0 - zmean[0][q]) / 2.0;
            let p10 = (1.0 + zmean[1][q]) / 2.0;
            matrices.push([[1.0 - p01, p10], [p01, 1.0 - p10]]);
        }
        let cal = ReadoutCalibration { matrices };
        cal.validate()?;
        Ok(cal)
    }

    pub fn n_qubits(&self) -> usize {
        self.matrices.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (q, m) in self.matrices.iter().enumerate() {
            for col in 0..2 {
                let (a, b) = (m[0][col], m[1][col]);
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || (a + b - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidNoiseModel(format!(
                        "confusion matrix of qubit {q} is not column-stochastic"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self, q: usize) -> Result<[[f64; 2]; 2]> {
        let m = self.matrices[q];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < SINGULAR_TOL {
            return Err(Error::NonInvertibleCalibration(q));
        }
        Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
    }

    /// Tensor-product confusion matrix, row-major, `2^n × 2^n`.
    pub fn full_matrix(&self) -> Vec<f64> {
        let n = self.n_qubits();
        let d = 1usize << n;
        let mut out = vec![0.0; d * d];
        for obs in 0..d {
            for tru in 0..d {
                out[obs * d + tru] = (0..n)
                    .map(|q| self.matrices[q][(obs >> q) & 1][(tru >> q) & 1])
                    .product();
            }
        }
        out
    }

    /// Forward model on a probability vector.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut v = p.to_vec();
        for (q, m) in self.matrices.iter().enumerate() {
            apply_1q(&mut v, q, m);
        }
        v
    }

    /// Per-qubit eigenvalue weights `M_q^{-T} (1, -1)`: summing their
    /// products over raw shots equals the expectation under the
    /// quasi-distribution `M^{-1} p_observed`.
    pub fn z_values(&self) -> Result<Vec<[f64; 2]>> {
        (0..self.n_qubits())
            .map(|q| {
                let inv = self.inverse(q)?;
                Ok([inv[0][0] - inv[1][0], inv[0][1] - inv[1][1]])
            })
            .collect()
    }
}

fn apply_1q(v: &mut [f64], q: usize, m: &[[f64; 2]; 2]) {
    let bit = 1usize << q;
    for b in 0..v.len() {
        if b & bit == 0 {
            let (x0, x1) = (v[b], v[b | bit]);
            v[b] = m[0][0] * x0 + m[0][1] * x1;
            v[b | bit] = m[1][0] * x0 + m[1][1] * x1;
        }
    }
}

/// Quasi-probabilities `M^{-1} (counts / total)` keyed by basis index.
pub fn mitigate_readout(
    counts: &BTreeMap<u64, u64>,
    cal: &ReadoutCalibration,
) -> Result<BTreeMap<u64, f64>> {
    let n = cal.n_qubits();
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::ZeroShots);
    }
    let mut v = vec![0.0; 1 << n];
    for (&b, &c) in counts {
        if b >> n != 0 {
            return Err(Error::QubitCountMismatch(64 - b.leading_zeros() as usize, n));
        }
        v[b as usize] = c as f64 / total as f64;
    }
    for q in 0..n {
        let inv = cal.inverse(q)?;
        apply_1q(&mut v, q, &inv);
    }
    Ok(v.into_iter().enumerate().map(|(b, x)| (b as u64, x)).collect())
}

/// `Σ_b q(b) (-1)^{|b ∧ mask|}`.
pub fn z_expectation(dist: &BTreeMap<u64, f64>, mask: u64) -> f64 {
    dist.iter()
        .map(|(&b, &x)| if (b & mask).count_ones() % 2 == 0 { x } else { -x })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_confusion_normalizes() {
        let cal = ReadoutCalibration::symmetric(&[0.0, 0.0]).unwrap();
        let counts = BTreeMap::from([(0b00, 30), (0b11, 70)]);
        let q = mitigate_readout(&counts, &cal).unwrap();
        assert_eq!(q[&0b00], 0.3);
        assert_eq!(q[&0b11], 0.7);
        assert_eq!(q[&0b01], 0.0);
    }

    #[test]
    fn single_qubit_closed_form() {
        // True <Z> = z, observed (1-2p) z.
        let (p, z) = (0.07, 0.4);
        let cal = ReadoutCalibration::symmetric(&[p]).unwrap();
        let observed = cal.apply(&[(1.0 + z) / 2.0, (1.0 - z) / 2.0]);
        let obs_z = observed[0] - observed[1];
        assert!((obs_z - (1.0 - 2.0 * p) * z).abs() < 1e-15);
        let scale = 1_000_000.0;
        let counts = BTreeMap::from([(0, (observed[0] * scale).round() as u64), (1, (observed[1] * scale).round() as u64)]);
        let q = mitigate_readout(&counts, &cal).unwrap();
        assert!((z_expectation(&q, 1) - z).abs() < 1e-6);
    }

    #[test]
    fn half_flip_is_singular() {
        let cal = ReadoutCalibration::symmetric(&[0.5]).unwrap();
        let counts = BTreeMap::from([(0, 1)]);
        assert!(matches!(mitigate_readout(&counts, &cal), Err(Error::NonInvertibleCalibration(0))));
    }

    #[test]
    fn forward_then_inverse_is_identity() {
        let cal = ReadoutCalibration {
            matrices: vec![[[0.97, 0.05], [0.03, 0.95]], [[0.9, 0.02], [0.1, 0.98]]],
        };
        let p = [0.1, 0.2, 0.3, 0.4];
        let full = cal.full_matrix();
        let fwd: Vec<f64> = (0..4).map(|i| (0..4).map(|j| full[i * 4 + j] * p[j]).sum()).collect();
        assert_eq!(fwd.len(), cal.apply(&p).len());
        for (a, b) in fwd.iter().zip(cal.apply(&p)) {
            assert!((a - b).abs() < 1e-15);
        }
        let mut inv = fwd.clone();
        for q in 0..2 {
            apply_1q(&mut inv, q, &cal.inverse(q).unwrap());
        }
        for (a, b) in inv.iter().zip(&p) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn z_weights_match_quasi_distribution() {
        let cal = ReadoutCalibration {
            matrices: vec![[[0.97, 0.05], [0.03, 0.95]], [[0.9, 0.02], [0.1, 0.98]]],
        };
        let zv = cal.z_values().unwrap();
        let counts = BTreeMap::from([(0b00, 40u64), (0b01, 25), (0b10, 20), (0b11, 15)]);
        let q = mitigate_readout(&counts, &cal).unwrap();
        let direct: f64 = counts
            .iter()
            .map(|(&b, &c)| c as f64 / 100.0 * zv[0][(b & 1) as usize] * zv[1][(b >> 1) as usize])
            .sum();
        assert!((direct - z_expectation(&q, 0b11)).abs() < 1e-12);
    }

    #[test]
    fn calibration_runs_recover_flips() {
        let cal = ReadoutCalibration::from_calibration_runs(&[0.02, 0.1], 200_000, 3).unwrap();
        assert!((cal.matrices[0][1][0] - 0.02).abs() < 0.002);
        assert!((cal.matrices[1][0][1] - 0.1).abs() < 0.005);
    }
}

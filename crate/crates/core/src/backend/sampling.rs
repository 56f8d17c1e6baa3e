//! Shot-based expectation estimation over qubit-wise commuting groups.

use std::f64::consts::FRAC_PI_2;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::noise::apply_gate_density;
use super::state::{run_statevector, QuantumState};
use crate::circuits::{Circuit, Gate, Param};
use crate::error::{Error, Result};
use crate::qubit_map::{qubitwise_groups, PauliString, PauliSum};
use crate::rng::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TermEstimate {
    pub pauli: PauliString,
    pub coeff: f64,
    /// Estimated `<P>`.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationResult {
    pub value: f64,
    pub stderr: f64,
    /// Shots per measurement group; `None` for exact evaluation.
    pub shots: Option<usize>,
    pub terms: Vec<TermEstimate>,
}

/// How measured bits turn into eigenvalue estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    /// Symmetric bit-flip probability per qubit.
    pub flip: Vec<f64>,
    /// Value credited to a read-out 0 / 1 on each qubit; `[1, -1]` is raw.
    pub z_values: Vec<[f64; 2]>,
}

impl Readout {
    pub fn ideal(n: usize) -> Readout {
        Readout { flip: vec![0.0; n], z_values: vec![[1.0, -1.0]; n] }
    }

    pub fn with_flips(flip: Vec<f64>) -> Readout {
        let n = flip.len();
        Readout { flip, z_values: vec![[1.0, -1.0]; n] }
    }
}

/// Rotation taking the measured Pauli on each qubit to Z.
fn basis_change(group: &[&PauliString], n: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 0..n {
        match group.iter().map(|p| p.op_at(q)).find(|&c| c != 'I') {
            Some('X') => gates.push(Gate::H(q)),
            Some('Y') => gates.push(Gate::Rx(q, Param::Fixed(FRAC_PI_2))),
            _ => {}
        }
    }
    gates
}

fn rotated_probabilities(state: &QuantumState, gates: &[Gate]) -> Vec<f64> {
    if gates.is_empty() {
        return state.probabilities();
    }
    let mut s = state.clone();
    match &mut s {
        QuantumState::Statevector { amplitudes, .. } => {
            for g in gates {
                g.apply(amplitudes, &[]);
            }
        }
        QuantumState::Density { n_qubits, rho } => {
            for g in gates {
                apply_gate_density(rho, *n_qubits, g, &[]);
            }
        }
    }
    s.probabilities()
}

/// Sample `shots` computational-basis outcomes per measurement group.
///
/// Basis rotations are ideal; readout flips are applied to every sampled
/// bit. Each group draws from its own stream of `seed`.
pub fn sample_expectation(
    state: &QuantumState,
    obs: &PauliSum,
    shots: usize,
    seed: u64,
    readout: &Readout,
) -> Result<ExpectationResult> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let n = state.n_qubits();
    if obs.n_qubits() != n {
        return Err(Error::QubitCountMismatch(n, obs.n_qubits()));
    }
    if readout.flip.len() != n || readout.z_values.len() != n {
        return Err(Error::QubitCountMismatch(n, readout.flip.len()));
    }
    let terms = obs.real_terms(1e-10)?;
    let mut means = vec![0.0; terms.len()];
    for (k, (p, _)) in terms.iter().enumerate() {
        if p.is_identity() {
            means[k] = 1.0;
        }
    }
    let mut variance = 0.0;
    for (gi, group) in qubitwise_groups(&terms).iter().enumerate() {
        let strings: Vec<&PauliString> = group.iter().map(|&k| &terms[k].0).collect();
        let probs = rotated_probabilities(state, &basis_change(&strings, n));
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| Error::InvalidProblem(format!("outcome distribution: {e}")))?;
        let mut rng = stream_rng(seed, &[gi as u64]);
        let masks: Vec<u64> = strings.iter().map(|p| p.support()).collect();
        let mut sums = vec![0.0; group.len()];
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..shots {
            let mut b = dist.sample(&mut rng) as u64;
            for (q, &f) in readout.flip.iter().enumerate() {
                if f > 0.0 && rng.gen_bool(f) {
                    b ^= 1 << q;
                }
            }
            let mut shot = 0.0;
            for (j, &mask) in masks.iter().enumerate() {
                let mut v = 1.0;
                let mut m = mask;
                while m != 0 {
                    let q = m.trailing_zeros() as usize;
                    v *= readout.z_values[q][((b >> q) & 1) as usize];
                    m &= m - 1;
                }
                sums[j] += v;
                shot += terms[group[j]].1 * v;
            }
            s1 += shot;
            s2 += shot * shot;
        }
        for (j, &k) in group.iter().enumerate() {
            means[k] = sums[j] / shots as f64;
        }
        if shots > 1 {
            let mean = s1 / shots as f64;
            let var = ((s2 - shots as f64 * mean * mean) / (shots - 1) as f64).max(0.0);
            variance += var / shots as f64;
        }
    }
    let value = terms.iter().zip(&means).map(|((_, c), m)| c * m).sum();
    Ok(ExpectationResult {
        value,
        stderr: variance.sqrt(),
        shots: Some(shots),
        terms: terms
            .into_iter()
            .zip(means)
            .map(|((pauli, coeff), mean)| TermEstimate { pauli, coeff, mean })
            .collect(),
    })
}

/// Noiseless shot estimate of `<ψ(params)|obs|ψ(params)>`.
pub fn expectation_sampled(
    c: &Circuit,
    params: &[f64],
    obs: &PauliSum,
    shots: usize,
    seed: u64,
) -> Result<ExpectationResult> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let state = run_statevector(c, params)?;
    sample_expectation(&state, obs, shots, seed, &Readout::ideal(c.n_qubits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::state::expectation_exact;

    #[test]
    fn identity_is_exact() {
        let c = Circuit::new(2, vec![Gate::H(0)], 0).unwrap();
        let r = expectation_sampled(&c, &[], &PauliSum::identity(2, 1.0), 100, 1).unwrap();
        assert_eq!((r.value, r.stderr), (1.0, 0.0));
    }

    #[test]
    fn eigenstate_has_zero_variance() {
        let c = Circuit::new(1, vec![Gate::H(0)], 0).unwrap();
        let x = PauliSum::from_real_terms(1, &[("X", 1.0)]).unwrap();
        let r = expectation_sampled(&c, &[], &x, 10_000, 3).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.stderr, 0.0);
        assert_eq!(r.shots, Some(10_000));
    }

    #[test]
    fn y_basis_rotation() {
        // RX(-π/2)|0> is the +1 eigenstate of Y.
        let c = Circuit::new(1, vec![Gate::Rx(0, Param::Fixed(-FRAC_PI_2))], 0).unwrap();
        let y = PauliSum::from_real_terms(1, &[("Y", 1.0)]).unwrap();
        let r = expectation_sampled(&c, &[], &y, 500, 3).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_shots_rejected() {
        let c = Circuit::new(1, vec![], 0).unwrap();
        let z = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        assert!(matches!(expectation_sampled(&c, &[], &z, 0, 1), Err(Error::ZeroShots)));
    }

    #[test]
    fn seeded_runs_repeat_and_density_agrees() {
        let c = Circuit::new(
            2,
            vec![Gate::Ry(0, Param::Fixed(0.8)), Gate::Cnot(0, 1), Gate::Rx(1, Param::Fixed(0.4))],
            0,
        )
        .unwrap();
        let h = PauliSum::from_real_terms(2, &[("ZZ", 0.5), ("XX", 0.3), ("YI", -0.2), ("IZ", 0.1)])
            .unwrap();
        let a = expectation_sampled(&c, &[], &h, 2000, 9).unwrap();
        let b = expectation_sampled(&c, &[], &h, 2000, 9).unwrap();
        assert_eq!(a, b);
        let psi = run_statevector(&c, &[]).unwrap();
        let d = sample_expectation(&psi.to_density(), &h, 2000, 9, &Readout::ideal(2)).unwrap();
        assert!((d.value - a.value).abs() < 1e-12);
        let exact = expectation_exact(&psi, &h).unwrap();
        assert!((a.value - exact).abs() < 5.0 * a.stderr);
    }

    #[test]
    fn readout_flips_shrink_z() {
        let s = QuantumState::zero_state(1);
        let z = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        let r = sample_expectation(&s, &z, 200_000, 5, &Readout::with_flips(vec![0.1])).unwrap();
        assert!((r.value - 0.8).abs() < 5.0 * r.stderr);
    }
}

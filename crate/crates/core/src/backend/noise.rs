//! Device calibration data and gate-local density-matrix noise.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::QuantumState;
use crate::circuits::{Circuit, Gate, Param};
use crate::error::{Error, Result};
use crate::qubit_map::PauliString;

/// Largest register simulated as a density matrix.
pub const DENSITY_QUBIT_CAP: usize = 6;
/// Single-qubit gate length used when a calibration omits it.
pub const DEFAULT_1Q_GATE_NS: f64 = 35.56;

fn default_gate_length() -> f64 {
    DEFAULT_1Q_GATE_NS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    pub t1_us: f64,
    pub t2_us: f64,
    #[serde(default)]
    pub freq_ghz: f64,
    pub gate_error: f64,
    #[serde(default = "default_gate_length")]
    pub gate_length_ns: f64,
    pub readout_error: f64,
}

/// Directed CNOT calibration, `pair = [control, target]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingCalibration {
    pub pair: [usize; 2],
    pub gate_error: f64,
    pub gate_length_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(default)]
    pub name: String,
    pub qubits: Vec<QubitCalibration>,
    #[serde(default)]
    pub couplings: Vec<CouplingCalibration>,
}

impl NoiseModel {
    /// Noise-free model on `n` qubits with a linear chain of couplings.
    pub fn ideal(n: usize) -> NoiseModel {
        let qubits = (0..n)
            .map(|_| QubitCalibration {
                t1_us: f64::INFINITY,
                t2_us: f64::INFINITY,
                freq_ghz: 0.0,
                gate_error: 0.0,
                gate_length_ns: DEFAULT_1Q_GATE_NS,
                readout_error: 0.0,
            })
            .collect();
        let couplings = (0..n.saturating_sub(1))
            .flat_map(|q| [[q, q + 1], [q + 1, q]])
            .map(|pair| CouplingCalibration { pair, gate_error: 0.0, gate_length_ns: 300.0 })
            .collect();
        NoiseModel { name: "ideal".into(), qubits, couplings }
    }

    pub fn from_json(text: &str) -> Result<NoiseModel> {
        let m: NoiseModel = serde_json::from_str(text)
            .map_err(|e| Error::InvalidNoiseModel(format!("malformed noise file: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<NoiseModel> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        NoiseModel::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("noise model serializes")
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidNoiseModel(m));
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        for (i, q) in self.qubits.iter().enumerate() {
            if !(q.t1_us > 0.0 && q.t2_us > 0.0) {
                return bad(format!("qubit {i}: relaxation times must be positive"));
            }
            if q.t2_us > 2.0 * q.t1_us {
                return bad(format!("qubit {i}: T2 = {} exceeds 2·T1 = {}", q.t2_us, 2.0 * q.t1_us));
            }
            if !prob(q.gate_error) || !prob(q.readout_error) {
                return bad(format!("qubit {i}: error probabilities must lie in [0, 1]"));
            }
            if !(q.gate_length_ns > 0.0 && q.gate_length_ns.is_finite()) {
                return bad(format!("qubit {i}: gate length must be positive"));
            }
        }
        for c in &self.couplings {
            let [a, b] = c.pair;
            if a == b || a >= self.qubits.len() || b >= self.qubits.len() {
                return bad(format!("coupling {:?} does not name two device qubits", c.pair));
            }
            if !prob(c.gate_error) {
                return bad(format!("coupling {:?}: gate error outside [0, 1]", c.pair));
            }
            if !(c.gate_length_ns > 0.0 && c.gate_length_ns.is_finite()) {
                return bad(format!("coupling {:?}: gate length must be positive", c.pair));
            }
        }
        Ok(())
    }

    pub fn coupling(&self, control: usize, target: usize) -> Option<&CouplingCalibration> {
        self.couplings.iter().find(|c| c.pair == [control, target])
    }

    /// Readout flip probabilities seen by logical qubits under `assignment`.
    pub fn readout_errors(&self, assignment: &[usize]) -> Vec<f64> {
        assignment.iter().map(|&d| self.qubits[d].readout_error).collect()
    }

    /// Check that `assignment` places an `n`-qubit circuit on distinct device qubits.
    pub fn check_assignment(&self, n: usize, assignment: &[usize]) -> Result<()> {
        if assignment.len() != n {
            return Err(Error::InvalidNoiseModel(format!(
                "assignment covers {} qubits, circuit has {n}",
                assignment.len()
            )));
        }
        for (i, &d) in assignment.iter().enumerate() {
            if d >= self.qubits.len() {
                return Err(Error::InvalidNoiseModel(format!(
                    "logical qubit {i} assigned to missing device qubit {d}"
                )));
            }
            if assignment[..i].contains(&d) {
                return Err(Error::InvalidNoiseModel(format!("device qubit {d} assigned twice")));
            }
        }
        Ok(())
    }
}

/// Logical qubit `q` on device qubit `q`.
pub fn default_assignment(n: usize) -> Vec<usize> {
    (0..n).collect()
}

// ρ is stored row-major, so as a 2n-qubit vector the row index sits in the
// high n bits and the column index in the low n bits.

fn fixed(p: &Param, params: &[f64], sign: f64) -> Param {
    Param::Fixed(sign * p.value(params))
}

/// Row action (U on high bits) and column action (U* on low bits).
fn lifted(g: &Gate, n: usize, params: &[f64]) -> (Gate, Gate) {
    let up = |q: &usize| q + n;
    match g {
        Gate::X(q) => (Gate::X(up(q)), Gate::X(*q)),
        Gate::H(q) => (Gate::H(up(q)), Gate::H(*q)),
        Gate::Rx(q, p) => (Gate::Rx(up(q), fixed(p, params, 1.0)), Gate::Rx(*q, fixed(p, params, -1.0))),
        Gate::Ry(q, p) => (Gate::Ry(up(q), fixed(p, params, 1.0)), Gate::Ry(*q, fixed(p, params, 1.0))),
        Gate::Rz(q, p) => (Gate::Rz(up(q), fixed(p, params, 1.0)), Gate::Rz(*q, fixed(p, params, -1.0))),
        Gate::Cnot(c, t) => (Gate::Cnot(up(c), up(t)), Gate::Cnot(*c, *t)),
        Gate::PauliEvolution(p, param) => {
            let (x, z) = (p.x_mask(), p.z_mask());
            let hi = PauliString::new(2 * n, x << n, z << n).expect("width checked");
            let lo = PauliString::new(2 * n, x, z).expect("width checked");
            // P* = (-1)^{#Y} P, so conj(exp(-iθ/2 P)) = exp(-i(∓θ)/2 P).
            let sign = if (x & z).count_ones() % 2 == 0 { -1.0 } else { 1.0 };
            (
                Gate::PauliEvolution(hi, fixed(param, params, 1.0)),
                Gate::PauliEvolution(lo, fixed(param, params, sign)),
            )
        }
    }
}

/// `ρ → U ρ U†`.
pub fn apply_gate_density(rho: &mut [Complex64], n: usize, g: &Gate, params: &[f64]) {
    let (row, col) = lifted(g, n, params);
    row.apply(rho, &[]);
    col.apply(rho, &[]);
}

/// `ρ → (1−p) ρ + p · Tr_S(ρ) ⊗ I/d_S` on the qubits in `mask`.
pub fn depolarize(rho: &mut [Complex64], n: usize, mask: usize, p: f64) {
    if p == 0.0 || mask == 0 {
        return;
    }
    let d = 1usize << n;
    let ds = 1usize << mask.count_ones();
    let sub: Vec<usize> = (0..d).filter(|s| s & !mask == 0).collect();
    let old = rho.to_vec();
    for i in 0..d {
        for j in 0..d {
            let mut v = (1.0 - p) * old[i * d + j];
            if i & mask == j & mask {
                let (ri, rj) = (i & !mask, j & !mask);
                let tr: Complex64 = sub.iter().map(|&s| old[(ri | s) * d + (rj | s)]).sum();
                v += tr * (p / ds as f64);
            }
            rho[i * d + j] = v;
        }
    }
}

/// Amplitude and phase damping of qubit `q` over `t` (same units as T1, T2).
pub fn thermal_relax(rho: &mut [Complex64], n: usize, q: usize, t: f64, t1: f64, t2: f64) {
    if t == 0.0 {
        return;
    }
    let d = 1usize << n;
    let bit = 1usize << q;
    let decay = (-t / t1).exp();
    let dephase = (-t / t2).exp();
    for i in 0..d {
        for j in 0..d {
            match (i & bit != 0, j & bit != 0) {
                (false, false) => {
                    let excited = rho[(i | bit) * d + (j | bit)];
                    rho[i * d + j] += (1.0 - decay) * excited;
                }
                (true, true) => {}
                _ => rho[i * d + j] *= dephase,
            }
        }
    }
    for i in (0..d).filter(|i| i & bit != 0) {
        for j in (0..d).filter(|j| j & bit != 0) {
            rho[i * d + j] *= decay;
        }
    }
}

/// Density-matrix evolution of a native-gate circuit with gate-local noise.
///
/// After every gate: depolarizing with the calibrated error on the gate's
/// qubits, then thermal relaxation of each of those qubits for the gate
/// length. RZ is a frame change and is applied noiselessly.
pub fn run_noisy(
    c: &Circuit,
    params: &[f64],
    noise: &NoiseModel,
    assignment: &[usize],
) -> Result<QuantumState> {
    c.check_params(params)?;
    let n = c.n_qubits();
    if n > DENSITY_QUBIT_CAP {
        return Err(Error::DensitySizeCap(n, DENSITY_QUBIT_CAP));
    }
    noise.validate()?;
    noise.check_assignment(n, assignment)?;
    for g in c.gates() {
        match g {
            Gate::PauliEvolution(..) => {
                return Err(Error::InvalidCircuit(
                    "noisy simulation needs native gates; compile the circuit first".into(),
                ))
            }
            Gate::Cnot(a, b) => {
                if noise.coupling(assignment[*a], assignment[*b]).is_none() {
                    return Err(Error::CouplingNotCalibrated(assignment[*a], assignment[*b]));
                }
            }
            _ => {}
        }
    }

    let QuantumState::Density { mut rho, .. } = QuantumState::zero_state(n).to_density() else {
        unreachable!()
    };
    for g in c.gates() {
        apply_gate_density(&mut rho, n, g, params);
        let (error, length_ns, qubits) = match g {
            Gate::Rz(..) => continue,
            Gate::Cnot(a, b) => {
                let cal = noise.coupling(assignment[*a], assignment[*b]).expect("checked above");
                (cal.gate_error, cal.gate_length_ns, vec![*a, *b])
            }
            other => {
                let q = other.qubits()[0];
                let cal = &noise.qubits[assignment[q]];
                (cal.gate_error, cal.gate_length_ns, vec![q])
            }
        };
        let mask = qubits.iter().fold(0usize, |m, q| m | (1 << q));
        depolarize(&mut rho, n, mask, error);
        for q in qubits {
            let cal = &noise.qubits[assignment[q]];
            thermal_relax(&mut rho, n, q, length_ns * 1e-3, cal.t1_us, cal.t2_us);
        }
    }
    Ok(QuantumState::Density { n_qubits: n, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::state::{expectation_exact, run_statevector};
    use crate::circuits::compile_native;
    use crate::qubit_map::PauliSum;
    use nalgebra::DMatrix;

    fn sample_circuit() -> Circuit {
        Circuit::new(
            3,
            vec![
                Gate::H(0),
                Gate::Ry(1, Param::bound(0)),
                Gate::Cnot(0, 1),
                Gate::Rx(2, Param::Fixed(0.4)),
                Gate::Cnot(1, 2),
                Gate::Rz(2, Param::bound(1)),
                Gate::PauliEvolution(PauliString::from_label("XYZ").unwrap(), Param::Fixed(0.9)),
                Gate::X(0),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn noiseless_density_matches_statevector() {
        let c = sample_circuit();
        let params = [0.37, -1.2];
        let pure = run_statevector(&c, &params).unwrap().to_density();
        let QuantumState::Density { rho: expect, .. } = pure else { unreachable!() };
        let mut rho = QuantumState::zero_state(3).to_density();
        if let QuantumState::Density { rho, .. } = &mut rho {
            for g in c.gates() {
                apply_gate_density(rho, 3, g, &params);
            }
        }
        let QuantumState::Density { rho, .. } = rho else { unreachable!() };
        for (a, b) in rho.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }

        let native = compile_native(&c);
        let noisy = run_noisy(&native, &params, &NoiseModel::ideal(3), &[0, 1, 2]).unwrap();
        let QuantumState::Density { rho, .. } = noisy else { unreachable!() };
        for (a, b) in rho.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn relaxation_reaches_one_over_e() {
        let mut model = NoiseModel::ideal(1);
        model.qubits[0].t1_us = 168.167;
        model.qubits[0].t2_us = 163.925;
        let mut rho = vec![Complex64::default(); 4];
        rho[3] = Complex64::new(1.0, 0.0);
        let q = &model.qubits[0];
        thermal_relax(&mut rho, 1, 0, 168.167, q.t1_us, q.t2_us);
        assert!((rho[3].re - (-1.0f64).exp()).abs() < 1e-12);
        assert!((rho[0].re + rho[3].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dephasing_scales_coherence() {
        let h = 0.5;
        let mut rho = vec![Complex64::new(h, 0.0); 4];
        thermal_relax(&mut rho, 1, 0, 10.0, 100.0, 50.0);
        assert!((rho[1].re - h * (-0.2f64).exp()).abs() < 1e-15);
        assert!((rho[3].re - h * (-0.1f64).exp()).abs() < 1e-15);
    }

    /// Channel oracle: (1-p) ρ + p/16 Σ_P P ρ P over two-qubit Paulis.
    #[test]
    fn two_qubit_depolarizing_matches_pauli_twirl() {
        let c = Circuit::new(2, vec![Gate::Ry(0, Param::Fixed(0.7)), Gate::Cnot(0, 1), Gate::Rx(1, Param::Fixed(0.3))], 0).unwrap();
        let QuantumState::Density { rho, .. } = run_statevector(&c, &[]).unwrap().to_density() else {
            unreachable!()
        };
        let p = 0.00812;
        let mut got = rho.clone();
        depolarize(&mut got, 2, 0b11, p);
        let m = DMatrix::from_row_slice(4, 4, &rho);
        let mut want = m.scale(1.0 - p).map(|x| x);
        for a in ["I", "X", "Y", "Z"] {
            for b in ["I", "X", "Y", "Z"] {
                let pm = PauliString::from_label(&format!("{a}{b}")).unwrap().to_dense();
                want += (&pm * &m * &pm) * Complex64::new(p / 16.0, 0.0);
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!((got[i * 4 + j] - want[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn noisy_states_stay_physical() {
        let mut model = NoiseModel::ideal(3);
        for q in &mut model.qubits {
            q.t1_us = 0.5;
            q.t2_us = 0.8;
            q.gate_error = 0.05;
        }
        for cp in &mut model.couplings {
            cp.gate_error = 0.1;
        }
        let c = compile_native(&sample_circuit());
        let s = run_noisy(&c, &[0.3, 0.8], &model, &[0, 1, 2]).unwrap();
        s.check_physical(1e-10).unwrap();
        let z = PauliSum::from_real_terms(3, &[("ZZZ", 1.0)]).unwrap();
        assert!(expectation_exact(&s, &z).unwrap().abs() <= 1.0);
    }

    #[test]
    fn errors_reported() {
        let c = Circuit::new(2, vec![Gate::Cnot(0, 1)], 0).unwrap();
        let mut m = NoiseModel::ideal(3);
        m.couplings.retain(|c| c.pair != [2, 0]);
        assert!(matches!(run_noisy(&c, &[], &m, &[2, 0]), Err(Error::CouplingNotCalibrated(2, 0))));
        let big = Circuit::new(7, vec![], 0).unwrap();
        assert!(matches!(
            run_noisy(&big, &[], &NoiseModel::ideal(7), &default_assignment(7)),
            Err(Error::DensitySizeCap(7, 6))
        ));
        let unc = Circuit::new(2, vec![Gate::PauliEvolution(PauliString::from_label("XX").unwrap(), Param::Fixed(0.1))], 0).unwrap();
        assert!(run_noisy(&unc, &[], &NoiseModel::ideal(2), &[0, 1]).is_err());
    }

    #[test]
    fn validation() {
        let mut m = NoiseModel::ideal(1);
        m.qubits[0].t1_us = 10.0;
        m.qubits[0].t2_us = 25.0;
        assert!(m.validate().is_err());
        m.qubits[0].t2_us = 20.0;
        m.validate().unwrap();
        m.qubits[0].readout_error = 1.5;
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_default_length() {
        let text = r#"{"qubits":[{"t1_us":100.0,"t2_us":80.0,"gate_error":0.001,"readout_error":0.02}],"couplings":[]}"#;
        let m = NoiseModel::from_json(text).unwrap();
        assert_eq!(m.qubits[0].gate_length_ns, DEFAULT_1Q_GATE_NS);
        assert_eq!(NoiseModel::from_json(&m.to_json()).unwrap(), m);
        assert!(NoiseModel::from_json("{").is_err());
    }
}

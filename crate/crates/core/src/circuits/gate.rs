//! Gates, parameter bindings and their action on state vectors.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::qubit_map::PauliString;

/// Angle source: a literal or `scale * params[index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Fixed(f64),
    Bound { index: usize, scale: f64 },
}

impl Param {
    pub fn bound(index: usize) -> Param {
        Param::Bound { index, scale: 1.0 }
    }

    #[inline]
    pub fn value(&self, params: &[f64]) -> f64 {
        match *self {
            Param::Fixed(v) => v,
            Param::Bound { index, scale } => scale * params[index],
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            Param::Fixed(_) => None,
            Param::Bound { index, .. } => Some(index),
        }
    }
}

/// Rotations are `exp(-i angle/2 · P)`; `PauliEvolution` uses the same
/// convention with a multi-qubit generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    Rx(usize, Param),
    Ry(usize, Param),
    Rz(usize, Param),
    Cnot(usize, usize),
    PauliEvolution(PauliString, Param),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::H(_) => "H",
            Gate::Rx(..) => "RX",
            Gate::Ry(..) => "RY",
            Gate::Rz(..) => "RZ",
            Gate::Cnot(..) => "CNOT",
            Gate::PauliEvolution(..) => "PAULI",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cnot(c, t) => vec![*c, *t],
            Gate::PauliEvolution(p, _) => {
                (0..p.n_qubits()).filter(|&q| (p.support() >> q) & 1 == 1).collect()
            }
        }
    }

    pub fn param(&self) -> Option<&Param> {
        match self {
            Gate::Rx(_, p) | Gate::Ry(_, p) | Gate::Rz(_, p) | Gate::PauliEvolution(_, p) => Some(p),
            _ => None,
        }
    }

    pub fn param_mut(&mut self) -> Option<&mut Param> {
        match self {
            Gate::Rx(_, p) | Gate::Ry(_, p) | Gate::Rz(_, p) | Gate::PauliEvolution(_, p) => Some(p),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot(..))
    }

    /// Apply to a state vector whose basis index bit `q` is qubit `q`.
    pub fn apply(&self, state: &mut [Complex64], params: &[f64]) {
        match self {
            Gate::X(q) => {
                let bit = 1usize << q;
                for b in 0..state.len() {
                    if b & bit == 0 {
                        state.swap(b, b | bit);
                    }
                }
            }
            Gate::H(q) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                apply_1q(state, *q, [[h, h], [h, -h]]);
            }
            Gate::Rx(q, p) => {
                let (s, c) = (p.value(params) / 2.0).sin_cos();
                let m = [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ];
                apply_1q(state, *q, m);
            }
            Gate::Ry(q, p) => {
                let (s, c) = (p.value(params) / 2.0).sin_cos();
                let m = [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ];
                apply_1q(state, *q, m);
            }
            Gate::Rz(q, p) => {
                let half = p.value(params) / 2.0;
                let (lo, hi) = (Complex64::from_polar(1.0, -half), Complex64::from_polar(1.0, half));
                let bit = 1usize << q;
                for (b, a) in state.iter_mut().enumerate() {
                    *a *= if b & bit == 0 { lo } else { hi };
                }
            }
            Gate::Cnot(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for b in 0..state.len() {
                    if b & cb != 0 && b & tb == 0 {
                        state.swap(b, b | tb);
                    }
                }
            }
            Gate::PauliEvolution(p, param) => apply_pauli_evolution(state, p, param.value(params)),
        }
    }
}

fn apply_1q(state: &mut [Complex64], q: usize, m: [[Complex64; 2]; 2]) {
    let bit = 1usize << q;
    for b in 0..state.len() {
        if b & bit == 0 {
            let (a0, a1) = (state[b], state[b | bit]);
            state[b] = m[0][0] * a0 + m[0][1] * a1;
            state[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// `exp(-i angle/2 · P)` in place.
pub fn apply_pauli_evolution(state: &mut [Complex64], p: &PauliString, angle: f64) {
    let (s, c) = (angle / 2.0).sin_cos();
    let minus_i_s = Complex64::new(0.0, -s);
    let x = p.x_mask() as usize;
    if x == 0 {
        for (b, a) in state.iter_mut().enumerate() {
            let (_, ph) = p.apply_to_basis(b as u64);
            *a *= c + minus_i_s * ph;
        }
        return;
    }
    let high = 1usize << (63 - (x as u64).leading_zeros());
    for b in 0..state.len() {
        if b & high != 0 {
            continue;
        }
        let b2 = b ^ x;
        let (_, ph1) = p.apply_to_basis(b as u64);
        let (_, ph2) = p.apply_to_basis(b2 as u64);
        let (a1, a2) = (state[b], state[b2]);
        // (P a)[b2] = ph1 a1, (P a)[b] = ph2 a2.
        state[b] = c * a1 + minus_i_s * ph2 * a2;
        state[b2] = c * a2 + minus_i_s * ph1 * a1;
    }
}

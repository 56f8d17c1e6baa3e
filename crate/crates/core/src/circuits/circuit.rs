//! Circuit container, native lowering, CNOT folding and text form.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gate::{Gate, Param};
use crate::error::{Error, Result};
use crate::qubit_map::PauliString;

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    /// Validated circuit: indices in range, CNOT qubits distinct, every
    /// parameter referenced.
    pub fn new(n_qubits: usize, gates: Vec<Gate>, n_params: usize) -> Result<Self> {
        let mut used = vec![false; n_params];
        for (k, g) in gates.iter().enumerate() {
            if let Some(q) = g.qubits().into_iter().find(|&q| q >= n_qubits) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {k} ({}) touches qubit {q} of a {n_qubits}-qubit register",
                    g.name()
                )));
            }
            match g {
                Gate::Cnot(c, t) if c == t => {
                    return Err(Error::InvalidCircuit(format!("gate {k}: CNOT on a single qubit {c}")))
                }
                Gate::PauliEvolution(p, _) if p.n_qubits() != n_qubits => {
                    return Err(Error::QubitCountMismatch(p.n_qubits(), n_qubits))
                }
                _ => {}
            }
            if let Some(i) = g.param().and_then(Param::index) {
                if i >= n_params {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {k} uses parameter {i} but the circuit has {n_params}"
                    )));
                }
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCircuit(format!("parameter {i} is never used")));
        }
        Ok(Circuit { n_qubits, gates, n_params })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::ParameterCount { expected: self.n_params, got: params.len() });
        }
        Ok(())
    }

    /// Gates that read parameter `index`.
    pub fn gates_using(&self, index: usize) -> Vec<usize> {
        (0..self.gates.len())
            .filter(|&k| self.gates[k].param().and_then(Param::index) == Some(index))
            .collect()
    }

    /// True when `index` drives exactly one gate with unit scale, so the
    /// two-point shift rule is exact.
    pub fn shift_rule_applies(&self, index: usize) -> bool {
        let users = self.gates_using(index);
        users.len() == 1
            && matches!(
                self.gates[users[0]].param(),
                Some(Param::Bound { scale, .. }) if (scale.abs() - 1.0).abs() < 1e-15
            )
    }

    /// Dense unitary, column `b` being the image of basis state `b`.
    pub fn unitary(&self, params: &[f64]) -> Result<DMatrix<Complex64>> {
        self.check_params(params)?;
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let mut v = vec![Complex64::default(); dim];
            v[b] = Complex64::new(1.0, 0.0);
            for g in &self.gates {
                g.apply(&mut v, params);
            }
            for (i, a) in v.into_iter().enumerate() {
                u[(i, b)] = a;
            }
        }
        Ok(u)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("circuit {} {}\n", self.n_qubits, self.n_params);
        for g in &self.gates {
            let qs: Vec<String> = g.qubits().iter().map(|q| q.to_string()).collect();
            let _ = match g {
                Gate::PauliEvolution(p, param) => {
                    writeln!(out, "PAULI {} {}", p.label(), render_param(param))
                }
                _ => match g.param() {
                    Some(p) => writeln!(out, "{} {} {}", g.name(), qs.join(","), render_param(p)),
                    None => writeln!(out, "{} {}", g.name(), qs.join(",")),
                },
            };
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty circuit".into() })?;
        let h: Vec<&str> = head.split_whitespace().collect();
        let bad_head = || Error::Parse { line: 1, msg: format!("bad circuit header {head:?}") };
        if h.len() != 3 || h[0] != "circuit" {
            return Err(bad_head());
        }
        let n_qubits: usize = h[1].parse().map_err(|_| bad_head())?;
        let n_params: usize = h[2].parse().map_err(|_| bad_head())?;
        let mut gates = Vec::new();
        for (i, line) in lines {
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let t: Vec<&str> = line.split_whitespace().collect();
            let qubits = |s: &str| -> Result<Vec<usize>> {
                s.split(',')
                    .map(|q| q.parse().map_err(|_| bad(format!("bad qubit list {s:?}"))))
                    .collect()
            };
            let one = |s: &str| -> Result<usize> {
                let q = qubits(s)?;
                if q.len() != 1 {
                    return Err(bad(format!("expected one qubit, got {s:?}")));
                }
                Ok(q[0])
            };
            let need = |k: usize| {
                if t.len() != k {
                    Err(bad(format!("expected {k} fields in {line:?}")))
                } else {
                    Ok(())
                }
            };
            let gate = match t.first().copied() {
                Some("X") => {
                    need(2)?;
                    Gate::X(one(t[1])?)
                }
                Some("H") => {
                    need(2)?;
                    Gate::H(one(t[1])?)
                }
                Some(k @ ("RX" | "RY" | "RZ")) => {
                    need(3)?;
                    let (q, p) = (one(t[1])?, parse_param(t[2]).map_err(bad)?);
                    match k {
                        "RX" => Gate::Rx(q, p),
                        "RY" => Gate::Ry(q, p),
                        _ => Gate::Rz(q, p),
                    }
                }
                Some("CNOT") => {
                    need(2)?;
                    let q = qubits(t[1])?;
                    if q.len() != 2 {
                        return Err(bad("CNOT needs two qubits".into()));
                    }
                    Gate::Cnot(q[0], q[1])
                }
                Some("PAULI") => {
                    need(3)?;
                    let p = PauliString::from_label(t[1]).map_err(|e| bad(e.to_string()))?;
                    Gate::PauliEvolution(p, parse_param(t[2]).map_err(bad)?)
                }
                _ => return Err(bad(format!("unknown gate line {line:?}"))),
            };
            gates.push(gate);
        }
        Circuit::new(n_qubits, gates, n_params)
    }
}

fn render_param(p: &Param) -> String {
    match *p {
        Param::Fixed(v) => format!("{v:?}"),
        Param::Bound { index, scale } if scale == 1.0 => format!("p{index}"),
        Param::Bound { index, scale } => format!("p{index}*{scale:?}"),
    }
}

fn parse_param(s: &str) -> std::result::Result<Param, String> {
    if let Some(rest) = s.strip_prefix('p') {
        let (idx, scale) = match rest.split_once('*') {
            Some((i, sc)) => (i, sc.parse::<f64>().map_err(|_| format!("bad scale {sc:?}"))?),
            None => (rest, 1.0),
        };
        let index = idx.parse().map_err(|_| format!("bad parameter index {idx:?}"))?;
        Ok(Param::Bound { index, scale })
    } else {
        s.parse().map(Param::Fixed).map_err(|_| format!("bad angle {s:?}"))
    }
}

/// Lower to {RX, RY, RZ, H, CNOT}.
pub fn compile_native(c: &Circuit) -> Circuit {
    let mut out = Vec::with_capacity(c.len());
    for g in c.gates() {
        match g {
            Gate::X(q) => out.push(Gate::Rx(*q, Param::Fixed(std::f64::consts::PI))),
            Gate::PauliEvolution(p, param) => lower_evolution(p, *param, &mut out),
            other => out.push(other.clone()),
        }
    }
    Circuit { n_qubits: c.n_qubits, gates: out, n_params: c.n_params }
}

fn lower_evolution(p: &PauliString, param: Param, out: &mut Vec<Gate>) {
    let support: Vec<usize> = (0..p.n_qubits()).filter(|&q| (p.support() >> q) & 1 == 1).collect();
    let Some(&last) = support.last() else {
        return;
    };
    let into_z = |q: usize| match p.op_at(q) {
        'X' => Some(Gate::H(q)),
        'Y' => Some(Gate::Rx(q, Param::Fixed(FRAC_PI_2))),
        _ => None,
    };
    let out_of_z = |q: usize| match p.op_at(q) {
        'X' => Some(Gate::H(q)),
        'Y' => Some(Gate::Rx(q, Param::Fixed(-FRAC_PI_2))),
        _ => None,
    };
    out.extend(support.iter().filter_map(|&q| into_z(q)));
    for w in support.windows(2) {
        out.push(Gate::Cnot(w[0], w[1]));
    }
    out.push(Gate::Rz(last, param));
    for w in support.windows(2).rev() {
        out.push(Gate::Cnot(w[0], w[1]));
    }
    out.extend(support.iter().filter_map(|&q| out_of_z(q)));
}

/// Replace each CNOT by `factor` copies.
pub fn fold_cnots(c: &Circuit, factor: usize) -> Result<Circuit> {
    if factor == 0 || factor % 2 == 0 {
        return Err(Error::InvalidFoldFactor(factor));
    }
    let mut out = Vec::with_capacity(c.len() + c.cnot_count() * (factor - 1));
    for g in c.gates() {
        let reps = if g.is_two_qubit() { factor } else { 1 };
        out.extend(std::iter::repeat(g.clone()).take(reps));
    }
    Ok(Circuit { n_qubits: c.n_qubits, gates: out, n_params: c.n_params })
}

/// Distance between unitaries modulo global phase.
pub fn phase_insensitive_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

//! Symplectic bitmask Pauli strings and weighted sums of them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients below this magnitude are pruned after every algebraic pass.
pub const PRUNE_TOL: f64 = 1e-12;

/// Register width limit imposed by the `u64` masks.
pub const MAX_QUBITS: usize = 64;

/// Power of `i`: one of {1, i, −1, −i}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis.
///
/// Qubit `q` carries X when bit `q` of `x` is set, Z when bit `q` of `z` is
/// set and Y when both are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: u8,
    x: u64,
    z: u64,
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        PauliString { n_qubits: n_qubits as u8, x: 0, z: 0 }
    }

    pub fn new(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCountMismatch(n_qubits, MAX_QUBITS));
        }
        let m = width_mask(n_qubits);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::InvalidCircuit(format!(
                "Pauli masks exceed {n_qubits} qubits"
            )));
        }
        Ok(PauliString { n_qubits: n_qubits as u8, x, z })
    }

    /// Single Pauli `op` ∈ {I, X, Y, Z} on qubit `q`.
    pub fn single(n_qubits: usize, q: usize, op: char) -> Result<Self> {
        let mut p = PauliString::identity(n_qubits);
        if q >= n_qubits {
            return Err(Error::InvalidCircuit(format!("qubit {q} out of range")));
        }
        p.set(q, op)?;
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits acted on nontrivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn op_at(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn set(&mut self, q: usize, op: char) -> Result<()> {
        let bit = 1u64 << q;
        let (xb, zb) = match op.to_ascii_uppercase() {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            c => return Err(Error::InvalidCircuit(format!("unknown Pauli {c:?}"))),
        };
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
        Ok(())
    }

    /// Parse a label such as `XIZY`, qubit 0 leftmost.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::QubitCountMismatch(n, MAX_QUBITS));
        }
        let mut p = PauliString::identity(n);
        for (q, c) in label.chars().enumerate() {
            p.set(q, c)?;
        }
        Ok(p)
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits()).map(|q| self.op_at(q)).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Commute on every qubit individually.
    pub fn qubitwise_commutes(&self, other: &PauliString) -> bool {
        let both = self.support() & other.support();
        (self.x & both) == (other.x & both) && (self.z & both) == (other.z & both)
    }

    /// `P|b> = phase |b'>` for computational basis state `b`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let k = (self.x & self.z).count_ones() + 2 * (b & self.z).count_ones();
        (b ^ self.x, Phase::from_power(k as i64).to_complex())
    }

    /// Drop the qubits whose bits are set in `removed`, compacting the rest.
    pub fn remove_qubits(&self, removed: &[usize]) -> PauliString {
        let compact = |m: u64| compact_bits(m, self.n_qubits(), removed);
        PauliString {
            n_qubits: (self.n_qubits() - removed.len()) as u8,
            x: compact(self.x),
            z: compact(self.z),
        }
    }

    /// Dense 2^n × 2^n matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (out, ph) = self.apply_to_basis(b);
            m[(out as usize, b as usize)] = ph;
        }
        m
    }
}

/// Remove bit positions listed in `removed` from the low `n` bits of `m`.
pub fn compact_bits(m: u64, n: usize, removed: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    for q in 0..n {
        if removed.contains(&q) {
            continue;
        }
        out |= ((m >> q) & 1) << k;
        k += 1;
    }
    out
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Product `a·b` as a Pauli string times a phase.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<(PauliString, Phase)> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::QubitCountMismatch(a.n_qubits(), b.n_qubits()));
    }
    Ok(multiply_unchecked(a, b))
}

#[inline]
fn multiply_unchecked(a: &PauliString, b: &PauliString) -> (PauliString, Phase) {
    let (xa, ya, za) = (a.x & !a.z, a.x & a.z, a.z & !a.x);
    let (xb, yb, zb) = (b.x & !b.z, b.x & b.z, b.z & !b.x);
    let pos = ((xa & yb) | (ya & zb) | (za & xb)).count_ones() as i64;
    let neg = ((ya & xb) | (za & yb) | (xa & zb)).count_ones() as i64;
    (
        PauliString { n_qubits: a.n_qubits, x: a.x ^ b.x, z: a.z ^ b.z },
        Phase::from_power(pos - neg),
    )
}

/// Weighted sum of Pauli strings with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, c: f64) -> Self {
        let mut s = PauliSum::zero(n_qubits);
        s.add_term(PauliString::identity(n_qubits), Complex64::new(c, 0.0));
        s.simplify();
        s
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Result<Self> {
        let mut s = PauliSum::zero(n_qubits);
        for (p, c) in terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch(p.n_qubits(), n_qubits));
            }
            s.add_term(p, c);
        }
        s.simplify();
        Ok(s)
    }

    pub fn from_real_terms(n_qubits: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut v = Vec::with_capacity(terms.len());
        for (label, c) in terms {
            v.push((PauliString::from_label(label)?, Complex64::new(*c, 0.0)));
        }
        PauliSum::from_terms(n_qubits, v)
    }

    pub(crate) fn from_map(n_qubits: usize, map: HashMap<PauliString, Complex64>) -> Self {
        let mut s = PauliSum { n_qubits, terms: map.into_iter().collect() };
        s.simplify();
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Coefficient of the identity string.
    pub fn constant(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.n_qubits)).re
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        debug_assert_eq!(p.n_qubits(), self.n_qubits);
        *self.terms.entry(p).or_default() += c;
    }

    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c);
        }
        out.simplify();
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|v| *v *= c);
        out.simplify();
        out
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch(self.n_qubits, other.n_qubits));
        }
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (p, ph) = multiply_unchecked(a, b);
                *acc.entry(p).or_default() += ca * cb * ph.to_complex();
            }
        }
        Ok(PauliSum::from_map(self.n_qubits, acc))
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|v| *v = v.conj());
        out
    }

    /// Largest imaginary part among coefficients.
    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imaginary() <= tol
    }

    /// Real coefficients, failing on any imaginary part above `tol`.
    pub fn real_terms(&self, tol: f64) -> Result<Vec<(PauliString, f64)>> {
        self.terms
            .iter()
            .map(|(p, c)| {
                if c.im.abs() > tol {
                    Err(Error::NonHermitian { term: p.label(), coeff: format!("{c}") })
                } else {
                    Ok((*p, c.re))
                }
            })
            .collect()
    }

    /// Apply to a dense state vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); psi.len()];
        for (p, c) in &self.terms {
            for (b, amp) in psi.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let (t, ph) = p.apply_to_basis(b as u64);
                out[t as usize] += c * ph * amp;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for b in 0..dim as u64 {
                let (t, ph) = p.apply_to_basis(b);
                m[(t as usize, b as usize)] += c * ph;
            }
        }
        m
    }

    /// One term per line: `coefficient label`, or `re im label` when the
    /// coefficient is complex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.terms {
            let label = if self.n_qubits == 0 { "I".to_string() } else { p.label() };
            if c.im == 0.0 {
                out.push_str(&format!("{:.16e} {}\n", c.re, label));
            } else {
                out.push_str(&format!("{:.16e} {:.16e} {}\n", c.re, c.im, label));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut terms = Vec::new();
        let mut n = None;
        for (i, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() || toks[0].starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let num = |t: &str| t.parse::<f64>().map_err(|_| bad(format!("bad coefficient {t:?}")));
            let (c, label) = match toks.len() {
                2 => (Complex64::new(num(toks[0])?, 0.0), toks[1]),
                3 => (Complex64::new(num(toks[0])?, num(toks[1])?), toks[2]),
                _ => return Err(bad(format!("expected `coefficient label`, got {line:?}"))),
            };
            let p = PauliString::from_label(label).map_err(|e| bad(e.to_string()))?;
            match n {
                None => n = Some(p.n_qubits()),
                Some(k) if k != p.n_qubits() => {
                    return Err(bad(format!("label width {} != {k}", p.n_qubits())))
                }
                _ => {}
            }
            terms.push((p, c));
        }
        PauliSum::from_terms(n.unwrap_or(0), terms)
    }
}

/// Partition term indices into qubit-wise commuting groups (greedy,
/// largest coefficients first).
pub fn qubitwise_groups(terms: &[(PauliString, f64)]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[b].1.abs().total_cmp(&terms[a].1.abs()).then(a.cmp(&b)));
    let mut groups: Vec<(Vec<usize>, u64, u64)> = Vec::new();
    for i in order {
        let p = &terms[i].0;
        if p.is_identity() {
            continue;
        }
        let slot = groups.iter_mut().find(|(_, x, z)| {
            let support = x | z;
            let both = support & p.support();
            (x & both) == (p.x_mask() & both) && (z & both) == (p.z_mask() & both)
        });
        match slot {
            Some((g, x, z)) => {
                g.push(i);
                *x |= p.x_mask();
                *z |= p.z_mask();
            }
            None => groups.push((vec![i], p.x_mask(), p.z_mask())),
        }
    }
    groups.into_iter().map(|(g, _, _)| g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliString::from_label("X").unwrap();
        let y = PauliString::from_label("Y").unwrap();
        let z = PauliString::from_label("Z").unwrap();
        assert_eq!(pauli_multiply(&x, &x).unwrap(), (PauliString::identity(1), Phase::ONE));
        assert_eq!(pauli_multiply(&x, &y).unwrap(), (z, Phase::I));
        assert_eq!(pauli_multiply(&y, &x).unwrap(), (z, Phase::MINUS_I));
        assert_eq!(pauli_multiply(&z, &x).unwrap(), (y, Phase::I));
    }

    #[test]
    fn size_mismatch_rejected() {
        let a = PauliString::identity(2);
        let b = PauliString::identity(3);
        assert!(pauli_multiply(&a, &b).is_err());
    }

    #[test]
    fn label_round_trip() {
        let p = PauliString::from_label("ZIZX").unwrap();
        assert_eq!(p.label(), "ZIZX");
        assert_eq!(p.op_at(0), 'Z');
        assert_eq!(p.x_mask(), 0b1000);
        assert!(PauliString::from_label("XQ").is_err());
    }

    #[test]
    fn basis_action_matches_dense() {
        let y = PauliString::from_label("Y").unwrap().to_dense();
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = PauliSum::from_terms(
            3,
            vec![
                (PauliString::from_label("ZIZ").unwrap(), c(-0.5, 0.0)),
                (PauliString::from_label("XYI").unwrap(), c(1.0 / 3.0, 0.0)),
                (PauliString::from_label("III").unwrap(), c(0.1, 0.2)),
            ],
        )
        .unwrap();
        let back = PauliSum::from_text(&s.to_text()).unwrap();
        assert_eq!(back, s);
        assert!(s.to_text().contains("-5.0000000000000000e-1 ZIZ"));
    }

    #[test]
    fn pruning_removes_cancelled_terms() {
        let z = PauliString::from_label("Z").unwrap();
        let s = PauliSum::from_terms(1, vec![(z, c(0.5, 0.0)), (z, c(-0.5, 0.0))]).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn commutation_checks() {
        let a = PauliString::from_label("XX").unwrap();
        let b = PauliString::from_label("ZZ").unwrap();
        assert!(a.commutes_with(&b));
        assert!(!a.qubitwise_commutes(&b));
        let c = PauliString::from_label("XI").unwrap();
        assert!(a.qubitwise_commutes(&c));
    }

    #[test]
    fn grouping_covers_all_non_identity_terms() {
        let terms: Vec<(PauliString, f64)> = ["II", "ZI", "IZ", "ZZ", "XX", "YY"]
            .iter()
            .map(|l| (PauliString::from_label(l).unwrap(), 1.0))
            .collect();
        let groups = qubitwise_groups(&terms);
        let mut seen: Vec<usize> = groups.concat();
        seen.sort();
        assert_eq!(seen, vec![1, 2, 3, 4, 5]);
        assert_eq!(groups.len(), 3);
    }

    #[test]
    fn remove_qubits_compacts() {
        let p = PauliString::from_label("XZYI").unwrap();
        assert_eq!(p.remove_qubits(&[1, 3]).label(), "XY");
    }
}

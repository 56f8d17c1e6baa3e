//! Fermion-to-qubit encodings.

use std::collections::HashMap;

use num_complex::Complex64;

use super::pauli::{PauliString, PauliSum};
use crate::hamiltonian::FermionHamiltonian;

/// Jordan–Wigner keeps the interleaved mode order; parity works on the
/// blocked order (all α, then all β) and permutes internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    JordanWigner,
    Parity,
}

/// Blocked position of interleaved mode `p` among `n_modes`.
#[inline]
pub fn blocked_index(p: usize, n_modes: usize) -> usize {
    (p % 2) * (n_modes / 2) + p / 2
}

type Terms = Vec<(PauliString, Complex64)>;

impl Encoding {
    /// Two-term Pauli image of a single creation or annihilation operator.
    pub fn ladder(self, mode: usize, creation: bool, n_modes: usize) -> [(PauliString, Complex64); 2] {
        let sign = if creation { -0.5 } else { 0.5 };
        let (x, z_x, z_y) = match self {
            Encoding::JordanWigner => {
                let bit = 1u64 << mode;
                let lower = bit - 1;
                (bit, lower, lower | bit)
            }
            Encoding::Parity => {
                let j = blocked_index(mode, n_modes);
                let bit = 1u64 << j;
                let full = if n_modes >= 64 { u64::MAX } else { (1u64 << n_modes) - 1 };
                let upper = full & !((bit << 1).wrapping_sub(1));
                let prev = if j > 0 { 1u64 << (j - 1) } else { 0 };
                (bit | upper, prev, bit)
            }
        };
        let ps = |z| PauliString::new(n_modes, x, z).expect("mask within width");
        [
            (ps(z_x), Complex64::new(0.5, 0.0)),
            (ps(z_y), Complex64::new(0.0, sign)),
        ]
    }

    /// Pauli image of `coeff · Π ops` with `ops` given left to right.
    pub fn map_product(self, ops: &[(usize, bool)], coeff: Complex64, n_modes: usize) -> Terms {
        let mut acc: Terms = vec![(PauliString::identity(n_modes), coeff)];
        for &(mode, creation) in ops {
            let factor = self.ladder(mode, creation, n_modes);
            let mut next: HashMap<PauliString, Complex64> = HashMap::with_capacity(acc.len() * 2);
            for (p, c) in &acc {
                for (q, d) in &factor {
                    let (r, ph) = super::pauli::pauli_multiply(p, q).expect("same width");
                    *next.entry(r).or_default() += c * d * ph.to_complex();
                }
            }
            acc = next.into_iter().filter(|(_, c)| c.norm() > 0.0).collect();
        }
        acc
    }

    /// Computational basis state encoding an occupation vector.
    pub fn encode_occupation(self, occ: &[bool]) -> u64 {
        let n = occ.len();
        match self {
            Encoding::JordanWigner => occ
                .iter()
                .enumerate()
                .fold(0u64, |b, (p, &o)| b | ((o as u64) << p)),
            Encoding::Parity => {
                let mut blocked = vec![false; n];
                for (p, &o) in occ.iter().enumerate() {
                    blocked[blocked_index(p, n)] = o;
                }
                let mut parity = false;
                let mut bits = 0u64;
                for (j, &o) in blocked.iter().enumerate() {
                    parity ^= o;
                    bits |= (parity as u64) << j;
                }
                bits
            }
        }
    }

    /// Full Hamiltonian image.
    pub fn map_hamiltonian(self, h: &FermionHamiltonian) -> PauliSum {
        let n = h.n_modes();
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        acc.insert(PauliString::identity(n), Complex64::new(h.constant, 0.0));
        let mut push = |terms: Terms| {
            for (p, c) in terms {
                *acc.entry(p).or_default() += c;
            }
        };
        for (p, q, v) in h.one_body_terms() {
            push(self.map_product(&[(p, true), (q, false)], Complex64::new(v, 0.0), n));
        }
        for (p, q, r, s, v) in h.two_body_terms() {
            if p == q || r == s {
                continue;
            }
            push(self.map_product(
                &[(p, true), (q, true), (r, false), (s, false)],
                Complex64::new(0.5 * v, 0.0),
                n,
            ));
        }
        PauliSum::from_map(n, acc)
    }
}

pub fn jordan_wigner(h: &FermionHamiltonian) -> PauliSum {
    Encoding::JordanWigner.map_hamiltonian(h)
}

pub fn parity_map(h: &FermionHamiltonian) -> PauliSum {
    Encoding::Parity.map_hamiltonian(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sum(n: usize, terms: Terms) -> PauliSum {
        PauliSum::from_terms(n, terms).unwrap()
    }

    #[test]
    fn number_operator_single_mode() {
        let t = Encoding::JordanWigner.map_product(&[(0, true), (0, false)], c(1.0), 1);
        let expect = PauliSum::from_real_terms(1, &[("I", 0.5), ("Z", -0.5)]).unwrap();
        assert_eq!(sum(1, t), expect);
    }

    #[test]
    fn total_number_two_modes() {
        for enc in [Encoding::JordanWigner, Encoding::Parity] {
            let mut terms = enc.map_product(&[(0, true), (0, false)], c(1.0), 2);
            terms.extend(enc.map_product(&[(1, true), (1, false)], c(1.0), 2));
            let s = sum(2, terms);
            if enc == Encoding::JordanWigner {
                let expect =
                    PauliSum::from_real_terms(2, &[("II", 1.0), ("ZI", -0.5), ("IZ", -0.5)]).unwrap();
                assert_eq!(s, expect);
            }
            assert!(s.is_hermitian(1e-15));
        }
    }

    #[test]
    fn occupation_encoding() {
        let occ = [true, true, false, false];
        assert_eq!(Encoding::JordanWigner.encode_occupation(&occ), 0b0011);
        // Blocked (α0, α1, β0, β1) = (1, 0, 1, 0); prefix parities 1, 1, 0, 0.
        assert_eq!(Encoding::Parity.encode_occupation(&occ), 0b0011);
    }

    #[test]
    fn anticommutation_holds_in_both_encodings() {
        let n = 4;
        for enc in [Encoding::JordanWigner, Encoding::Parity] {
            for p in 0..n {
                for q in 0..n {
                    let mut t = enc.map_product(&[(p, false), (q, true)], c(1.0), n);
                    t.extend(enc.map_product(&[(q, true), (p, false)], c(1.0), n));
                    let s = sum(n, t);
                    let expect = if p == q { PauliSum::identity(n, 1.0) } else { PauliSum::zero(n) };
                    assert_eq!(s, expect, "{enc:?} {p} {q}");
                    let mut t = enc.map_product(&[(p, true), (q, true)], c(1.0), n);
                    t.extend(enc.map_product(&[(q, true), (p, true)], c(1.0), n));
                    assert!(sum(n, t).is_empty());
                }
            }
        }
    }
}

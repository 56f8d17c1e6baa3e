//! Mean-field quantities and MP2 amplitudes for ordering UCCSD factors.

use std::fmt;

use super::fermion::spin_orbital;
use super::integrals::MolecularIntegrals;
use crate::error::{Error, Result};

const DENOMINATOR_FLOOR: f64 = 1e-8;
const CANONICAL_TOL: f64 = 1e-6;

/// Particle-conserving excitation over interleaved spin orbitals.
///
/// Doubles keep `from[0] < from[1]` and `to[0] < to[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Excitation {
    Single { from: usize, to: usize },
    Double { from: [usize; 2], to: [usize; 2] },
}

impl Excitation {
    pub fn is_double(&self) -> bool {
        matches!(self, Excitation::Double { .. })
    }

    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Excitation::Single { from, to } => vec![from, to],
            Excitation::Double { from, to } => vec![from[0], from[1], to[0], to[1]],
        }
    }

    /// Creation/annihilation string of `T`: `(mode, is_creation)` left to right.
    ///
    /// Singles are `a†a a_i`, doubles `a†a a†b a_j a_i`.
    pub fn ladder_ops(&self) -> Vec<(usize, bool)> {
        match *self {
            Excitation::Single { from, to } => vec![(to, true), (from, false)],
            Excitation::Double { from, to } => {
                vec![(to[0], true), (to[1], true), (from[1], false), (from[0], false)]
            }
        }
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Excitation::Single { from, to } => write!(f, "{from}->{to}"),
            Excitation::Double { from, to } => {
                write!(f, "{},{}->{},{}", from[0], from[1], to[0], to[1])
            }
        }
    }
}

/// Reference determinant occupation over interleaved spin orbitals.
pub fn reference_occupation(n_spatial: usize, n_alpha: usize, n_beta: usize) -> Vec<bool> {
    let mut occ = vec![false; 2 * n_spatial];
    for p in 0..n_alpha {
        occ[spin_orbital(p, 0)] = true;
    }
    for p in 0..n_beta {
        occ[spin_orbital(p, 1)] = true;
    }
    occ
}

/// Spin-allowed singles and doubles out of the reference.
pub fn enumerate_excitations(occ: &[bool]) -> (Vec<Excitation>, Vec<Excitation>) {
    let occupied: Vec<usize> = (0..occ.len()).filter(|&p| occ[p]).collect();
    let virtuals: Vec<usize> = (0..occ.len()).filter(|&p| !occ[p]).collect();
    let mut singles = Vec::new();
    for &i in &occupied {
        for &a in &virtuals {
            if i % 2 == a % 2 {
                singles.push(Excitation::Single { from: i, to: a });
            }
        }
    }
    let mut doubles = Vec::new();
    for (x, &i) in occupied.iter().enumerate() {
        for &j in &occupied[x + 1..] {
            for (y, &a) in virtuals.iter().enumerate() {
                for &b in &virtuals[y + 1..] {
                    let spin_in = i % 2 + j % 2;
                    let spin_out = a % 2 + b % 2;
                    if spin_in == spin_out {
                        doubles.push(Excitation::Double { from: [i, j], to: [a, b] });
                    }
                }
            }
        }
    }
    (singles, doubles)
}

/// Spin-orbital Fock matrix of the reference determinant, row-major.
pub fn fock_matrix(ints: &MolecularIntegrals) -> Vec<f64> {
    let n = ints.n_spatial();
    let occ = reference_occupation(n, ints.n_alpha(), ints.n_beta());
    let m = 2 * n;
    let mut f = vec![0.0; m * m];
    for p in 0..m {
        for q in 0..m {
            if p % 2 != q % 2 {
                continue;
            }
            let (ps, qs) = (p / 2, q / 2);
            let mut v = ints.h1(ps, qs);
            for i in (0..m).filter(|&i| occ[i]) {
                let is = i / 2;
                v += ints.h2(ps, qs, is, is);
                if i % 2 == p % 2 {
                    v -= ints.h2(ps, is, is, qs);
                }
            }
            f[p * m + q] = v;
        }
    }
    f
}

/// MP2 first-order amplitudes keyed by excitation.
#[derive(Debug, Clone)]
pub struct Mp2Amplitudes {
    pub amplitudes: Vec<(Excitation, f64)>,
    /// Spin-orbital energies used in the denominators.
    pub orbital_energies: Vec<f64>,
    /// False when the Fock matrix built from the integrals is not diagonal.
    pub canonical: bool,
}

impl Mp2Amplitudes {
    pub fn get(&self, ex: &Excitation) -> f64 {
        self.amplitudes
            .iter()
            .find(|(e, _)| e == ex)
            .map_or(0.0, |(_, t)| *t)
    }

    /// Doubles by descending |t|, then singles; ties keep enumeration order.
    pub fn ordered(&self) -> Vec<(Excitation, f64)> {
        let mut out = self.amplitudes.clone();
        out.sort_by(|a, b| {
            b.0.is_double()
                .cmp(&a.0.is_double())
                .then(b.1.abs().total_cmp(&a.1.abs()))
        });
        out
    }

    /// Second-order correlation energy `¼ Σ |<ij||ab>|² / D`.
    pub fn correlation_energy(&self, ints: &MolecularIntegrals) -> f64 {
        self.amplitudes
            .iter()
            .filter_map(|(ex, t)| match *ex {
                Excitation::Double { from, to } => {
                    Some(t * antisymmetrized(ints, from[0], from[1], to[0], to[1]))
                }
                _ => None,
            })
            .sum()
    }
}

/// `<pq||rs>` over interleaved spin orbitals.
pub fn antisymmetrized(ints: &MolecularIntegrals, p: usize, q: usize, r: usize, s: usize) -> f64 {
    let direct = |p: usize, q: usize, r: usize, s: usize| {
        if p % 2 == r % 2 && q % 2 == s % 2 {
            ints.h2(p / 2, r / 2, q / 2, s / 2)
        } else {
            0.0
        }
    };
    direct(p, q, r, s) - direct(p, q, s, r)
}

/// First-order amplitudes `t = <ij||ab> / (e_i + e_j - e_a - e_b)`.
///
/// Orbital energies come from the integrals when present and otherwise
/// from the Fock diagonal of the reference determinant.
pub fn mp2_amplitudes(ints: &MolecularIntegrals) -> Result<Mp2Amplitudes> {
    let n = ints.n_spatial();
    let m = 2 * n;
    let fock = fock_matrix(ints);
    let off_diag = (0..m)
        .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
        .map(|(p, q)| fock[p * m + q].abs())
        .fold(0.0, f64::max);
    let canonical = off_diag < CANONICAL_TOL;
    if !canonical {
        log::warn!("non-canonical orbitals: largest off-diagonal Fock element {off_diag:e}");
    }
    let eps: Vec<f64> = match &ints.orbital_energies {
        Some(e) => (0..m).map(|p| e[p / 2]).collect(),
        None => (0..m).map(|p| fock[p * m + p]).collect(),
    };

    let occ = reference_occupation(n, ints.n_alpha(), ints.n_beta());
    let (singles, doubles) = enumerate_excitations(&occ);
    let mut amplitudes = Vec::with_capacity(singles.len() + doubles.len());
    for ex in doubles {
        let Excitation::Double { from: [i, j], to: [a, b] } = ex else {
            unreachable!()
        };
        let d = eps[i] + eps[j] - eps[a] - eps[b];
        if d.abs() < DENOMINATOR_FLOOR {
            return Err(Error::Mp2Degeneracy(ex.to_string()));
        }
        amplitudes.push((ex, antisymmetrized(ints, i, j, a, b) / d));
    }
    amplitudes.extend(singles.into_iter().map(|ex| (ex, 0.0)));
    Ok(Mp2Amplitudes {
        amplitudes,
        orbital_energies: eps,
        canonical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_orbital(v: f64, gap: f64) -> MolecularIntegrals {
        let mut ints = MolecularIntegrals::new(2, 2, 0).unwrap();
        ints.set_h2(0, 1, 0, 1, v);
        ints.orbital_energies = Some(vec![-gap / 2.0, gap / 2.0]);
        ints
    }

    #[test]
    fn zero_two_electron_tensor() {
        let mut ints = MolecularIntegrals::new(3, 2, 0).unwrap();
        ints.set_h1(0, 0, -1.0);
        ints.set_h1(1, 1, 0.2);
        ints.set_h1(2, 2, 0.5);
        let mp2 = mp2_amplitudes(&ints).unwrap();
        assert!(mp2.canonical);
        assert!(mp2.amplitudes.iter().all(|(_, t)| *t == 0.0));
    }

    #[test]
    fn two_orbital_toy() {
        let (v, gap) = (0.18, 1.3);
        let mp2 = mp2_amplitudes(&two_orbital(v, gap)).unwrap();
        let doubles: Vec<_> = mp2.amplitudes.iter().filter(|(e, _)| e.is_double()).collect();
        assert_eq!(doubles.len(), 1);
        let expect = v / (2.0 * -gap);
        assert!((doubles[0].1 - expect).abs() < 1e-15);
        assert_eq!(doubles[0].0, Excitation::Double { from: [0, 1], to: [2, 3] });
    }

    #[test]
    fn degenerate_denominator_names_excitation() {
        let err = mp2_amplitudes(&two_orbital(0.1, 0.0)).unwrap_err();
        assert!(err.to_string().contains("0,1->2,3"), "{err}");
    }

    #[test]
    fn fock_diagonal_for_closed_shell() {
        let mut ints = MolecularIntegrals::new(2, 2, 0).unwrap();
        ints.set_h1(0, 0, -1.2);
        ints.set_h1(1, 1, -0.4);
        ints.set_h2(0, 0, 0, 0, 0.7);
        ints.set_h2(0, 0, 1, 1, 0.6);
        ints.set_h2(0, 1, 0, 1, 0.2);
        let f = fock_matrix(&ints);
        assert!((f[0] - (-1.2 + 0.7)).abs() < 1e-15);
        assert!((f[2 * 4 + 2] - (-0.4 + 2.0 * 0.6 - 0.2)).abs() < 1e-15);
    }

    #[test]
    fn excitation_counts() {
        let occ = reference_occupation(4, 2, 2);
        let (s, d) = enumerate_excitations(&occ);
        assert_eq!(s.len(), 8);
        // αα + ββ + αβ doubles.
        assert_eq!(d.len(), 1 + 1 + 16);
    }

    #[test]
    fn ordering_puts_singles_last() {
        let mp2 = Mp2Amplitudes {
            amplitudes: vec![
                (Excitation::Single { from: 0, to: 2 }, 0.0),
                (Excitation::Double { from: [0, 1], to: [2, 3] }, -0.01),
                (Excitation::Double { from: [0, 1], to: [4, 5] }, 0.3),
            ],
            orbital_energies: vec![],
            canonical: true,
        };
        let o = mp2.ordered();
        assert_eq!(o[0].1, 0.3);
        assert_eq!(o[1].1, -0.01);
        assert!(!o[2].0.is_double());
    }
}

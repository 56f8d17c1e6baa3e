//! Determinant-basis full configuration interaction.
//!
//! Works directly from spatial integrals with spin-summed excitation
//! operators, so it shares no code with the fermion or qubit layers it is
//! used to check.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::eigen::davidson;
use crate::error::{Error, Result};
use crate::hamiltonian::MolecularIntegrals;

/// Largest space handled by dense diagonalization.
pub const DENSE_LIMIT: usize = 4096;
/// Largest space handled at all.
pub const SPARSE_LIMIT: usize = 1_000_000;

const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FciResult {
    /// Lowest eigenvalues in ascending order, nuclear repulsion included.
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `(alpha string, beta string)` per basis index.
    pub determinants: Vec<(u64, u64)>,
    pub residuals: Vec<f64>,
}

impl FciResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_vector(&self) -> &[f64] {
        &self.vectors[0]
    }
}

/// All `k`-bit strings over `n` bits in ascending numeric order.
fn strings(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut s: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while s < limit {
        out.push(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `E_pq` images of each string: `(p*n + q, target index, sign)`.
fn single_lists(strs: &[u64], n: usize) -> Vec<Vec<(usize, usize, f64)>> {
    let index: HashMap<u64, usize> = strs.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    strs.iter()
        .map(|&s| {
            let mut out = Vec::new();
            for q in (0..n).filter(|&q| (s >> q) & 1 == 1) {
                for p in 0..n {
                    if p == q {
                        out.push((p * n + q, index[&s], 1.0));
                    } else if (s >> p) & 1 == 0 {
                        let t = (s ^ (1 << q)) | (1 << p);
                        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
                        let between = s & (((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1));
                        let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        out.push((p * n + q, index[&t], sign));
                    }
                }
            }
            out
        })
        .collect()
}

/// Matrix-free Hamiltonian over the `(n_alpha, n_beta)` determinant space.
pub struct DeterminantSpace<'a> {
    ints: &'a MolecularIntegrals,
    n: usize,
    alpha: Vec<u64>,
    beta: Vec<u64>,
    alpha_singles: Vec<Vec<(usize, usize, f64)>>,
    beta_singles: Vec<Vec<(usize, usize, f64)>>,
    k_eff: Vec<f64>,
}

impl<'a> DeterminantSpace<'a> {
    pub fn new(ints: &'a MolecularIntegrals) -> Result<Self> {
        let n = ints.n_spatial();
        if n > 63 {
            return Err(Error::Capacity(format!("{n} orbitals exceed the string width")));
        }
        let dim = binomial(n, ints.n_alpha()).saturating_mul(binomial(n, ints.n_beta()));
        if dim > SPARSE_LIMIT as u128 {
            return Err(Error::Capacity(format!(
                "determinant space of dimension {dim} exceeds {SPARSE_LIMIT}"
            )));
        }
        let alpha = strings(n, ints.n_alpha());
        let beta = strings(n, ints.n_beta());
        let mut k_eff = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                k_eff[p * n + q] =
                    ints.h1(p, q) - 0.5 * (0..n).map(|r| ints.h2(p, r, r, q)).sum::<f64>();
            }
        }
        Ok(DeterminantSpace {
            ints,
            n,
            alpha_singles: single_lists(&alpha, n),
            beta_singles: single_lists(&beta, n),
            alpha,
            beta,
            k_eff,
        })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    pub fn determinants(&self) -> Vec<(u64, u64)> {
        self.alpha
            .iter()
            .flat_map(|&a| self.beta.iter().map(move |&b| (a, b)))
            .collect()
    }

    fn singles(&self, det: usize, mut f: impl FnMut(usize, usize, f64)) {
        let nb = self.beta.len();
        let (ia, ib) = (det / nb, det % nb);
        for &(pq, t, s) in &self.alpha_singles[ia] {
            f(pq, t * nb + ib, s);
        }
        for &(pq, t, s) in &self.beta_singles[ib] {
            f(pq, ia * nb + t, s);
        }
    }

    /// Visit nonzero `H[i][j]` of column `j` (entries may repeat).
    pub fn column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        let n = self.n;
        f(j, self.ints.e_nuclear);
        self.singles(j, |rs, k, s1| {
            f(k, self.k_eff[rs] * s1);
            let (r, s) = (rs / n, rs % n);
            self.singles(k, |pq, i, s2| {
                let v = self.ints.h2(pq / n, pq % n, r, s);
                if v != 0.0 {
                    f(i, 0.5 * v * s1 * s2);
                }
            });
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .into_par_iter()
            .map(|j| {
                let mut d = 0.0;
                self.column(j, |i, v| {
                    if i == j {
                        d += v
                    }
                });
                d
            })
            .collect()
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                self.column(i, |j, v| acc += v * c[j]);
                acc
            })
            .collect()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            self.column(j, |i, v| h[(i, j)] += v);
        }
        h
    }
}

/// Lowest `k` eigenpairs in the fixed-`(n_alpha, n_beta)` determinant space.
pub fn fci_solve(ints: &MolecularIntegrals, k: usize) -> Result<FciResult> {
    ints.validate()?;
    let space = DeterminantSpace::new(ints)?;
    let dim = space.dim();
    if dim == 0 {
        return Err(Error::InvalidProblem("empty determinant space".into()));
    }
    let k = k.clamp(1, dim);
    let (energies, vectors) = if dim <= DENSE_LIMIT {
        let eig = SymmetricEigen::new(space.dense());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = order[..k]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        (vals, vecs)
    } else {
        let diag = space.diagonal();
        davidson(|v| space.apply(v), &diag, k, RESIDUAL_TOL, 400)?
    };
    let residuals = energies
        .iter()
        .zip(&vectors)
        .map(|(e, v): (&f64, &Vec<f64>)| {
            let hv = space.apply(v);
            hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    Ok(FciResult {
        energies,
        vectors,
        determinants: space.determinants(),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_enumeration() {
        assert_eq!(strings(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(strings(3, 0), vec![0]);
        assert!(strings(2, 3).is_empty());
    }

    #[test]
    fn one_electron_one_orbital() {
        let mut ints = MolecularIntegrals::new(1, 1, 1).unwrap();
        ints.set_h1(0, 0, -0.7);
        ints.e_nuclear = 0.2;
        let r = fci_solve(&ints, 1).unwrap();
        assert!((r.ground_energy() - (-0.5)).abs() < 1e-14);
    }

    #[test]
    fn two_electrons_one_orbital() {
        let mut ints = MolecularIntegrals::new(1, 2, 0).unwrap();
        ints.set_h1(0, 0, -1.0);
        ints.set_h2(0, 0, 0, 0, 0.6);
        let r = fci_solve(&ints, 1).unwrap();
        assert!((r.ground_energy() - (-2.0 + 0.6)).abs() < 1e-14);
    }

    #[test]
    fn two_site_hubbard_closed_form() {
        // t hopping, U on-site: E0 = (U - sqrt(U^2 + 16 t^2)) / 2.
        let (t, u) = (1.0, 2.5);
        let mut ints = MolecularIntegrals::new(2, 2, 0).unwrap();
        ints.set_h1(0, 1, -t);
        ints.set_h2(0, 0, 0, 0, u);
        ints.set_h2(1, 1, 1, 1, u);
        let r = fci_solve(&ints, 2).unwrap();
        let e0 = (u - (u * u + 16.0 * t * t).sqrt()) / 2.0;
        assert!((r.ground_energy() - e0).abs() < 1e-12);
        assert!(r.residuals.iter().all(|&x| x < 1e-9));
    }

    #[test]
    fn capacity_is_enforced() {
        let ints = MolecularIntegrals::new(40, 20, 0).unwrap();
        assert!(matches!(fci_solve(&ints, 1), Err(Error::Capacity(_))));
    }
}

//! Spin-orbital second-quantized Hamiltonian.

use super::integrals::MolecularIntegrals;
use crate::error::{Error, Result};

/// Spin-orbital layout of a [`FermionHamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinOrdering {
    /// α0, β0, α1, β1, …
    Interleaved,
}

/// Spin-orbital index of spatial orbital `p` with spin `sigma` (0 = α, 1 = β).
#[inline]
pub fn spin_orbital(p: usize, sigma: usize) -> usize {
    2 * p + sigma
}

/// `H = c + Σ h_pq a†p aq + ½ Σ h_pqrs a†p a†q ar as`.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionHamiltonian {
    pub constant: f64,
    n_modes: usize,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    pub ordering: SpinOrdering,
    pub n_electrons: usize,
    pub two_ms: i32,
}

impl FermionHamiltonian {
    /// Empty operator on `n_modes` spin orbitals.
    pub fn zeros(n_modes: usize) -> Self {
        FermionHamiltonian {
            constant: 0.0,
            n_modes,
            one_body: vec![0.0; n_modes * n_modes],
            two_body: vec![0.0; n_modes.pow(4)],
            ordering: SpinOrdering::Interleaved,
            n_electrons: 0,
            two_ms: 0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    #[inline]
    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_modes + q]
    }

    #[inline]
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_modes;
        self.two_body[((p * n + q) * n + r) * n + s]
    }

    pub fn set_one_body(&mut self, p: usize, q: usize, v: f64) {
        self.one_body[p * self.n_modes + q] = v;
    }

    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_modes;
        self.two_body[((p * n + q) * n + r) * n + s] = v;
    }

    /// Check that the operator equals its adjoint.
    ///
    /// Real coefficients make this `h_pq = h_qp` and `h_pqrs = h_srqp`.
    pub fn check_hermitian(&self) -> Result<()> {
        let n = self.n_modes;
        for p in 0..n {
            for q in 0..n {
                let d = self.one_body(p, q) - self.one_body(q, p);
                if d.abs() > 1e-12 {
                    return Err(Error::NonHermitian {
                        term: format!("one-body ({p},{q})"),
                        coeff: format!("{d:e}"),
                    });
                }
                for r in 0..n {
                    for s in 0..n {
                        let d = self.two_body(p, q, r, s) - self.two_body(s, r, q, p);
                        if d.abs() > 1e-12 {
                            return Err(Error::NonHermitian {
                                term: format!("two-body ({p},{q},{r},{s})"),
                                coeff: format!("{d:e}"),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Nonzero one-body entries `(p, q, h_pq)`.
    pub fn one_body_terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_modes;
        (0..n * n)
            .map(move |i| (i / n, i % n, self.one_body[i]))
            .filter(|t| t.2 != 0.0)
    }

    /// Nonzero two-body entries `(p, q, r, s, h_pqrs)`.
    pub fn two_body_terms(&self) -> impl Iterator<Item = (usize, usize, usize, usize, f64)> + '_ {
        let n = self.n_modes;
        (0..n.pow(4))
            .filter(move |&i| self.two_body[i] != 0.0)
            .map(move |i| (i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n, self.two_body[i]))
    }
}

/// Expand spatial integrals to spin orbitals in physicists' ordering.
///
/// `h_pqrs = (ps|qr)` with spin conserved along p→s and q→r.
pub fn to_fermion_hamiltonian(ints: &MolecularIntegrals) -> Result<FermionHamiltonian> {
    ints.validate()?;
    let n = ints.n_spatial();
    let mut h = FermionHamiltonian::zeros(2 * n);
    h.constant = ints.e_nuclear;
    h.n_electrons = ints.n_electrons();
    h.two_ms = ints.two_ms();
    for p in 0..n {
        for q in 0..n {
            let v = ints.h1(p, q);
            for s in 0..2 {
                h.set_one_body(spin_orbital(p, s), spin_orbital(q, s), v);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.h2(p, s, q, r);
                    if v == 0.0 {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            h.set_two_body(
                                spin_orbital(p, a),
                                spin_orbital(q, b),
                                spin_orbital(r, b),
                                spin_orbital(s, a),
                                v,
                            );
                        }
                    }
                }
            }
        }
    }
    h.check_hermitian()?;
    Ok(h)
}

//! Frozen-core contraction and virtual-orbital removal.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::integrals::MolecularIntegrals;
use crate::error::{Error, Result};

/// Orbitals (0-based spatial indices) to freeze or drop.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSpace {
    #[serde(default)]
    pub frozen: Vec<usize>,
    #[serde(default)]
    pub removed: Vec<usize>,
}

impl ActiveSpace {
    pub fn new(frozen: Vec<usize>, removed: Vec<usize>) -> Self {
        ActiveSpace { frozen, removed }
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty() && self.removed.is_empty()
    }

    /// Active spatial orbitals of an `n_spatial`-orbital system, in order.
    pub fn active_orbitals(&self, n_spatial: usize) -> Vec<usize> {
        (0..n_spatial)
            .filter(|p| !self.frozen.contains(p) && !self.removed.contains(p))
            .collect()
    }

    pub fn n_active_spatial(&self, n_spatial: usize) -> usize {
        self.active_orbitals(n_spatial).len()
    }

    pub fn n_active_electrons(&self, n_electrons: usize) -> usize {
        n_electrons.saturating_sub(2 * self.frozen.len())
    }

    fn validate(&self, ints: &MolecularIntegrals) -> Result<()> {
        let n = ints.n_spatial();
        let frozen: BTreeSet<_> = self.frozen.iter().copied().collect();
        let removed: BTreeSet<_> = self.removed.iter().copied().collect();
        if frozen.len() != self.frozen.len() || removed.len() != self.removed.len() {
            return Err(Error::InvalidActiveSpace("repeated orbital index".into()));
        }
        if let Some(&p) = frozen.iter().chain(&removed).find(|&&p| p >= n) {
            return Err(Error::InvalidActiveSpace(format!(
                "orbital {p} out of range for {n} orbitals"
            )));
        }
        if let Some(p) = frozen.intersection(&removed).next() {
            return Err(Error::InvalidActiveSpace(format!(
                "orbital {p} both frozen and removed"
            )));
        }
        // Reference: lowest n_beta doubly occupied, next n_alpha - n_beta singly.
        let n_docc = ints.n_beta();
        if let Some(&p) = removed.iter().find(|&&p| p < ints.n_alpha()) {
            return Err(Error::CannotRemoveOccupied(p));
        }
        if let Some(&p) = frozen.iter().find(|&&p| p >= n_docc) {
            return Err(Error::InvalidActiveSpace(format!(
                "frozen orbital {p} is not doubly occupied in the reference"
            )));
        }
        let active = self.active_orbitals(n);
        if let (Some(&fmax), Some(&amin)) = (frozen.iter().next_back(), active.first()) {
            if fmax > amin {
                return Err(Error::InvalidActiveSpace(format!(
                    "frozen orbital {fmax} lies above active orbital {amin}"
                )));
            }
        }
        Ok(())
    }
}

/// Fold frozen orbitals into the constant and one-body terms and drop
/// removed virtuals.
pub fn apply_active_space(ints: &MolecularIntegrals, space: &ActiveSpace) -> Result<MolecularIntegrals> {
    space.validate(ints)?;
    if space.is_empty() {
        return Ok(ints.clone());
    }
    let active = space.active_orbitals(ints.n_spatial());
    let f = &space.frozen;
    let n_act = active.len();
    let mut out = MolecularIntegrals::new(
        n_act,
        space.n_active_electrons(ints.n_electrons()),
        ints.two_ms(),
    )?;

    let mut core = 0.0;
    for &a in f {
        core += 2.0 * ints.h1(a, a);
        for &b in f {
            core += 2.0 * ints.h2(a, a, b, b) - ints.h2(a, b, b, a);
        }
    }
    out.e_nuclear = ints.e_nuclear + core;

    for (i, &p) in active.iter().enumerate() {
        for (j, &q) in active.iter().enumerate().take(i + 1) {
            let mut v = ints.h1(p, q);
            for &c in f {
                v += 2.0 * ints.h2(p, q, c, c) - ints.h2(p, c, c, q);
            }
            out.set_h1(i, j, v);
        }
    }
    for (i, &p) in active.iter().enumerate() {
        for (j, &q) in active.iter().enumerate() {
            for (k, &r) in active.iter().enumerate() {
                for (l, &s) in active.iter().enumerate() {
                    out.set_h2(i, j, k, l, ints.h2(p, q, r, s));
                }
            }
        }
    }
    out.orbital_energies = ints
        .orbital_energies
        .as_ref()
        .map(|e| active.iter().map(|&p| e[p]).collect());
    Ok(out)
}

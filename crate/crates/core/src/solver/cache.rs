//! Content-addressed on-disk store for FCI energies.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fci::fci_solve;
use crate::error::{Error, Result};
use crate::hamiltonian::MolecularIntegrals;
use crate::report::sha256_hex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Entry {
    energies: Vec<f64>,
    residuals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FciCache {
    dir: PathBuf,
}

impl FciCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<FciCache> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(FciCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Key over the exact integrals (as serialized) and the root count.
    pub fn key(ints: &MolecularIntegrals, k: usize) -> String {
        sha256_hex(format!("fci-v1 k={k}\n{}", ints.to_fcidump()).as_bytes())
    }

    /// Lowest `k` energies, from the store when present.
    pub fn energies(&self, ints: &MolecularIntegrals, k: usize) -> Result<Vec<f64>> {
        let path = self.dir.join(format!("{}.json", FciCache::key(ints, k)));
        if let Ok(text) = std::fs::read_to_string(&path) {
            match serde_json::from_str::<Entry>(&text) {
                Ok(e) => return Ok(e.energies),
                Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
            }
        }
        let r = fci_solve(ints, k)?;
        let entry = Entry { energies: r.energies.clone(), residuals: r.residuals };
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(&entry).expect("entry serializes");
        std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(r.energies)
    }
}

//! Fixture-set sidecar metadata.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::active_space::ActiveSpace;
use super::integrals::{parse_fcidump, MolecularIntegrals};
use crate::error::{Error, Result};
use crate::report::sha256_hex;

pub const MANIFEST_NAME: &str = "manifest.toml";

#[derive(Debug, Clone, Deserialize)]
pub struct FixtureEntry {
    pub file: String,
    pub geometry: Vec<f64>,
    #[serde(default)]
    pub sha256: Option<String>,
    #[serde(default)]
    pub reference_fci: Option<f64>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, toml::Value>,
}

impl FixtureEntry {
    pub fn extra_f64(&self, key: &str) -> Option<f64> {
        self.extra.get(key).and_then(toml::Value::as_float)
    }

    pub fn extra_indices(&self, key: &str) -> Option<Vec<usize>> {
        self.extra.get(key)?.as_array().map(|a| {
            a.iter()
                .filter_map(|v| v.as_integer().map(|i| i as usize))
                .collect()
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct FixtureManifest {
    pub molecule: String,
    pub basis: String,
    #[serde(default = "default_convention")]
    pub convention: String,
    #[serde(default)]
    pub geometry_unit: String,
    #[serde(default)]
    pub generator: String,
    #[serde(default)]
    pub atoms: Vec<String>,
    #[serde(default)]
    pub active_space: ActiveSpace,
    #[serde(default, rename = "fixture")]
    pub fixtures: Vec<FixtureEntry>,
}

fn default_convention() -> String {
    "chemist".into()
}

/// Directory of FCIDUMP files described by a `manifest.toml`.
#[derive(Debug, Clone)]
pub struct FixtureSet {
    pub dir: PathBuf,
    pub manifest: FixtureManifest,
}

impl FixtureSet {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: FixtureManifest = toml::from_str(&text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            msg: format!("{}: {}", path.display(), e.message()),
        })?;
        if manifest.convention != "chemist" {
            return Err(Error::InvalidIntegrals(format!(
                "unsupported integral convention {:?}",
                manifest.convention
            )));
        }
        Ok(FixtureSet { dir, manifest })
    }

    pub fn entries(&self) -> &[FixtureEntry] {
        &self.manifest.fixtures
    }

    pub fn path_of(&self, entry: &FixtureEntry) -> PathBuf {
        self.dir.join(&entry.file)
    }

    /// Entry whose geometry matches within 1e-9.
    pub fn entry_at(&self, geometry: &[f64]) -> Result<&FixtureEntry> {
        self.entries()
            .iter()
            .find(|e| {
                e.geometry.len() == geometry.len()
                    && e.geometry.iter().zip(geometry).all(|(a, b)| (a - b).abs() < 1e-9)
            })
            .ok_or_else(|| {
                Error::MissingFixture(format!("{} has no geometry {geometry:?}", self.dir.display()))
            })
    }

    /// Entries for each requested geometry, listing every gap on failure.
    pub fn entries_for(&self, geometries: &[Vec<f64>]) -> Result<Vec<&FixtureEntry>> {
        let mut missing = Vec::new();
        let mut found = Vec::new();
        for g in geometries {
            match self.entry_at(g) {
                Ok(e) => found.push(e),
                Err(_) => missing.push(format!("{g:?}")),
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingFixture(format!(
                "{} lacks geometries {}",
                self.dir.display(),
                missing.join(", ")
            )));
        }
        Ok(found)
    }

    /// Parsed integrals, after checking the recorded digest when present.
    pub fn integrals(&self, entry: &FixtureEntry) -> Result<MolecularIntegrals> {
        let path = self.path_of(entry);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        if let Some(want) = &entry.sha256 {
            let got = sha256_hex(text.as_bytes());
            if !got.eq_ignore_ascii_case(want) {
                return Err(Error::InvalidIntegrals(format!(
                    "{}: sha256 {got} does not match manifest {want}",
                    path.display()
                )));
            }
        }
        parse_fcidump(&text)
    }
}

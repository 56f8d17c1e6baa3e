//! Declarative experiment configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use wavemol::analysis::{AnsatzKind, EnergyMethod, MappingKind, VqeMethod};
use wavemol::backend::{default_assignment, NoiseModel};
use wavemol::hamiltonian::ActiveSpace;
use wavemol::mitigation::MitigationSettings;
use wavemol::solver::{OptimizerSettings, VqeBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Fci,
    VqeUccsd,
    VqeHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mapping {
    Jw,
    ParityTapered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Exact,
    Sampled,
    Noisy,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| ((self.start + self.step * i as f64) * 1e6).round() / 1e6).collect()
    }
}

/// Geometries to visit. Everything unset means every fixture in the set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub r: Option<Range>,
    pub angle: Option<Range>,
    pub points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    /// Atomic masses in amu; defaults to the manifest's first two atoms.
    pub masses: Option<[f64; 2]>,
    /// Frequency that `omega_err_pct` is measured against.
    pub reference_omega: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub starts: Option<usize>,
    pub perturbation: Option<f64>,
    pub max_iter: Option<usize>,
    pub ftol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub fixtures: PathBuf,
    pub method: Method,
    #[serde(default = "default_mapping")]
    pub mapping: Mapping,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    pub noise: Option<PathBuf>,
    /// Physical qubit for each logical qubit; defaults to 0, 1, 2, ….
    pub assignment: Option<Vec<usize>>,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub folds: Option<Vec<usize>>,
    pub repetitions: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub active_space: Option<ActiveSpace>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_true")]
    pub include_singles: bool,
    #[serde(default = "default_true")]
    pub readout_mitigation: bool,
    /// Directory for cached FCI energies.
    pub fci_cache: Option<PathBuf>,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub fit: FitSpec,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
}

fn default_mapping() -> Mapping {
    Mapping::ParityTapered
}
fn default_backend() -> Backend {
    Backend::Exact
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_layers() -> usize {
    1
}
fn default_true() -> bool {
    true
}

/// Command-line values that replace config fields.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub mapping: Option<Mapping>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub folds: Option<Vec<usize>>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Field-level validation failure.
#[derive(Debug)]
pub struct Invalid(pub Vec<String>);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "invalid config: {m}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Invalid {}

impl ExperimentConfig {
    /// Parses `text`; relative paths are taken from `base`.
    pub fn parse(text: &str, base: &Path) -> Result<ExperimentConfig, Invalid> {
        let mut c: ExperimentConfig = toml::from_str(text).map_err(|e| Invalid(vec![e.message().to_string()]))?;
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut c.fixtures);
        rebase(&mut c.output);
        if let Some(p) = c.noise.as_mut() {
            rebase(p);
        }
        if let Some(p) = c.fci_cache.as_mut() {
            rebase(p);
        }
        Ok(c)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.fixtures {
            self.fixtures = v.clone();
        }
        if let Some(v) = o.method {
            self.method = v;
        }
        if let Some(v) = o.mapping {
            self.mapping = v;
        }
        if let Some(v) = o.backend {
            self.backend = v;
        }
        if let Some(v) = &o.noise {
            self.noise = Some(v.clone());
        }
        if let Some(v) = o.shots {
            self.shots = Some(v);
        }
        if let Some(v) = o.seed {
            self.seed = Some(v);
        }
        if let Some(v) = &o.folds {
            self.folds = Some(v.clone());
        }
        if let Some(v) = o.repetitions {
            self.repetitions = Some(v);
        }
        if let Some(v) = &o.output {
            self.output = v.clone();
        }
    }

    pub fn validate(&self) -> Result<(), Invalid> {
        let mut errs = Vec::new();
        if !self.fixtures.join("manifest.toml").is_file() {
            errs.push(format!("fixtures: no manifest.toml in {}", self.fixtures.display()));
        }
        let vqe = self.method != Method::Fci;
        if !vqe && self.backend != Backend::Exact {
            errs.push("backend: the fci method runs on the exact backend only".into());
        }
        if self.backend != Backend::Exact {
            if self.shots.is_none() {
                errs.push("shots: required for the sampled and noisy backends".into());
            }
            if self.seed.is_none() {
                errs.push("seed: required for the sampled and noisy backends".into());
            }
        }
        if self.shots == Some(0) {
            errs.push("shots: must be positive".into());
        }
        if self.backend == Backend::Noisy {
            match &self.noise {
                None => errs.push("noise: required for the noisy backend".into()),
                Some(p) if !p.is_file() => errs.push(format!("noise: file not found: {}", p.display())),
                _ => {}
            }
        }
        if let Some(f) = &self.folds {
            if self.backend != Backend::Noisy {
                errs.push("folds: only meaningful with the noisy backend".into());
            }
            if f.len() < 2 {
                errs.push("folds: need at least two fold factors".into());
            }
            if let Some(bad) = f.iter().find(|k| **k % 2 == 0) {
                errs.push(format!("folds: {bad} is not an odd positive integer"));
            }
        }
        if self.repetitions == Some(0) {
            errs.push("repetitions: must be positive".into());
        }
        if self.method == Method::VqeHeuristic && self.layers == 0 {
            errs.push("layers: must be at least 1".into());
        }
        for (name, r) in [("scan.r", &self.scan.r), ("scan.angle", &self.scan.angle)] {
            if let Some(r) = r {
                if !(r.step > 0.0) || r.stop < r.start {
                    errs.push(format!("{name}: need step > 0 and stop ≥ start"));
                }
            }
        }
        if self.scan.angle.is_some() && self.scan.r.is_none() {
            errs.push("scan.angle: needs scan.r as well".into());
        }
        if errs.is_empty() { Ok(()) } else { Err(Invalid(errs)) }
    }

    /// Explicit geometries, or `None` for every fixture.
    pub fn geometries(&self) -> Option<Vec<Vec<f64>>> {
        if let Some(p) = &self.scan.points {
            return Some(p.clone());
        }
        let r = self.scan.r.as_ref()?.values();
        Some(match &self.scan.angle {
            None => r.into_iter().map(|x| vec![x]).collect(),
            Some(a) => {
                let a = a.values();
                r.iter().flat_map(|x| a.iter().map(move |y| vec![*x, *y])).collect()
            }
        })
    }

    pub fn is_noisy(&self) -> bool {
        self.backend == Backend::Noisy
    }

    pub fn mitigation(&self) -> Option<MitigationSettings> {
        (self.is_noisy() && self.folds.is_some()).then(|| MitigationSettings {
            folds: self.folds.clone().unwrap(),
            shots: self.shots.unwrap_or(10_000),
            repetitions: self.repetitions.unwrap_or(10),
            seed: self.seed.unwrap_or(0),
            readout_mitigation: self.readout_mitigation,
            calibration_shots: None,
        })
    }

    pub fn energy_method(&self) -> wavemol::Result<EnergyMethod> {
        let ansatz = match self.method {
            Method::Fci => return Ok(EnergyMethod::Fci),
            Method::VqeUccsd => AnsatzKind::Uccsd { include_singles: self.include_singles },
            Method::VqeHeuristic => AnsatzKind::Heuristic { layers: self.layers },
        };
        let seed = self.seed.unwrap_or(0);
        let backend = match self.backend {
            Backend::Exact => VqeBackend::Exact,
            Backend::Sampled => VqeBackend::Sampled { shots: self.shots.unwrap_or(10_000), seed },
            Backend::Noisy => {
                let noise = NoiseModel::from_file(self.noise.as_deref().expect("validated"))?;
                VqeBackend::Noisy {
                    noise,
                    assignment: self.assignment.clone().unwrap_or_default(),
                    // Optimization sees the infinite-shot energy; shots apply
                    // to the fold evaluation.
                    shots: if self.folds.is_some() { None } else { self.shots },
                    seed,
                }
            }
        };
        let mut settings = match ansatz {
            AnsatzKind::Uccsd { .. } => OptimizerSettings::uccsd(),
            AnsatzKind::Heuristic { .. } => OptimizerSettings::heuristic(),
        };
        settings.seed = seed;
        let o = &self.optimizer;
        if let Some(v) = o.starts {
            settings.n_starts = v;
        }
        if let Some(v) = o.perturbation {
            settings.perturbation = v;
        }
        if let Some(v) = o.max_iter {
            settings.max_iter = v;
        }
        settings.ftol = o.ftol.or(settings.ftol);
        Ok(EnergyMethod::Vqe(VqeMethod {
            ansatz,
            mapping: match self.mapping {
                Mapping::Jw => MappingKind::JordanWigner,
                Mapping::ParityTapered => MappingKind::ParityTapered,
            },
            backend,
            settings,
            mitigation: self.mitigation(),
        }))
    }
}

/// Fills in the default qubit assignment once the register width is known.
pub fn with_assignment(method: EnergyMethod, n_qubits: usize) -> EnergyMethod {
    match method {
        EnergyMethod::Vqe(mut m) => {
            if let VqeBackend::Noisy { assignment, .. } = &mut m.backend {
                if assignment.is_empty() {
                    *assignment = default_assignment(n_qubits);
                }
            }
            EnergyMethod::Vqe(m)
        }
        other => other,
    }
}

//! Potential-energy curves and fixture-driven scans.

use rayon::prelude::*;

use crate::backend::NoiseModel;
use crate::circuits::{build_heuristic, build_uccsd, Circuit, UccsdSpec};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    apply_active_space, mp2_amplitudes, reference_occupation, to_fermion_hamiltonian, ActiveSpace,
    FixtureSet, MolecularIntegrals,
};
use crate::mitigation::{run_mitigated_vqe_point, MitigatedPoint, MitigationSettings};
use crate::qubit_map::{jordan_wigner, parity_map, taper_z2, PauliSum, QubitMapping};
use crate::report::fmt12;
use crate::solver::{fci_solve, point_seed, vqe_minimize, FciCache, OptimizerSettings, VqeBackend, VqeProblem, VqeResult};

#[derive(Debug, Clone, PartialEq)]
pub struct PesCurve {
    /// `basis(Ne,Norb)/method`.
    pub label: String,
    pub geometry: Vec<f64>,
    pub energies: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

impl PesCurve {
    pub fn new(
        label: impl Into<String>,
        geometry: Vec<f64>,
        energies: Vec<f64>,
        stderr: Option<Vec<f64>>,
    ) -> Result<PesCurve> {
        let c = PesCurve { label: label.into(), geometry, energies, stderr };
        c.validate()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.geometry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCurve(m));
        if self.energies.len() != self.geometry.len() {
            return bad(format!("{} geometries but {} energies", self.geometry.len(), self.energies.len()));
        }
        if let Some(s) = &self.stderr {
            if s.len() != self.geometry.len() {
                return bad("uncertainty count differs from point count".into());
            }
        }
        if self.geometry.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("geometry values must increase strictly".into());
        }
        if let Some(e) = self.energies.iter().find(|e| !e.is_finite()) {
            return bad(format!("non-finite energy {e}"));
        }
        Ok(())
    }

    /// `geometry,energy,stderr`; stderr is empty for exact curves.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("geometry,energy,stderr\n");
        for i in 0..self.len() {
            let s = self.stderr.as_ref().map(|s| fmt12(s[i])).unwrap_or_default();
            out += &format!("{},{},{}\n", fmt12(self.geometry[i]), fmt12(self.energies[i]), s);
        }
        out
    }

    /// Reads the output of [`PesCurve::to_csv`]; `#` lines are skipped.
    pub fn from_csv(label: &str, text: &str) -> Result<PesCurve> {
        let mut geometry = Vec::new();
        let mut energies = Vec::new();
        let mut errs = Vec::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                header_seen = true;
                if line.starts_with("geometry") {
                    continue;
                }
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse { line: i + 1, msg: format!("bad number {s:?}") })
            };
            if cols.len() < 2 {
                return Err(Error::Parse { line: i + 1, msg: "expected geometry,energy[,stderr]".into() });
            }
            geometry.push(num(cols[0])?);
            energies.push(num(cols[1])?);
            match cols.get(2) {
                Some(s) if !s.is_empty() => errs.push(Some(num(s)?)),
                _ => errs.push(None),
            }
        }
        let stderr = if errs.iter().all(Option::is_some) && !errs.is_empty() {
            Some(errs.into_iter().map(Option::unwrap).collect())
        } else {
            None
        };
        PesCurve::new(label, geometry, energies, stderr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingKind {
    JordanWigner,
    ParityTapered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    Uccsd { include_singles: bool },
    Heuristic { layers: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeMethod {
    pub ansatz: AnsatzKind,
    pub mapping: MappingKind,
    pub backend: VqeBackend,
    pub settings: OptimizerSettings,
    /// Fold-and-extrapolate evaluation after optimization (noisy backend only).
    pub mitigation: Option<MitigationSettings>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnergyMethod {
    Fci,
    Vqe(VqeMethod),
}

impl EnergyMethod {
    pub fn name(&self) -> String {
        match self {
            EnergyMethod::Fci => "FCI".into(),
            EnergyMethod::Vqe(m) => {
                let a = match m.ansatz {
                    AnsatzKind::Uccsd { .. } => "UCCSD",
                    AnsatzKind::Heuristic { .. } => "heuristic",
                };
                match (&m.backend, &m.mitigation) {
                    (VqeBackend::Exact, _) => a.to_string(),
                    (VqeBackend::Sampled { .. }, _) => format!("{a}-sampled"),
                    (VqeBackend::Noisy { .. }, None) => format!("{a}-noisy"),
                    (VqeBackend::Noisy { .. }, Some(_)) => format!("{a}-noisy-zne"),
                }
            }
        }
    }
}

/// Qubit Hamiltonian and the mapping that produced it.
pub fn qubit_hamiltonian(ints: &MolecularIntegrals, mapping: MappingKind) -> Result<(PauliSum, QubitMapping)> {
    let h = to_fermion_hamiltonian(ints)?;
    let n_modes = h.n_modes();
    match mapping {
        MappingKind::JordanWigner => Ok((jordan_wigner(&h), QubitMapping::JordanWigner { n_modes })),
        MappingKind::ParityTapered => {
            let (tap, info) = taper_z2(&parity_map(&h), ints.n_electrons(), ints.two_ms())?;
            Ok((tap, QubitMapping::ParityTapered(info)))
        }
    }
}

/// Ansatz circuit and its default starting parameters.
pub fn build_ansatz(
    ints: &MolecularIntegrals,
    mapping: &QubitMapping,
    kind: AnsatzKind,
) -> Result<(Circuit, Vec<f64>)> {
    match kind {
        AnsatzKind::Uccsd { include_singles } => {
            let occ = reference_occupation(ints.n_spatial(), ints.n_alpha(), ints.n_beta());
            let mp2 = mp2_amplitudes(ints)?;
            let spec = UccsdSpec::from_mp2(&mp2, occ, include_singles);
            let c = build_uccsd(&spec, mapping)?;
            Ok((c, spec.initial_parameters()))
        }
        AnsatzKind::Heuristic { layers } => {
            let c = build_heuristic(mapping.n_qubits(), layers)?;
            let n = c.n_params();
            Ok((c, vec![0.0; n]))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub geometry: Vec<f64>,
    pub energy: f64,
    pub stderr: Option<f64>,
    /// FCI energy in the same active space.
    pub exact: f64,
    pub vqe: Option<VqeResult>,
    pub mitigated: Option<MitigatedPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PesScan {
    pub curve: PesCurve,
    pub points: Vec<ScanPoint>,
    pub n_electrons: usize,
    pub n_spin_orbitals: usize,
}

impl PesScan {
    /// FCI curve on the same grid.
    pub fn exact_curve(&self) -> Result<PesCurve> {
        PesCurve::new(
            self.curve.label.replace(&self.method_suffix(), "/FCI"),
            self.curve.geometry.clone(),
            self.points.iter().map(|p| p.exact).collect(),
            None,
        )
    }

    fn method_suffix(&self) -> String {
        self.curve.label.rfind('/').map(|i| self.curve.label[i..].to_string()).unwrap_or_default()
    }

    /// Per-point raw / mitigated columns for noisy scans.
    pub fn mitigation_csv(&self) -> String {
        let mut out = String::from("geometry,exact,raw,raw_stderr,unmitigated,fold,fold_mean,fold_stderr,mitigated,ci95\n");
        for p in &self.points {
            let Some(m) = &p.mitigated else { continue };
            for z in &m.series.points {
                out += &format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    fmt12(p.geometry[0]),
                    fmt12(p.exact),
                    fmt12(m.raw_energy),
                    fmt12(m.raw_stderr),
                    fmt12(m.unmitigated_energy),
                    z.fold,
                    fmt12(z.mean),
                    fmt12(z.stderr),
                    fmt12(m.mitigated_energy),
                    fmt12(m.ci95)
                );
            }
        }
        out
    }
}

/// Everything a scan needs besides the grid.
#[derive(Debug, Clone)]
pub struct ScanConfig<'a> {
    pub fixtures: &'a FixtureSet,
    pub active_space: ActiveSpace,
    pub method: EnergyMethod,
    pub cache: Option<FciCache>,
}

fn exact_energy(cfg: &ScanConfig, ints: &MolecularIntegrals) -> Result<f64> {
    match &cfg.cache {
        Some(c) => Ok(c.energies(ints, 1)?[0]),
        None => Ok(fci_solve(ints, 1)?.ground_energy()),
    }
}

fn reseed(backend: &VqeBackend, index: usize) -> VqeBackend {
    match backend {
        VqeBackend::Exact => VqeBackend::Exact,
        VqeBackend::Sampled { shots, seed } => VqeBackend::Sampled { shots: *shots, seed: point_seed(*seed, index) },
        VqeBackend::Noisy { noise, assignment, shots, seed } => VqeBackend::Noisy {
            noise: noise.clone(),
            assignment: assignment.clone(),
            shots: *shots,
            seed: point_seed(*seed, index),
        },
    }
}

fn noise_of(backend: &VqeBackend) -> Option<(&NoiseModel, &[usize])> {
    match backend {
        VqeBackend::Noisy { noise, assignment, .. } => Some((noise, assignment.as_slice())),
        _ => None,
    }
}

/// Solved points at `geometries`, in order, with the active-space electron
/// and spin-orbital counts.
///
/// FCI energies run in parallel. VQE points run in order, each optimization
/// starting from the previous optimum.
pub fn solve_points(cfg: &ScanConfig, geometries: &[Vec<f64>]) -> Result<(Vec<ScanPoint>, usize, usize)> {
    if geometries.is_empty() {
        return Err(Error::InvalidCurve("empty geometry list".into()));
    }
    let entries = cfg.fixtures.entries_for(geometries)?;
    let active: Vec<MolecularIntegrals> = entries
        .par_iter()
        .map(|e| apply_active_space(&cfg.fixtures.integrals(e)?, &cfg.active_space))
        .collect::<Result<_>>()?;
    let exact: Vec<f64> = active.par_iter().map(|i| exact_energy(cfg, i)).collect::<Result<_>>()?;
    let (ne, nso) = (active[0].n_electrons(), active[0].n_spin_orbitals());

    let points: Vec<ScanPoint> = match &cfg.method {
        EnergyMethod::Fci => geometries
            .iter()
            .zip(&exact)
            .map(|(g, &e)| ScanPoint { geometry: g.clone(), energy: e, stderr: None, exact: e, vqe: None, mitigated: None })
            .collect(),
        EnergyMethod::Vqe(m) => {
            let mut out = Vec::with_capacity(geometries.len());
            let mut warm: Option<Vec<f64>> = None;
            for (i, ints) in active.iter().enumerate() {
                let (h, mapping) = qubit_hamiltonian(ints, m.mapping)?;
                let (ansatz, initial) = build_ansatz(ints, &mapping, m.ansatz)?;
                let initial = match &warm {
                    Some(w) if w.len() == initial.len() => w.clone(),
                    _ => initial,
                };
                let problem = VqeProblem {
                    hamiltonian: h.clone(),
                    ansatz: ansatz.clone(),
                    initial,
                    backend: reseed(&m.backend, i),
                    settings: OptimizerSettings { seed: point_seed(m.settings.seed, i), ..m.settings.clone() },
                };
                let r = vqe_minimize(&problem)?;
                warm = Some(r.params.clone());
                let mitigated = match (&m.mitigation, noise_of(&m.backend)) {
                    (Some(ms), Some((noise, assignment))) => {
                        let ms = MitigationSettings { seed: point_seed(ms.seed, i), ..ms.clone() };
                        Some(run_mitigated_vqe_point(&h, &ansatz, &r.params, noise, assignment, &ms)?)
                    }
                    (Some(_), None) => {
                        return Err(Error::InvalidProblem(
                            "zero-noise extrapolation needs the noisy backend".into(),
                        ))
                    }
                    _ => None,
                };
                let (energy, stderr) = match &mitigated {
                    Some(mp) => (mp.mitigated_energy, Some(mp.ci95 / 1.96)),
                    None => (r.energy, None),
                };
                out.push(ScanPoint { geometry: geometries[i].clone(), energy, stderr, exact: exact[i], vqe: Some(r), mitigated });
            }
            out
        }
    };
    Ok((points, ne, nso))
}

pub(crate) fn scan_label(cfg: &ScanConfig, ne: usize, nso: usize) -> String {
    format!("{}({ne},{nso})/{}", cfg.fixtures.manifest.basis, cfg.method.name())
}

/// One-dimensional scan; the first geometry coordinate is the curve axis.
pub fn scan_pes(cfg: &ScanConfig, geometries: &[Vec<f64>]) -> Result<PesScan> {
    let (points, ne, nso) = solve_points(cfg, geometries)?;
    let axis: Vec<f64> = geometries.iter().map(|g| g[0]).collect();
    let stderr = if points.iter().all(|p| p.stderr.is_some()) {
        Some(points.iter().map(|p| p.stderr.unwrap()).collect())
    } else {
        None
    };
    let curve = PesCurve::new(scan_label(cfg, ne, nso), axis, points.iter().map(|p| p.energy).collect(), stderr)?;
    Ok(PesScan { curve, points, n_electrons: ne, n_spin_orbitals: nso })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let c = PesCurve::new("x", vec![0.5, 0.6], vec![-1.0, -1.1], Some(vec![0.001, 0.002])).unwrap();
        let text = format!("# note\n{}", c.to_csv());
        let back = PesCurve::from_csv("x", &text).unwrap();
        assert_eq!(back.geometry, c.geometry);
        assert!((back.energies[1] + 1.1).abs() < 1e-11);
        assert!(back.stderr.is_some());
        let plain = PesCurve::new("y", vec![0.5], vec![-1.0], None).unwrap();
        assert!(PesCurve::from_csv("y", &plain.to_csv()).unwrap().stderr.is_none());
    }

    #[test]
    fn invariants_enforced() {
        assert!(PesCurve::new("x", vec![0.5, 0.5], vec![0.0, 0.0], None).is_err());
        assert!(PesCurve::new("x", vec![0.5, 0.6], vec![0.0, f64::NAN], None).is_err());
        assert!(PesCurve::new("x", vec![0.5], vec![0.0, 1.0], None).is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!(EnergyMethod::Fci.name(), "FCI");
        let m = VqeMethod {
            ansatz: AnsatzKind::Uccsd { include_singles: true },
            mapping: MappingKind::ParityTapered,
            backend: VqeBackend::Exact,
            settings: OptimizerSettings::uccsd(),
            mitigation: None,
        };
        assert_eq!(EnergyMethod::Vqe(m).name(), "UCCSD");
    }
}

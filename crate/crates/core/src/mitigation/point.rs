//! Fold-and-repeat evaluation of an optimized ansatz with readout mitigation and ZNE.

use rayon::prelude::*;

use super::readout::ReadoutCalibration;
use super::zne::{zne_extrapolate, ZneFit, ZnePoint, ZneSeries};
use crate::backend::{run_noisy, sample_expectation, NoiseModel, Readout};
use crate::circuits::{compile_native, fold_cnots, Circuit};
use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;
use crate::report::fmt12;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct MitigationSettings {
    pub folds: Vec<usize>,
    pub shots: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Invert the readout confusion on every evaluation.
    pub readout_mitigation: bool,
    /// Estimate the confusion matrices from calibration runs with this many
    /// shots instead of reading them off the noise model.
    pub calibration_shots: Option<usize>,
}

impl Default for MitigationSettings {
    fn default() -> Self {
        MitigationSettings {
            folds: vec![1, 3, 5],
            shots: 10_000,
            repetitions: 10,
            seed: 0,
            readout_mitigation: true,
            calibration_shots: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldSample {
    pub fold: usize,
    pub repetition: usize,
    pub energy: f64,
    pub stderr: f64,
    /// Same shots without readout inversion.
    pub unmitigated: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MitigatedPoint {
    /// Fold-1 mean.
    pub raw_energy: f64,
    pub raw_stderr: f64,
    /// Fold-1 mean without readout inversion.
    pub unmitigated_energy: f64,
    pub mitigated_energy: f64,
    pub ci95: f64,
    pub series: ZneSeries,
    pub fit: ZneFit,
    pub samples: Vec<FoldSample>,
}

impl MitigatedPoint {
    /// `fold,repetition,energy,stderr` rows plus an intercept/ci95 summary row.
    pub fn report_csv(&self) -> String {
        let mut out = String::from("fold,repetition,energy,stderr\n");
        for s in &self.samples {
            out += &format!("{},{},{},{}\n", s.fold, s.repetition, fmt12(s.energy), fmt12(s.stderr));
        }
        out += &format!("intercept,ci95,{},{}\n", fmt12(self.fit.intercept), fmt12(self.fit.ci95));
        out
    }
}

/// Evaluate `ansatz(params)` at each fold factor, `repetitions` seeded
/// shot estimates per fold, and extrapolate linearly to zero folds.
pub fn run_mitigated_vqe_point(
    hamiltonian: &PauliSum,
    ansatz: &Circuit,
    params: &[f64],
    noise: &NoiseModel,
    assignment: &[usize],
    settings: &MitigationSettings,
) -> Result<MitigatedPoint> {
    if settings.shots == 0 {
        return Err(Error::ZeroShots);
    }
    if settings.repetitions == 0 {
        return Err(Error::InvalidZneSeries("need at least one repetition".into()));
    }
    if ansatz.n_qubits() != hamiltonian.n_qubits() {
        return Err(Error::QubitCountMismatch(ansatz.n_qubits(), hamiltonian.n_qubits()));
    }
    let n = ansatz.n_qubits();
    let flips = noise.readout_errors(assignment);
    let raw_readout = Readout::with_flips(flips.clone());
    let readout = if settings.readout_mitigation {
        let cal = match settings.calibration_shots {
            Some(shots) => ReadoutCalibration::from_calibration_runs(
                &flips,
                shots,
                derive_seed(settings.seed, &[u64::MAX]),
            )?,
            None => ReadoutCalibration::from_noise(noise, assignment)?,
        };
        Readout { flip: flips, z_values: cal.z_values()? }
    } else {
        raw_readout.clone()
    };
    debug_assert_eq!(readout.flip.len(), n);

    let native = compile_native(ansatz);
    let states = settings
        .folds
        .iter()
        .map(|&f| run_noisy(&fold_cnots(&native, f)?, params, noise, assignment))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..settings.folds.len())
        .flat_map(|fi| (0..settings.repetitions).map(move |r| (fi, r)))
        .collect();
    let samples = jobs
        .par_iter()
        .map(|&(fi, r)| {
            let fold = settings.folds[fi];
            let seed = derive_seed(settings.seed, &[fold as u64, r as u64]);
            let est = sample_expectation(&states[fi], hamiltonian, settings.shots, seed, &readout)?;
            let raw = sample_expectation(&states[fi], hamiltonian, settings.shots, seed, &raw_readout)?;
            Ok(FoldSample { fold, repetition: r, energy: est.value, stderr: est.stderr, unmitigated: raw.value })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    let mut unmitigated = Vec::new();
    for &fold in &settings.folds {
        let es: Vec<&FoldSample> = samples.iter().filter(|s| s.fold == fold).collect();
        let k = es.len() as f64;
        let mean = es.iter().map(|s| s.energy).sum::<f64>() / k;
        // Spread of repetitions when there are several, else the shot estimate.
        let stderr = if es.len() > 1 {
            (es.iter().map(|s| (s.energy - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            es[0].stderr
        };
        points.push(ZnePoint { fold, mean, stderr, repetitions: es.len() });
        unmitigated.push(es.iter().map(|s| s.unmitigated).sum::<f64>() / k);
    }
    let series = ZneSeries::new(points)?;
    let fit = zne_extrapolate(&series)?;
    let first = series
        .points
        .iter()
        .position(|p| p.fold == 1)
        .unwrap_or(0);
    Ok(MitigatedPoint {
        raw_energy: series.points[first].mean,
        raw_stderr: series.points[first].stderr,
        unmitigated_energy: unmitigated[first],
        mitigated_energy: fit.intercept,
        ci95: fit.ci95,
        fit,
        series,
        samples,
    })
}

//! Variational eigensolver driver.

use std::f64::consts::{FRAC_PI_2, PI};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::lbfgsb::{lbfgsb, LbfgsbOptions};
use crate::backend::{
    expectation_exact, expectation_sampled, run_noisy, run_statevector, sample_expectation,
    NoiseModel, Readout,
};
use crate::circuits::{compile_native, Circuit};
use crate::error::{Error, Result};
use crate::mitigation::ReadoutCalibration;
use crate::qubit_map::PauliSum;
use crate::report::fmt12;
use crate::rng::{derive_seed, stream_rng};

/// Finite-difference step for parameters outside the shift rule.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum VqeBackend {
    Exact,
    /// Noiseless shot estimates; every evaluation reuses `seed`.
    Sampled { shots: usize, seed: u64 },
    /// Density-matrix simulation with readout inversion. `shots: None`
    /// evaluates `Tr(ρH)` directly, the infinite-shot limit of the
    /// readout-mitigated estimator.
    Noisy { noise: NoiseModel, assignment: Vec<usize>, shots: Option<usize>, seed: u64 },
}

impl VqeBackend {
    pub fn is_exact(&self) -> bool {
        matches!(self, VqeBackend::Exact)
    }

    /// Default `|ΔE|` convergence threshold.
    pub fn default_ftol(&self) -> f64 {
        if self.is_exact() { 1e-9 } else { 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    /// Common box for every parameter; `None` is unbounded.
    pub bounds: Option<(f64, f64)>,
    /// Overrides the backend's default `|ΔE|` threshold.
    pub ftol: Option<f64>,
    pub gtol: f64,
    pub max_iter: usize,
    pub n_starts: usize,
    /// Standard deviation of the Gaussian kick applied to starts 1…n.
    pub perturbation: f64,
    pub seed: u64,
}

impl OptimizerSettings {
    pub fn uccsd() -> Self {
        OptimizerSettings {
            bounds: None,
            ftol: None,
            gtol: 1e-8,
            max_iter: 500,
            n_starts: 8,
            perturbation: 0.05,
            seed: 0,
        }
    }

    pub fn heuristic() -> Self {
        OptimizerSettings { bounds: Some((-PI, PI)), perturbation: 1.0, ..OptimizerSettings::uccsd() }
    }
}

#[derive(Debug, Clone)]
pub struct VqeProblem {
    pub hamiltonian: PauliSum,
    pub ansatz: Circuit,
    pub initial: Vec<f64>,
    pub backend: VqeBackend,
    pub settings: OptimizerSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    /// Energy per iteration of the winning start.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Index of the winning start (0 is the supplied initial point).
    pub start: usize,
}

/// Energy evaluator bound to a backend.
pub struct Evaluator<'a> {
    problem: &'a VqeProblem,
    native: Option<Circuit>,
    readout: Option<Readout>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a VqeProblem) -> Result<Self> {
        let (native, readout) = match &problem.backend {
            VqeBackend::Noisy { noise, assignment, .. } => {
                noise.check_assignment(problem.ansatz.n_qubits(), assignment)?;
                let cal = ReadoutCalibration::from_noise(noise, assignment)?;
                let readout = Readout { flip: noise.readout_errors(assignment), z_values: cal.z_values()? };
                (Some(compile_native(&problem.ansatz)), Some(readout))
            }
            VqeBackend::Sampled { shots: 0, .. } => return Err(Error::ZeroShots),
            _ => (None, None),
        };
        Ok(Evaluator { problem, native, readout })
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        let p = self.problem;
        let e = match &p.backend {
            VqeBackend::Exact => expectation_exact(&run_statevector(&p.ansatz, params)?, &p.hamiltonian)?,
            VqeBackend::Sampled { shots, seed } => {
                expectation_sampled(&p.ansatz, params, &p.hamiltonian, *shots, *seed)?.value
            }
            VqeBackend::Noisy { noise, assignment, shots, seed } => {
                let native = self.native.as_ref().expect("compiled in new");
                let rho = run_noisy(native, params, noise, assignment)?;
                match shots {
                    None => expectation_exact(&rho, &p.hamiltonian)?,
                    Some(s) => {
                        let readout = self.readout.as_ref().expect("built in new");
                        sample_expectation(&rho, &p.hamiltonian, *s, *seed, readout)?.value
                    }
                }
            }
        };
        if !e.is_finite() {
            return Err(Error::NonFiniteEnergy(format!("energy {e} at parameters {params:?}")));
        }
        Ok(e)
    }

    /// Parameter-shift where a parameter drives a single unit-scale
    /// rotation, central differences otherwise.
    pub fn gradient(&self, params: &[f64]) -> Result<Vec<f64>> {
        let c = &self.problem.ansatz;
        (0..params.len())
            .into_par_iter()
            .map(|i| {
                let (h, denom) = if c.shift_rule_applies(i) { (FRAC_PI_2, 2.0) } else { (FD_STEP, 2.0 * FD_STEP) };
                let mut plus = params.to_vec();
                let mut minus = params.to_vec();
                plus[i] += h;
                minus[i] -= h;
                Ok((self.energy(&plus)? - self.energy(&minus)?) / denom)
            })
            .collect()
    }
}

fn validate(p: &VqeProblem) -> Result<()> {
    if p.ansatz.n_qubits() != p.hamiltonian.n_qubits() {
        return Err(Error::QubitCountMismatch(p.ansatz.n_qubits(), p.hamiltonian.n_qubits()));
    }
    p.ansatz.check_params(&p.initial)?;
    p.hamiltonian.real_terms(1e-10)?;
    if p.settings.n_starts == 0 {
        return Err(Error::InvalidProblem("at least one start is required".into()));
    }
    if let Some((lo, hi)) = p.settings.bounds {
        if !(lo < hi) {
            return Err(Error::InvalidProblem(format!("empty parameter box [{lo}, {hi}]")));
        }
    }
    Ok(())
}

/// Start `k`: the initial point for `k = 0`, a seeded Gaussian kick otherwise.
pub fn start_point(p: &VqeProblem, k: usize) -> Vec<f64> {
    if k == 0 {
        return p.initial.clone();
    }
    let mut rng = stream_rng(p.settings.seed, &[0x57A7, k as u64]);
    p.initial
        .iter()
        .map(|&x| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = x + p.settings.perturbation * z;
            match p.settings.bounds {
                Some((lo, hi)) => v.clamp(lo, hi),
                None => v,
            }
        })
        .collect()
}

/// Multistart bounded quasi-Newton minimization of `E(θ)`.
pub fn vqe_minimize(p: &VqeProblem) -> Result<VqeResult> {
    validate(p)?;
    let eval = Evaluator::new(p)?;
    let n = p.initial.len();
    let (lo, hi) = match p.settings.bounds {
        Some((a, b)) => (vec![a; n], vec![b; n]),
        None => (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n]),
    };
    let opts = LbfgsbOptions {
        ftol: p.settings.ftol.unwrap_or(p.backend.default_ftol()),
        gtol: p.settings.gtol,
        max_iter: p.settings.max_iter,
        ..LbfgsbOptions::default()
    };
    let runs = (0..p.settings.n_starts)
        .into_par_iter()
        .map(|k| {
            let x0 = start_point(p, k);
            lbfgsb(|x| eval.energy(x), |x| eval.gradient(x), &x0, &lo, &hi, &opts).map(|m| (k, m))
        })
        .collect::<Result<Vec<_>>>()?;
    let (start, best) = runs
        .into_iter()
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    if !best.converged {
        log::warn!("VQE start {start} stopped after {} iterations without converging", best.iterations);
    }
    Ok(VqeResult {
        energy: best.f,
        params: best.x,
        trace: best.trace,
        converged: best.converged,
        iterations: best.iterations,
        evaluations: best.evaluations,
        start,
    })
}

/// Seed for geometry `index` of a scan, so points are independent of order.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, &[index as u64])
}

impl VqeResult {
    pub fn to_text(&self) -> String {
        let mut s = String::from("vqe_result\n");
        s += &format!("energy {}\n", fmt12(self.energy));
        s += &format!("converged {}\n", self.converged);
        s += &format!("iterations {}\n", self.iterations);
        s += &format!("evaluations {}\n", self.evaluations);
        s += &format!("start {}\n", self.start);
        s += &format!("params {}\n", self.params.len());
        for v in &self.params {
            s += &format!("{v:.17e}\n");
        }
        s += &format!("trace {}\n", self.trace.len());
        for (i, e) in self.trace.iter().enumerate() {
            s += &format!("{i} {}\n", fmt12(*e));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<VqeResult> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("missing {what}") })
        };
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let (l, head) = next("header")?;
        if head != "vqe_result" {
            return Err(err(l, format!("expected vqe_result, got {head:?}")));
        }
        let mut field = |key: &str| -> Result<(usize, String)> {
            let (l, s) = next(key)?;
            let rest = s.strip_prefix(key).ok_or_else(|| err(l, format!("expected {key}")))?;
            Ok((l, rest.trim().to_string()))
        };
        let num = |(l, s): (usize, String)| s.parse::<f64>().map_err(|_| err(l, format!("bad number {s:?}")));
        let int = |(l, s): (usize, String)| s.parse::<usize>().map_err(|_| err(l, format!("bad count {s:?}")));
        let energy = num(field("energy")?)?;
        let (l, c) = field("converged")?;
        let converged = c.parse().map_err(|_| err(l, format!("bad flag {c:?}")))?;
        let iterations = int(field("iterations")?)?;
        let evaluations = int(field("evaluations")?)?;
        let start = int(field("start")?)?;
        let np = int(field("params")?)?;
        let mut params = Vec::with_capacity(np);
        for _ in 0..np {
            let (l, s) = field("")?;
            params.push(num((l, s))?);
        }
        let nt = int(field("trace")?)?;
        let mut trace = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (l, s) = field("")?;
            let v = s.split_whitespace().nth(1).unwrap_or("").to_string();
            trace.push(num((l, v))?);
        }
        Ok(VqeResult { energy, params, trace, converged, iterations, evaluations, start })
    }
}

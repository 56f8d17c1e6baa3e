//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! `cargo test --test acceptance -- 3 7` runs only criteria 3 and 7.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use wavemol::analysis::{
    fit_equilibrium, nonparallelity_error, qubit_hamiltonian, scan_pes, scan_pes_2d, AnsatzKind,
    EnergyMethod, MappingKind, PesScan, ScanConfig, VqeMethod, MASS_H1, MASS_LI7,
};
use wavemol::backend::{default_assignment, NoiseModel};
use wavemol::hamiltonian::{apply_active_space, to_fermion_hamiltonian, ActiveSpace, FixtureSet};
use wavemol::mitigation::{zne_extrapolate, MitigationSettings, ZnePoint, ZneSeries};
use wavemol::qubit_map::{jordan_wigner, parity_map, taper_z2};
use wavemol::solver::{fci_solve, qubit_ground_energy, OptimizerSettings, VqeBackend};
use wavemol::wavelet::{build_filter, evaluate_cascade, quadrature_level};

const KCAL_PER_HA: f64 = 627.509474;
const CHEMICAL_ACCURACY_HA: f64 = 1.6e-3;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures(name: &str) -> FixtureSet {
    FixtureSet::load(root().join("fixtures").join(name)).expect("shipped fixture set")
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<Vec<f64>> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| vec![((lo + step * i as f64) * 1000.0).round() / 1000.0]).collect()
}

fn santiago() -> NoiseModel {
    NoiseModel::from_file(&root().join("fixtures/noise/santiago_5q.json")).expect("noise fixture")
}

struct Outcome {
    pass: Option<bool>,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome { pass: Some(ok), detail }
}

fn timed(limit: Duration, body: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut out = body();
    let dt = t.elapsed();
    out.detail += &format!("; {:.1} s (limit {} s)", dt.as_secs_f64(), limit.as_secs());
    if out.pass == Some(true) && dt > limit {
        out.pass = Some(false);
    }
    out
}

fn mapping_chain() -> Outcome {
    let set = fixtures("h2_sto3g");
    let rs = [0.4, 0.5, 0.6, 0.7, 0.735, 0.8, 1.0, 1.3, 1.8, 2.5];
    let mut worst: f64 = 0.0;
    for r in rs {
        let ints = set.integrals(set.entry_at(&[r]).unwrap()).unwrap();
        let fci = fci_solve(&ints, 1).unwrap().ground_energy();
        let h = to_fermion_hamiltonian(&ints).unwrap();
        let jw = qubit_ground_energy(&jordan_wigner(&h)).unwrap();
        let (tap, _) = taper_z2(&parity_map(&h), ints.n_electrons(), ints.two_ms()).unwrap();
        let pt = qubit_ground_energy(&tap).unwrap();
        worst = worst.max((fci - jw).abs()).max((fci - pt).abs());
    }
    pass_if(worst < 1e-9, format!("max |ΔE| = {worst:.2e} Ha over {} bond lengths (tol 1e-9)", rs.len()))
}

fn h2_uccsd_scan() -> PesScan {
    let set = fixtures("h2_sto3g");
    let cfg = ScanConfig {
        fixtures: &set,
        active_space: ActiveSpace::default(),
        method: EnergyMethod::Vqe(VqeMethod {
            ansatz: AnsatzKind::Uccsd { include_singles: true },
            mapping: MappingKind::ParityTapered,
            backend: VqeBackend::Exact,
            settings: OptimizerSettings::uccsd(),
            mitigation: None,
        }),
        cache: None,
    };
    scan_pes(&cfg, &grid(0.30, 2.50, 0.05)).unwrap()
}

fn h2_vqe_exactness() -> Outcome {
    let scan = h2_uccsd_scan();
    let worst = scan.points.iter().map(|p| (p.energy - p.exact).abs()).fold(0.0, f64::max);
    pass_if(
        worst < 1e-6,
        format!("max |E_VQE − E_FCI| = {worst:.2e} Ha over {} points (tol 1e-6)", scan.points.len()),
    )
}

fn h2_table() -> Outcome {
    let set = fixtures("h2_sto3g");
    let cfg = ScanConfig { fixtures: &set, active_space: ActiveSpace::default(), method: EnergyMethod::Fci, cache: None };
    let scan = scan_pes(&cfg, &grid(0.30, 2.50, 0.05)).unwrap();
    let fit = fit_equilibrium(&scan.curve, MASS_H1, MASS_H1).unwrap();
    let ok = (fit.r_eq - 0.74).abs() <= 0.01 && (fit.omega_cm1 - 4930.0).abs() <= 50.0;
    pass_if(
        ok,
        format!(
            "R_eq = {:.4} Å (0.74 ± 0.01), ω = {:.1} cm⁻¹ (4930 ± 50)",
            fit.r_eq, fit.omega_cm1
        ),
    )
}

fn lih_table() -> Outcome {
    let set = fixtures("lih_sto3g");
    let space = ActiveSpace::new(vec![0], vec![]);
    let ints = apply_active_space(&set.integrals(&set.entries()[0]).unwrap(), &space).unwrap();
    let (_, mapping) = qubit_hamiltonian(&ints, MappingKind::ParityTapered).unwrap();
    let sizes = (ints.n_spin_orbitals(), mapping.n_qubits());
    let cfg = ScanConfig { fixtures: &set, active_space: space, method: EnergyMethod::Fci, cache: None };
    let scan = scan_pes(&cfg, &grid(1.00, 3.20, 0.05)).unwrap();
    let fit = fit_equilibrium(&scan.curve, MASS_LI7, MASS_H1).unwrap();
    let ok = sizes == (10, 8)
        && (fit.r_eq - 1.55).abs() <= 0.01
        && (fit.omega_cm1 - 1674.3).abs() <= 0.02 * 1674.3;
    pass_if(
        ok,
        format!(
            "{} spin orbitals → {} qubits; R_eq = {:.4} Å (1.55 ± 0.01), ω = {:.1} cm⁻¹ (1674.3 ± 2%)",
            sizes.0, sizes.1, fit.r_eq, fit.omega_cm1
        ),
    )
}

fn water_surface() -> Outcome {
    let set = fixtures("h2o_sto3g");
    let cfg = ScanConfig {
        fixtures: &set,
        active_space: set.manifest.active_space.clone(),
        method: EnergyMethod::Fci,
        cache: None,
    };
    let geometries: Vec<Vec<f64>> = set.entries().iter().map(|e| e.geometry.clone()).collect();
    let (_, min, _) = scan_pes_2d(&cfg, &geometries).unwrap();
    let ok = (min.r_eq - 1.03).abs() <= 0.01 && (min.angle_eq - 96.9).abs() <= 0.5;
    pass_if(
        ok,
        format!("R = {:.4} Å (1.03 ± 0.01), angle = {:.2}° (96.9 ± 0.5)", min.r_eq, min.angle_eq),
    )
}

fn noisy_method(layers: usize, n_qubits: usize, seed: u64) -> EnergyMethod {
    EnergyMethod::Vqe(VqeMethod {
        ansatz: AnsatzKind::Heuristic { layers },
        mapping: MappingKind::ParityTapered,
        backend: VqeBackend::Noisy {
            noise: santiago(),
            assignment: default_assignment(n_qubits),
            shots: None,
            seed,
        },
        settings: OptimizerSettings { seed, ..OptimizerSettings::heuristic() },
        mitigation: Some(MitigationSettings { seed, ..MitigationSettings::default() }),
    })
}

fn noisy_h2() -> Outcome {
    let set = fixtures("h2_sto3g");
    let cfg = ScanConfig {
        fixtures: &set,
        active_space: ActiveSpace::default(),
        method: noisy_method(1, 2, 11),
        cache: None,
    };
    let scan = scan_pes(&cfg, &grid(0.30, 2.50, 0.10)).unwrap();
    let errs: Vec<f64> = scan
        .points
        .iter()
        .map(|p| (p.mitigated.as_ref().unwrap().raw_energy - p.exact).abs())
        .collect();
    let good = errs.iter().filter(|e| **e < CHEMICAL_ACCURACY_HA).count();
    let frac = good as f64 / errs.len() as f64;
    pass_if(
        frac >= 0.7,
        format!(
            "{good}/{} points with raw error < 1.6 mHa ({:.0}%, need ≥ 70%); median raw error {:.2} mHa",
            errs.len(),
            100.0 * frac,
            1e3 * median(&errs)
        ),
    )
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) }
}

fn noisy_lih() -> Outcome {
    let set = fixtures("lih_sto3g");
    let cfg = ScanConfig {
        fixtures: &set,
        active_space: ActiveSpace::new(vec![0], vec![3, 4]),
        method: noisy_method(1, 4, 7),
        cache: None,
    };
    let scan = scan_pes(&cfg, &grid(1.00, 3.20, 0.20)).unwrap();
    let n = scan.points.len();
    let mut raw = Vec::new();
    let mut mit = Vec::new();
    let mut good_mit = 0;
    for p in &scan.points {
        let m = p.mitigated.as_ref().unwrap();
        let r = (m.raw_energy - p.exact).abs() * KCAL_PER_HA;
        let e = (m.mitigated_energy - p.exact).abs();
        raw.push(r);
        mit.push(e * KCAL_PER_HA);
        if e * KCAL_PER_HA < 1.0 && e <= m.ci95 {
            good_mit += 1;
        }
    }
    let in_band = raw.iter().filter(|r| (2.0..=8.0).contains(*r)).count();
    let ok = in_band as f64 >= 0.7 * n as f64 && good_mit as f64 >= 0.7 * n as f64;
    pass_if(
        ok,
        format!(
            "raw error in 2–8 kcal/mol at {in_band}/{n} points (median {:.2}); mitigated < 1 kcal/mol with CI covering exact at {good_mit}/{n} (median {:.2})",
            median(&raw),
            median(&mit)
        ),
    )
}

fn wavelet_properties() -> Outcome {
    let mut worst = [0.0f64; 4];
    for order in [2usize, 8] {
        let f = build_filter(order).unwrap();
        let t = evaluate_cascade(&f, quadrature_level(order)).unwrap();
        worst[0] = worst[0].max(t.refinement_residual());
        let per_unit = 1usize << t.level();
        let phi = t.phi_values();
        let psi = t.psi_values();
        let dx = t.step();
        for n in 0..per_unit {
            let s: f64 = phi.iter().skip(n).step_by(per_unit).sum();
            worst[1] = worst[1].max((s - 1.0).abs());
        }
        for k in 0..(2 * order) {
            let shift = k * per_unit;
            let dot: f64 = if shift < phi.len() {
                phi[shift..].iter().zip(phi).map(|(a, b)| a * b).sum::<f64>() * dx
            } else {
                0.0
            };
            worst[2] = worst[2].max((dot - if k == 0 { 1.0 } else { 0.0 }).abs());
        }
        let (lo, hi) = t.support();
        let c = 0.5 * (lo + hi);
        for p in 0..order as i32 {
            let m: f64 = psi.iter().enumerate().map(|(i, v)| (t.point(i) - c).powi(p) * v).sum::<f64>() * dx;
            worst[3] = worst[3].max(m.abs());
        }
    }
    let ok = worst[0] < 1e-10 && worst[1] < 1e-8 && worst[2] < 1e-8 && worst[3] < 1e-6;
    pass_if(
        ok,
        format!(
            "orders 2, 8: refinement {:.1e}, partition {:.1e}, orthonormality {:.1e}, moments {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// Externally generated wavelet-basis fixture sets, when present.
fn conditional_fixtures() -> Outcome {
    let dir = root().join("fixtures");
    let present = |n: &str| dir.join(n).join("manifest.toml").exists();
    let mut checks: Vec<(bool, String)> = Vec::new();
    let fci_fit = |name: &str, space: ActiveSpace, ma: f64, mb: f64| {
        let set = fixtures(name);
        let geoms: Vec<Vec<f64>> = set.entries().iter().map(|e| e.geometry.clone()).collect();
        let cfg = ScanConfig { fixtures: &set, active_space: space, method: EnergyMethod::Fci, cache: None };
        let scan = scan_pes(&cfg, &geoms).unwrap();
        (fit_equilibrium(&scan.curve, ma, mb).unwrap(), scan)
    };
    let mut h2_curve = None;
    if present("h2_dw") {
        let (f, scan) = fci_fit("h2_dw", ActiveSpace::default(), MASS_H1, MASS_H1);
        checks.push((
            (f.r_eq - 0.74).abs() <= 0.01 && (f.omega_cm1 - 4468.7).abs() <= 0.01 * 4468.7,
            format!("DW H2 R_eq {:.3}, ω {:.1}", f.r_eq, f.omega_cm1),
        ));
        h2_curve = Some(scan.curve);
    }
    if present("lih_dw") {
        let set = fixtures("lih_dw");
        let (f, _) = fci_fit("lih_dw", set.manifest.active_space.clone(), MASS_LI7, MASS_H1);
        checks.push((
            (f.r_eq - 1.61).abs() <= 0.01 && (f.omega_cm1 - 1367.1).abs() <= 0.02 * 1367.1,
            format!("DW LiH R_eq {:.3}, ω {:.1}", f.r_eq, f.omega_cm1),
        ));
    }
    if let (Some(c), true) = (&h2_curve, present("h2_ccpvtz")) {
        let geoms: Vec<Vec<f64>> = c.geometry.iter().map(|g| vec![*g]).collect();
        let set = fixtures("h2_ccpvtz");
        let cfg = ScanConfig { fixtures: &set, active_space: ActiveSpace::default(), method: EnergyMethod::Fci, cache: None };
        let reference = scan_pes(&cfg, &geoms).unwrap().curve;
        let npe = nonparallelity_error(c, &reference).unwrap();
        checks.push(((npe - 38.33).abs() <= 0.5, format!("DW H2 NPE {npe:.2} mHa")));
    }
    if checks.is_empty() {
        return Outcome { pass: None, detail: "no wavelet-basis fixtures supplied".into() };
    }
    let ok = checks.iter().all(|c| c.0);
    pass_if(ok, checks.into_iter().map(|c| c.1).collect::<Vec<_>>().join("; "))
}

fn zne_soundness() -> Outcome {
    // E(f) = E0 + a·f; each fold is the mean of ten noisy repetitions.
    let (e0, slope, sigma, reps, trials) = (-7.88, 0.03, 0.004, 10usize, 10_000usize);
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut covered = 0;
    let mut bias = 0.0;
    for _ in 0..trials {
        let points = [1usize, 3, 5]
            .iter()
            .map(|&f| {
                let xs: Vec<f64> = (0..reps).map(|_| e0 + slope * f as f64 + noise.sample(&mut rng)).collect();
                let mean = xs.iter().sum::<f64>() / reps as f64;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
                ZnePoint { fold: f, mean, stderr: (var / reps as f64).sqrt(), repetitions: reps }
            })
            .collect();
        let fit = zne_extrapolate(&ZneSeries::new(points).unwrap()).unwrap();
        if (fit.intercept - e0).abs() <= fit.ci95 {
            covered += 1;
        }
        bias += fit.intercept - e0;
    }
    let coverage = covered as f64 / trials as f64;
    let bias = bias / trials as f64;
    let point_se = sigma / (reps as f64).sqrt();
    let ok = (0.93..=0.97).contains(&coverage) && bias.abs() < 0.1 * point_se;
    pass_if(
        ok,
        format!(
            "coverage {:.2}% (93–97%), bias {:.2e} = {:.3}× per-point stderr (< 0.1)",
            100.0 * coverage,
            bias,
            bias.abs() / point_se
        ),
    )
}

fn main() {
    let filters: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: Vec<(usize, &str, Duration, fn() -> Outcome)> = vec![
        (1, "mapping-chain equivalence", Duration::from_secs(10), mapping_chain),
        (2, "H2 exact UCCSD VQE matches FCI", Duration::from_secs(60), h2_vqe_exactness),
        (3, "H2 STO-3G bond length and frequency", Duration::from_secs(120), h2_table),
        (4, "LiH STO-3G bond length and frequency", Duration::from_secs(1800), lih_table),
        (5, "water STO-3G surface minimum", Duration::from_secs(600), water_surface),
        (6, "noisy H2 heuristic VQE raw accuracy", Duration::from_secs(1800), noisy_h2),
        (7, "noisy LiH heuristic VQE with ZNE", Duration::from_secs(7200), noisy_lih),
        (8, "wavelet property suite", Duration::from_secs(60), wavelet_properties),
        (9, "wavelet-basis fixture rows", Duration::from_secs(1800), conditional_fixtures),
        (10, "ZNE statistical soundness", Duration::from_secs(60), zne_soundness),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        if !filters.is_empty() && !filters.contains(&id) {
            continue;
        }
        let out = timed(limit, run);
        let tag = match out.pass {
            Some(true) => "PASS",
            Some(false) => {
                failed.push(id);
                "FAIL"
            }
            None => "SKIP",
        };
        println!("criterion {id:>2} {tag} {name}: {}", out.detail);
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

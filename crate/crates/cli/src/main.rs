use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use wavemol::analysis::{
    fit_equilibrium, nonparallelity_error, qubit_hamiltonian, scan_pes, scan_pes_2d, solve_points,
    summary_csv, EnergyMethod, MappingKind, PesCurve, PesScan, ScanConfig, SummaryRow, MASS_H1,
    MASS_LI7, MASS_O16,
};
use wavemol::hamiltonian::{apply_active_space, parse_fcidump, ActiveSpace, FixtureSet, MANIFEST_NAME};
use wavemol::report::{fmt12, sha256_hex, Provenance};
use wavemol::solver::FciCache;

mod config;

use config::{ExperimentConfig, Invalid, Overrides};

/// Environment variable that caps the worker thread count.
const THREADS_VAR: &str = "WAVEMOL_THREADS";

#[derive(Parser)]
#[command(name = "wavemol", version, about = "Molecular VQE experiments on simulated quantum hardware")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan, fit and summarize as described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print sizes of an FCIDUMP file and its qubit Hamiltonian.
    Inspect {
        fcidump: PathBuf,
        /// Spatial orbitals to freeze (0-based, comma separated).
        #[arg(long, value_delimiter = ',')]
        frozen: Option<Vec<usize>>,
        /// Virtual spatial orbitals to drop.
        #[arg(long, value_delimiter = ',')]
        removed: Option<Vec<usize>>,
    },
    /// Energies only: write the curve or surface CSV.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Equilibrium geometry and harmonic frequency of a curve CSV.
    Fit {
        curve: PathBuf,
        /// Atomic masses in amu.
        #[arg(long, num_args = 2, value_names = ["MA", "MB"])]
        masses: Vec<f64>,
        #[arg(long)]
        reference_omega: Option<f64>,
        #[arg(long, default_value_t = 0)]
        n_orb: usize,
    },
    /// Nonparallelity error of a curve against a reference, in mHa.
    Npe { curve: PathBuf, reference: PathBuf },
    /// Optimize at one geometry and write the fold / repetition report.
    Mitigate {
        #[arg(long)]
        config: PathBuf,
        /// Geometry coordinates (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        geometry: Vec<f64>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(inv) = e.downcast_ref::<Invalid>() {
                eprintln!("{inv}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Run { config, overrides } => {
            let exp = Experiment::load(&config, &overrides)?;
            exp.run(true)
        }
        Command::Scan { config, overrides } => {
            let exp = Experiment::load(&config, &overrides)?;
            exp.run(false)
        }
        Command::Inspect { fcidump, frozen, removed } => inspect(&fcidump, frozen, removed),
        Command::Fit { curve, masses, reference_omega, n_orb } => {
            let c = read_curve(&curve)?;
            let [ma, mb] = match masses.as_slice() {
                [a, b] => [*a, *b],
                _ => [MASS_H1, MASS_H1],
            };
            let fit = fit_equilibrium(&c, ma, mb)?;
            let row = SummaryRow {
                label: c.label.clone(),
                n_orb,
                r_eq: fit.r_eq,
                omega_cm1: fit.omega_cm1,
                omega_err_pct: reference_omega.map(|w| 100.0 * (fit.omega_cm1 - w) / w),
                npe_mha: None,
            };
            print!("{}", summary_csv(&[row]));
            Ok(())
        }
        Command::Npe { curve, reference } => {
            let npe = nonparallelity_error(&read_curve(&curve)?, &read_curve(&reference)?)?;
            println!("npe_mHa,{}", fmt12(npe));
            Ok(())
        }
        Command::Mitigate { config, geometry, overrides } => {
            let exp = Experiment::load(&config, &overrides)?;
            exp.mitigate(geometry)
        }
    }
}

fn read_curve(path: &Path) -> anyhow::Result<PesCurve> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let label = text
        .lines()
        .find_map(|l| l.strip_prefix("# label: "))
        .map(str::to_string)
        .unwrap_or_else(|| path.file_stem().unwrap_or_default().to_string_lossy().into_owned());
    Ok(PesCurve::from_csv(&label, &text)?)
}

fn inspect(path: &Path, frozen: Option<Vec<usize>>, removed: Option<Vec<usize>>) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ints = parse_fcidump(&text)?;
    println!("n_orb: {}", ints.n_spatial());
    println!("n_elec: {}", ints.n_electrons());
    println!("e_nuclear: {}", fmt12(ints.e_nuclear));
    let line = |ints: &wavemol::hamiltonian::MolecularIntegrals| -> anyhow::Result<String> {
        let (h, m) = qubit_hamiltonian(ints, MappingKind::ParityTapered)?;
        Ok(format!("{} spin orbitals → {} qubits (tapered), {} Pauli terms", ints.n_spin_orbitals(), m.n_qubits(), h.len()))
    };
    println!("{}", line(&ints)?);
    // Explicit orbitals win; otherwise use the fixture set's active space.
    let space = if frozen.is_some() || removed.is_some() {
        Some(ActiveSpace::new(frozen.unwrap_or_default(), removed.unwrap_or_default()))
    } else {
        path.parent()
            .map(|d| d.join(MANIFEST_NAME))
            .filter(|m| m.is_file())
            .and_then(|m| FixtureSet::load(m.parent().unwrap()).ok())
            .map(|s| s.manifest.active_space)
            .filter(|a| !a.is_empty())
    };
    if let Some(space) = space {
        let active = apply_active_space(&ints, &space)?;
        println!("active space (frozen {:?}, removed {:?}): {}", space.frozen, space.removed, line(&active)?);
    }
    Ok(())
}

fn atom_mass(symbol: &str) -> Option<f64> {
    match symbol {
        "H" => Some(MASS_H1),
        "Li" => Some(MASS_LI7),
        "O" => Some(MASS_O16),
        _ => None,
    }
}

struct Experiment {
    cfg: ExperimentConfig,
    set: FixtureSet,
    provenance: Provenance,
}

impl Experiment {
    fn load(path: &Path, overrides: &Overrides) -> anyhow::Result<Experiment> {
        let text = std::fs::read_to_string(path).map_err(|e| Invalid(vec![format!("config: {}: {e}", path.display())]))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = ExperimentConfig::parse(&text, base)?;
        cfg.apply(overrides);
        cfg.validate()?;
        let set = FixtureSet::load(&cfg.fixtures)?;
        let manifest = std::fs::read(cfg.fixtures.join(MANIFEST_NAME))?;
        let mut provenance = Provenance::new();
        provenance
            .push("wavemol-cli", env!("CARGO_PKG_VERSION"))
            .push("config", path.file_name().unwrap_or_default().to_string_lossy())
            .push("config_sha256", sha256_hex(text.as_bytes()))
            .push("fixture_manifest_sha256", sha256_hex(&manifest));
        let mut applied = Vec::new();
        if let Some(s) = overrides.seed {
            applied.push(format!("seed={s}"));
        }
        if let Some(s) = overrides.shots {
            applied.push(format!("shots={s}"));
        }
        if let Some(f) = &overrides.folds {
            applied.push(format!("folds={f:?}"));
        }
        if let Some(r) = overrides.repetitions {
            applied.push(format!("repetitions={r}"));
        }
        if overrides.method.is_some() || overrides.mapping.is_some() || overrides.backend.is_some() {
            applied.push(format!("method={:?} mapping={:?} backend={:?}", cfg.method, cfg.mapping, cfg.backend));
        }
        if !applied.is_empty() {
            provenance.push("overrides", applied.join(" "));
        }
        Ok(Experiment { cfg, set, provenance })
    }

    fn active_space(&self) -> ActiveSpace {
        self.cfg.active_space.clone().unwrap_or_else(|| self.set.manifest.active_space.clone())
    }

    fn scan_config(&self) -> anyhow::Result<ScanConfig<'_>> {
        let space = self.active_space();
        let first = self.set.entries().first().context("fixture set is empty")?;
        let ints = apply_active_space(&self.set.integrals(first)?, &space)?;
        let mapping = match self.cfg.mapping {
            config::Mapping::Jw => MappingKind::JordanWigner,
            config::Mapping::ParityTapered => MappingKind::ParityTapered,
        };
        let (_, m) = qubit_hamiltonian(&ints, mapping)?;
        let method = config::with_assignment(self.cfg.energy_method()?, m.n_qubits());
        let cache = self.cfg.fci_cache.as_ref().map(FciCache::new).transpose()?;
        Ok(ScanConfig { fixtures: &self.set, active_space: space, method, cache })
    }

    fn write(&self, name: &str, body: &str) -> anyhow::Result<()> {
        let path = self.cfg.output.join(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(&path, self.provenance.wrap(body)).with_context(|| format!("writing {}", path.display()))
    }

    fn masses(&self) -> Option<[f64; 2]> {
        self.cfg.fit.masses.or_else(|| {
            let a = &self.set.manifest.atoms;
            Some([atom_mass(a.first()?)?, atom_mass(a.get(1)?)?])
        })
    }

    fn run(&self, analyse: bool) -> anyhow::Result<()> {
        let cfg = self.scan_config()?;
        let geometries = self
            .cfg
            .geometries()
            .unwrap_or_else(|| self.set.entries().iter().map(|e| e.geometry.clone()).collect());
        let two_d = geometries.first().is_some_and(|g| g.len() == 2);
        if two_d {
            let (surface, min, points) = scan_pes_2d(&cfg, &geometries)?;
            self.write("surface.csv", &surface.to_csv(min.e_min))?;
            self.write_vqe(&points)?;
            if analyse {
                self.write(
                    "minimum.csv",
                    &format!(
                        "label,R_eq,angle_eq,e_min\n{},{},{},{}\n",
                        surface.label,
                        fmt12(min.r_eq),
                        fmt12(min.angle_eq),
                        fmt12(min.e_min)
                    ),
                )?;
                println!(
                    "{}: R_eq = {:.4} Å, angle = {:.2}°, E_min = {:.8} Ha",
                    surface.label, min.r_eq, min.angle_eq, min.e_min
                );
            }
            return Ok(());
        }
        let scan = scan_pes(&cfg, &geometries)?;
        self.write("curve.csv", &format!("# label: {}\n{}", scan.curve.label, scan.curve.to_csv()))?;
        self.write_vqe(&scan.points)?;
        let vqe = !matches!(cfg.method, EnergyMethod::Fci);
        let exact = scan.exact_curve()?;
        if vqe {
            self.write("exact_curve.csv", &format!("# label: {}\n{}", exact.label, exact.to_csv()))?;
        }
        if scan.points.iter().any(|p| p.mitigated.is_some()) {
            self.write("mitigation.csv", &scan.mitigation_csv())?;
            for (i, p) in scan.points.iter().enumerate() {
                if let Some(m) = &p.mitigated {
                    self.write(&format!("mitigation/point_{i:03}.csv"), &m.report_csv())?;
                }
            }
        }
        if analyse {
            let row = self.summary_row(&scan, vqe.then_some(&exact))?;
            let text = summary_csv(&[row]);
            self.write("summary.csv", &text)?;
            print!("{text}");
        }
        Ok(())
    }

    fn summary_row(&self, scan: &PesScan, exact: Option<&PesCurve>) -> anyhow::Result<SummaryRow> {
        let (r_eq, omega) = match self.masses() {
            Some([ma, mb]) => match fit_equilibrium(&scan.curve, ma, mb) {
                Ok(f) => (f.r_eq, f.omega_cm1),
                Err(e) => {
                    log::warn!("no frequency for {}: {e}", scan.curve.label);
                    (f64::NAN, f64::NAN)
                }
            },
            None => bail!("fit.masses: unknown atoms {:?}; set masses explicitly", self.set.manifest.atoms),
        };
        let npe = exact.map(|e| nonparallelity_error(&scan.curve, e)).transpose()?;
        Ok(SummaryRow {
            label: scan.curve.label.clone(),
            n_orb: scan.n_spin_orbitals,
            r_eq,
            omega_cm1: omega,
            omega_err_pct: self.cfg.fit.reference_omega.map(|w| 100.0 * (omega - w) / w),
            npe_mha: npe,
        })
    }

    fn write_vqe(&self, points: &[wavemol::analysis::ScanPoint]) -> anyhow::Result<()> {
        for (i, p) in points.iter().enumerate() {
            if let Some(r) = &p.vqe {
                let geom: Vec<String> = p.geometry.iter().map(|g| g.to_string()).collect();
                self.write(&format!("vqe/point_{i:03}.txt"), &format!("# geometry: {}\n{}", geom.join(","), r.to_text()))?;
            }
        }
        Ok(())
    }

    fn mitigate(&self, geometry: Vec<f64>) -> anyhow::Result<()> {
        if self.cfg.mitigation().is_none() {
            return Err(Invalid(vec!["folds: mitigate needs the noisy backend and fold factors".into()]).into());
        }
        let cfg = self.scan_config()?;
        let (points, _, _) = solve_points(&cfg, &[geometry.clone()])?;
        let p = &points[0];
        let m = p.mitigated.as_ref().expect("mitigation configured");
        let tag: Vec<String> = geometry.iter().map(|g| format!("{g}")).collect();
        self.write(&format!("mitigation_{}.csv", tag.join("_")), &m.report_csv())?;
        println!("exact,{}", fmt12(p.exact));
        println!("raw,{},{}", fmt12(m.raw_energy), fmt12(m.raw_stderr));
        println!("unmitigated,{}", fmt12(m.unmitigated_energy));
        println!("mitigated,{},{}", fmt12(m.mitigated_energy), fmt12(m.ci95));
        Ok(())
    }
}

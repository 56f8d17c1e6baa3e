use std::path::PathBuf;

use proptest::prelude::*;

use wavemol::analysis::{
    build_ansatz, fit_equilibrium, nonparallelity_error, qubit_hamiltonian, AnsatzKind, MappingKind, PesCurve,
};
use wavemol::backend::{default_assignment, expectation_exact, run_noisy, run_statevector, NoiseModel};
use wavemol::circuits::{compile_native, fold_cnots, phase_insensitive_distance};
use wavemol::hamiltonian::{apply_active_space, ActiveSpace, FixtureSet, MolecularIntegrals};
use wavemol::mitigation::{zne_extrapolate, ReadoutCalibration, ZnePoint, ZneSeries};
use wavemol::qubit_map::{pauli_multiply, PauliString};
use wavemol::solver::fci_solve;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn lih_reduced(r: f64) -> MolecularIntegrals {
    let set = FixtureSet::load(root().join("fixtures/lih_sto3g")).unwrap();
    let ints = set.integrals(set.entry_at(&[r]).unwrap()).unwrap();
    apply_active_space(&ints, &ActiveSpace::new(vec![0], vec![3, 4])).unwrap()
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (0..=mask, 0..=mask).prop_map(move |(x, z)| PauliString::new(n, x, z).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_matches_matrices(a in pauli(3), b in pauli(3)) {
        let (p, phase) = pauli_multiply(&a, &b).unwrap();
        let lhs = a.to_dense() * b.to_dense();
        let rhs = p.to_dense() * phase.to_complex();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn readout_weights_undo_confusion(
        flips in prop::collection::vec(0.0f64..0.45, 3),
        raw in prop::collection::vec(0.0f64..1.0, 8),
        mask in 0u64..8,
    ) {
        let total: f64 = raw.iter().sum::<f64>() + 1e-9;
        let p: Vec<f64> = raw.iter().map(|x| (x + 1e-9 / 8.0) / total).collect();
        let cal = ReadoutCalibration::symmetric(&flips).unwrap();
        let observed = cal.apply(&p);
        let z = cal.z_values().unwrap();
        let parity = |b: usize| if ((b as u64) & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let truth: f64 = p.iter().enumerate().map(|(b, x)| x * parity(b)).sum();
        let weighted: f64 = observed
            .iter()
            .enumerate()
            .map(|(b, x)| {
                let w: f64 = (0..3).map(|q| if mask >> q & 1 == 1 { z[q][(b >> q) & 1] } else { 1.0 }).product();
                x * w
            })
            .sum();
        prop_assert!((weighted - truth).abs() < 1e-9, "{weighted} vs {truth}");
    }

    #[test]
    fn npe_ignores_constant_offsets(
        e in prop::collection::vec(-2.0f64..0.0, 3..12),
        c1 in -10.0f64..10.0,
        c2 in -10.0f64..10.0,
    ) {
        let g: Vec<f64> = (0..e.len()).map(|i| 0.5 + 0.1 * i as f64).collect();
        let reference = PesCurve::new("ref", g.clone(), e.iter().map(|x| x * 0.9).collect(), None).unwrap();
        let curve = PesCurve::new("c", g.clone(), e.clone(), None).unwrap();
        let base = nonparallelity_error(&curve, &reference).unwrap();
        let shifted = PesCurve::new("c", g.clone(), e.iter().map(|x| x + c1).collect(), None).unwrap();
        let ref_shift = PesCurve::new("ref", g, reference.energies.iter().map(|x| x + c2).collect(), None).unwrap();
        let moved = nonparallelity_error(&shifted, &ref_shift).unwrap();
        prop_assert!((base - moved).abs() < 1e-8 * (1.0 + base));
        prop_assert!(base >= 0.0);
    }

    #[test]
    fn fit_shift_invariant_and_translation_equivariant(
        r0 in 0.9f64..1.3,
        k in 0.2f64..2.0,
        cubic in -0.3f64..0.3,
        de in -50.0f64..50.0,
        dr in -0.5f64..0.5,
    ) {
        let g: Vec<f64> = (0..21).map(|i| 0.6 + 0.05 * i as f64).collect();
        let e: Vec<f64> = g.iter().map(|r| 0.5 * k * (r - r0).powi(2) + cubic * k * (r - r0).powi(3)).collect();
        let base = fit_equilibrium(&PesCurve::new("a", g.clone(), e.clone(), None).unwrap(), 1.0, 1.0).unwrap();
        let up = PesCurve::new("b", g.clone(), e.iter().map(|x| x + de).collect(), None).unwrap();
        let up = fit_equilibrium(&up, 1.0, 1.0).unwrap();
        prop_assert!((up.r_eq - base.r_eq).abs() < 1e-8);
        prop_assert!((up.omega_cm1 - base.omega_cm1).abs() < 1e-5 * base.omega_cm1);
        let moved = PesCurve::new("c", g.iter().map(|x| x + dr).collect(), e, None).unwrap();
        let moved = fit_equilibrium(&moved, 1.0, 1.0).unwrap();
        prop_assert!((moved.r_eq - base.r_eq - dr).abs() < 1e-8);
        prop_assert!((moved.omega_cm1 - base.omega_cm1).abs() < 1e-6 * base.omega_cm1);
    }

    #[test]
    fn zne_recovers_exact_lines(a in -10.0f64..10.0, b in -1.0f64..1.0, se in 1e-4f64..0.01) {
        let pts = [1usize, 3, 5]
            .iter()
            .map(|&f| ZnePoint { fold: f, mean: a + b * f as f64, stderr: se, repetitions: 10 })
            .collect();
        let fit = zne_extrapolate(&ZneSeries::new(pts).unwrap()).unwrap();
        prop_assert!((fit.intercept - a).abs() < 1e-9 * (1.0 + a.abs()));
        prop_assert!((fit.slope - b).abs() < 1e-9);
        prop_assert!(fit.ci95 >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heuristic_energies_respect_variational_bound(
        params in prop::collection::vec(-3.2f64..3.2, 8),
        idx in 0usize..12,
    ) {
        let r = 1.0 + 0.2 * idx as f64;
        let ints = lih_reduced(r);
        let fci = fci_solve(&ints, 1).unwrap().ground_energy();
        let (h, mapping) = qubit_hamiltonian(&ints, MappingKind::ParityTapered).unwrap();
        let (c, _) = build_ansatz(&ints, &mapping, AnsatzKind::Heuristic { layers: 1 }).unwrap();
        let e = expectation_exact(&run_statevector(&c, &params).unwrap(), &h).unwrap();
        prop_assert!(e >= fci - 1e-10, "{e} < {fci}");
    }

    #[test]
    fn noisy_states_stay_physical(params in prop::collection::vec(-3.2f64..3.2, 8), fold in 0usize..3) {
        let noise = NoiseModel::from_file(&root().join("fixtures/noise/santiago_5q.json")).unwrap();
        let ints = lih_reduced(1.6);
        let (h, mapping) = qubit_hamiltonian(&ints, MappingKind::ParityTapered).unwrap();
        let (c, _) = build_ansatz(&ints, &mapping, AnsatzKind::Heuristic { layers: 1 }).unwrap();
        let folded = fold_cnots(&compile_native(&c), 2 * fold + 1).unwrap();
        let rho = run_noisy(&folded, &params, &noise, &default_assignment(4)).unwrap();
        prop_assert!(rho.check_physical(1e-9).is_ok());
        let fci = fci_solve(&ints, 1).unwrap().ground_energy();
        prop_assert!(expectation_exact(&rho, &h).unwrap() >= fci - 1e-10);
    }

    #[test]
    fn folding_preserves_the_unitary(params in prop::collection::vec(-3.2f64..3.2, 8), fold in 0usize..3) {
        let ints = lih_reduced(1.6);
        let (_, mapping) = qubit_hamiltonian(&ints, MappingKind::ParityTapered).unwrap();
        let (c, _) = build_ansatz(&ints, &mapping, AnsatzKind::Heuristic { layers: 1 }).unwrap();
        let folded = fold_cnots(&compile_native(&c), 2 * fold + 1).unwrap();
        prop_assert_eq!(folded.cnot_count(), c.cnot_count() * (2 * fold + 1));
        let d = phase_insensitive_distance(&c.unitary(&params).unwrap(), &folded.unitary(&params).unwrap());
        prop_assert!(d < 1e-10);
    }
}

//! Potential-energy scans and the spectroscopic quantities read off them.

mod fit;
mod npe;
mod pes;
mod surface;

pub use fit::{
    fit_equilibrium, harmonic_wavenumber, reduced_mass, VibrationalResult, AMU_KG, ANGSTROM_M,
    FIT_POINTS, HARTREE_J, LIGHT_CM_S, MASS_H1, MASS_LI7, MASS_O16,
};
pub use npe::nonparallelity_error;
pub use pes::{
    build_ansatz, qubit_hamiltonian, scan_pes, solve_points, AnsatzKind, EnergyMethod, MappingKind,
    PesCurve, PesScan, ScanConfig, ScanPoint, VqeMethod,
};
pub use surface::{fit_surface_minimum, scan_pes_2d, summary_csv, Surface2d, SurfaceMinimum, SummaryRow};

//! Exact diagonalization oracles and the VQE driver.

mod cache;
mod eigen;
mod exact;
mod fci;
mod lbfgsb;
mod vqe;

pub use cache::FciCache;
pub use eigen::{davidson, lanczos_lowest};
pub use exact::{qubit_ground_energy, qubit_spectrum, DENSE_QUBIT_LIMIT, QUBIT_LIMIT};
pub use fci::{fci_solve, DeterminantSpace, FciResult, DENSE_LIMIT, SPARSE_LIMIT};
pub use lbfgsb::{lbfgsb, LbfgsbOptions, Minimum};
pub use vqe::{
    point_seed, start_point, vqe_minimize, Evaluator, OptimizerSettings, VqeBackend, VqeProblem,
    VqeResult, FD_STEP,
};

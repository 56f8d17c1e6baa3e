//! Readout-error inversion and linear zero-noise extrapolation.

mod point;
mod readout;
mod zne;

pub use point::{run_mitigated_vqe_point, FoldSample, MitigatedPoint, MitigationSettings};
pub use readout::{mitigate_readout, z_expectation, ReadoutCalibration};
pub use zne::{zne_extrapolate, ZneFit, ZnePoint, ZneSeries};

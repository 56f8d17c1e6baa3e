//! Daubechies multiresolution machinery: filters, cascade tables, dual
//! grids and orbitals expanded on them.

mod cascade;
mod filter;
mod orbital;

pub use cascade::{evaluate_cascade, DyadicFunctionTable, DEFAULT_LEVEL};
pub use filter::{build_filter, WaveletFilter, DEFAULT_ORDER, SUPPORTED_ORDERS};
pub use orbital::{
    mo_inner_product, synthesize_mo, DualGrid, Region, Synthesis, WaveletMO, WAVELET_COMPONENTS,
};

/// Dyadic level at which plain Riemann sums of table products resolve
/// translate overlaps to better than 1e-8.
///
/// The order-2 scaling function is only Hölder-continuous, so the quadrature
/// error shrinks by roughly `2 + sqrt(3)` per level and needs level 17;
/// smoother families converge far faster.
pub fn quadrature_level(order: usize) -> u32 {
    match order {
        2 => 17,
        _ => DEFAULT_LEVEL,
    }
}

//! Nonparallelity error between two curves on a shared grid.

use super::pes::PesCurve;
use crate::error::{Error, Result};

/// Geometry values closer than this are the same grid point.
const GRID_TOL: f64 = 1e-9;

/// `max(E − E_ref) − min(E − E_ref)` in mHa.
pub fn nonparallelity_error(curve: &PesCurve, reference: &PesCurve) -> Result<f64> {
    curve.validate()?;
    reference.validate()?;
    if curve.len() != reference.len() {
        return Err(Error::GridMismatch(format!(
            "{} has {} points, {} has {}",
            curve.label,
            curve.len(),
            reference.label,
            reference.len()
        )));
    }
    if curve.is_empty() {
        return Err(Error::InvalidCurve("empty curve".into()));
    }
    if let Some((a, b)) = curve
        .geometry
        .iter()
        .zip(&reference.geometry)
        .find(|(a, b)| (*a - *b).abs() > GRID_TOL)
    {
        return Err(Error::GridMismatch(format!("geometry {a} does not match {b}")));
    }
    let diff = curve.energies.iter().zip(&reference.energies).map(|(e, r)| e - r);
    let (lo, hi) = diff.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
    Ok((hi - lo) * 1e3)
}

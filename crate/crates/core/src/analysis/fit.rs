//! Equilibrium geometry and harmonic frequency from a one-dimensional curve.

use nalgebra::{DMatrix, DVector};

use super::pes::PesCurve;
use crate::error::{Error, Result};

/// Hartree in joules (CODATA 2018).
pub const HARTREE_J: f64 = 4.3597447222071e-18;
/// Unified atomic mass unit in kilograms (CODATA 2018).
pub const AMU_KG: f64 = 1.66053906660e-27;
/// Speed of light in cm/s.
pub const LIGHT_CM_S: f64 = 2.99792458e10;
pub const ANGSTROM_M: f64 = 1e-10;

/// Isotope masses in amu.
pub const MASS_H1: f64 = 1.00782503223;
pub const MASS_LI7: f64 = 7.0160034366;
pub const MASS_O16: f64 = 15.99491461957;

/// Points used by the local fit.
pub const FIT_POINTS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibrationalResult {
    /// Fitted minimum location (Å).
    pub r_eq: f64,
    /// Energy at the fitted minimum (Ha).
    pub e_min: f64,
    /// Harmonic frequency (cm⁻¹).
    pub omega_cm1: f64,
    /// Curvature at the minimum (Ha/Å²).
    pub force_constant: f64,
    /// Reduced mass (amu).
    pub reduced_mass: f64,
    /// RMS residual of the polynomial fit (Ha).
    pub residual: f64,
}

pub fn reduced_mass(m_a: f64, m_b: f64) -> f64 {
    m_a * m_b / (m_a + m_b)
}

/// `ω = √(k/µ) / (2πc)` with k in Ha/Å² and µ in amu, returned in cm⁻¹.
pub fn harmonic_wavenumber(k_ha_per_a2: f64, mu_amu: f64) -> f64 {
    let k_si = k_ha_per_a2 * HARTREE_J / (ANGSTROM_M * ANGSTROM_M);
    (k_si / (mu_amu * AMU_KG)).sqrt() / (2.0 * std::f64::consts::PI * LIGHT_CM_S)
}

/// Least-squares polynomial coefficients (ascending powers).
pub(crate) fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidCurve(format!("polynomial fit failed: {e}")))?;
    Ok(c.iter().copied().collect())
}

/// Least-squares `a + b·x + c·y + d·x² + e·xy + f·y²` through `(x, y, z)`.
pub(crate) fn polyfit2(pts: &[(f64, f64, f64)]) -> Result<Vec<f64>> {
    let a = DMatrix::from_fn(pts.len(), 6, |i, j| {
        let (x, y, _) = pts[i];
        [1.0, x, y, x * x, x * y, y * y][j]
    });
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.2));
    let c = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidCurve(format!("surface fit failed: {e}")))?;
    Ok(c.iter().copied().collect())
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect()
}

/// Quartic fit to the seven points nearest the discrete minimum.
pub fn fit_equilibrium(curve: &PesCurve, mass_a: f64, mass_b: f64) -> Result<VibrationalResult> {
    curve.validate()?;
    let n = curve.len();
    if n < FIT_POINTS {
        return Err(Error::InvalidCurve(format!("{n} points; the fit needs {FIT_POINTS}")));
    }
    let (imin, _) = curve
        .energies
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    if imin == 0 || imin == n - 1 {
        return Err(Error::MinimumNotBracketed(format!(
            "lowest energy at the scan edge R = {}",
            curve.geometry[imin]
        )));
    }
    let half = FIT_POINTS / 2;
    let lo = imin.saturating_sub(half).min(n - FIT_POINTS);
    let xs = &curve.geometry[lo..lo + FIT_POINTS];
    let ys = &curve.energies[lo..lo + FIT_POINTS];
    let x0 = curve.geometry[imin];
    let scale = (xs[FIT_POINTS - 1] - xs[0]) / 2.0;
    let t: Vec<f64> = xs.iter().map(|x| (x - x0) / scale).collect();
    let e_ref = ys.iter().sum::<f64>() / ys.len() as f64;
    let yc: Vec<f64> = ys.iter().map(|y| y - e_ref).collect();
    let c = polyfit(&t, &yc, 4)?;
    let d1 = poly_deriv(&c);
    let d2 = poly_deriv(&d1);

    // Newton on p'(t) from the discrete minimum, kept inside the window.
    let (tmin, tmax) = (t[0], t[FIT_POINTS - 1]);
    let mut s = 0.0;
    for _ in 0..100 {
        let curv = poly_eval(&d2, s);
        if curv <= 0.0 {
            break;
        }
        let step = poly_eval(&d1, s) / curv;
        s = (s - step).clamp(tmin, tmax);
        if step.abs() < 1e-15 {
            break;
        }
    }
    let curvature = poly_eval(&d2, s) / (scale * scale);
    if !(curvature > 0.0) {
        return Err(Error::SaddleOrNoise(curvature));
    }
    if poly_eval(&d1, s).abs() > 1e-8 * (1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()))) || s <= tmin || s >= tmax {
        return Err(Error::MinimumNotBracketed(format!(
            "fitted polynomial has no minimum inside [{}, {}]",
            xs[0],
            xs[FIT_POINTS - 1]
        )));
    }
    let residual = (t
        .iter()
        .zip(&yc)
        .map(|(&ti, &yi)| (poly_eval(&c, ti) - yi).powi(2))
        .sum::<f64>()
        / FIT_POINTS as f64)
        .sqrt();
    let mu = reduced_mass(mass_a, mass_b);
    Ok(VibrationalResult {
        r_eq: x0 + s * scale,
        e_min: poly_eval(&c, s) + e_ref,
        omega_cm1: harmonic_wavenumber(curvature, mu),
        force_constant: curvature,
        reduced_mass: mu,
        residual,
    })
}

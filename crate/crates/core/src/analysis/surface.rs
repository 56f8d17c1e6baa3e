//! Two-parameter surfaces (bond length × angle) and the summary table.

use nalgebra::{Matrix2, Vector2};

use super::fit::polyfit2;
use super::pes::{scan_label, solve_points, ScanConfig, ScanPoint};
use crate::error::{Error, Result};
use crate::report::fmt12;

const AXIS_TOL: f64 = 1e-9;

/// Energies on a rectangular grid, `energies[i][j]` at `(r[i], angle[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface2d {
    pub label: String,
    pub r: Vec<f64>,
    pub angle: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceMinimum {
    pub r_eq: f64,
    pub angle_eq: f64,
    pub e_min: f64,
    /// Second derivatives at the minimum: `[[E_rr, E_ra], [E_ra, E_aa]]`.
    pub hessian: [[f64; 2]; 2],
}

fn axis(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < AXIS_TOL);
    v
}

fn locate(axis: &[f64], x: f64) -> Option<usize> {
    axis.iter().position(|a| (a - x).abs() < AXIS_TOL)
}

impl Surface2d {
    /// Grid from scattered `(r, angle) → energy` samples; every grid cell
    /// must be filled exactly once.
    pub fn from_samples(label: impl Into<String>, samples: &[([f64; 2], f64)]) -> Result<Surface2d> {
        let r = axis(samples.iter().map(|s| s.0[0]));
        let angle = axis(samples.iter().map(|s| s.0[1]));
        if r.len() * angle.len() != samples.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples do not form a {}×{} rectangle",
                samples.len(),
                r.len(),
                angle.len()
            )));
        }
        let mut energies = vec![vec![f64::NAN; angle.len()]; r.len()];
        for (g, e) in samples {
            if !e.is_finite() {
                return Err(Error::InvalidCurve(format!("non-finite energy at {g:?}")));
            }
            let (i, j) = (locate(&r, g[0]).unwrap(), locate(&angle, g[1]).unwrap());
            if !energies[i][j].is_nan() {
                return Err(Error::GridMismatch(format!("duplicate grid point {g:?}")));
            }
            energies[i][j] = *e;
        }
        Ok(Surface2d { label: label.into(), r, angle, energies })
    }

    fn discrete_minimum(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for i in 0..self.r.len() {
            for j in 0..self.angle.len() {
                if self.energies[i][j] < self.energies[best.0][best.1] {
                    best = (i, j);
                }
            }
        }
        best
    }

    /// `r,angle,energy` with `shift` subtracted from every energy.
    pub fn to_csv(&self, shift: f64) -> String {
        let mut out = String::from("r,angle,energy\n");
        for (i, r) in self.r.iter().enumerate() {
            for (j, a) in self.angle.iter().enumerate() {
                out += &format!("{},{},{}\n", fmt12(*r), fmt12(*a), fmt12(self.energies[i][j] - shift));
            }
        }
        out
    }
}

/// Six-coefficient paraboloid through the 3×3 block around the lowest sample.
pub fn fit_surface_minimum(s: &Surface2d) -> Result<SurfaceMinimum> {
    let (nr, na) = (s.r.len(), s.angle.len());
    if nr < 3 || na < 3 {
        return Err(Error::InvalidCurve(format!("{nr}×{na} grid; the fit needs 3×3")));
    }
    let (i0, j0) = s.discrete_minimum();
    if i0 == 0 || i0 == nr - 1 || j0 == 0 || j0 == na - 1 {
        return Err(Error::MinimumNotBracketed(format!(
            "lowest energy on the grid boundary at ({}, {})",
            s.r[i0], s.angle[j0]
        )));
    }
    let (xc, yc) = (s.r[i0], s.angle[j0]);
    let sx = (s.r[i0 + 1] - s.r[i0 - 1]) / 2.0;
    let sy = (s.angle[j0 + 1] - s.angle[j0 - 1]) / 2.0;
    let e_ref = s.energies[i0][j0];
    let mut pts = Vec::with_capacity(9);
    for i in i0 - 1..=i0 + 1 {
        for j in j0 - 1..=j0 + 1 {
            pts.push(((s.r[i] - xc) / sx, (s.angle[j] - yc) / sy, s.energies[i][j] - e_ref));
        }
    }
    // a + b·x + c·y + d·x² + e·xy + f·y²
    let c = polyfit2(&pts)?;
    let h = Matrix2::new(2.0 * c[3], c[4], c[4], 2.0 * c[5]);
    let det = h.determinant();
    if !(h[(0, 0)] > 0.0 && det > 0.0) {
        return Err(Error::SaddleOrNoise(if h[(0, 0)] <= 0.0 { h[(0, 0)] } else { det }));
    }
    let t = h.lu().solve(&-Vector2::new(c[1], c[2])).expect("positive definite");
    if t.iter().any(|v| v.abs() > 1.0) {
        return Err(Error::MinimumNotBracketed(format!(
            "fitted paraboloid minimum lies outside the 3×3 block around ({xc}, {yc})"
        )));
    }
    let e = c[0] + c[1] * t[0] + c[2] * t[1] + c[3] * t[0] * t[0] + c[4] * t[0] * t[1] + c[5] * t[1] * t[1];
    Ok(SurfaceMinimum {
        r_eq: xc + t[0] * sx,
        angle_eq: yc + t[1] * sy,
        e_min: e + e_ref,
        hessian: [[h[(0, 0)] / (sx * sx), h[(0, 1)] / (sx * sy)], [h[(1, 0)] / (sx * sy), h[(1, 1)] / (sy * sy)]],
    })
}

/// Scan over `(r, angle)` geometries followed by the paraboloid fit.
pub fn scan_pes_2d(cfg: &ScanConfig, geometries: &[Vec<f64>]) -> Result<(Surface2d, SurfaceMinimum, Vec<ScanPoint>)> {
    if let Some(g) = geometries.iter().find(|g| g.len() != 2) {
        return Err(Error::GridMismatch(format!("geometry {g:?} is not an (r, angle) pair")));
    }
    let (points, ne, nso) = solve_points(cfg, geometries)?;
    let samples: Vec<([f64; 2], f64)> = points.iter().map(|p| ([p.geometry[0], p.geometry[1]], p.energy)).collect();
    let surface = Surface2d::from_samples(scan_label(cfg, ne, nso), &samples)?;
    let min = fit_surface_minimum(&surface)?;
    Ok((surface, min, points))
}

/// Row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub n_orb: usize,
    pub r_eq: f64,
    pub omega_cm1: f64,
    /// Relative deviation from a reference frequency, in percent.
    pub omega_err_pct: Option<f64>,
    pub npe_mha: Option<f64>,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let opt = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
    let mut out = String::from("label,n_orb,R_eq,omega_cm1,omega_err_pct,npe_mHa\n");
    for r in rows {
        out += &format!(
            "\"{}\",{},{},{},{},{}\n",
            r.label.replace('"', "\"\""),
            r.n_orb,
            fmt12(r.r_eq),
            fmt12(r.omega_cm1),
            opt(r.omega_err_pct),
            opt(r.npe_mha)
        );
    }
    out
}

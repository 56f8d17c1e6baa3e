//! Linear zero-noise extrapolation over CNOT fold factors.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZnePoint {
    pub fold: usize,
    pub mean: f64,
    pub stderr: f64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZneSeries {
    pub points: Vec<ZnePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZneFit {
    /// Extrapolated energy at zero folds.
    pub intercept: f64,
    pub slope: f64,
    pub intercept_stderr: f64,
    /// Reduced weighted χ² of the line (0 with only two factors).
    pub residual_variance: f64,
    pub ci95: f64,
}

impl ZneSeries {
    pub fn new(points: Vec<ZnePoint>) -> Result<ZneSeries> {
        let s = ZneSeries { points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidZneSeries(m.into()));
        if self.points.len() < 2 {
            return bad("need at least two fold factors");
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.fold % 2 == 0 {
                return Err(Error::InvalidFoldFactor(p.fold));
            }
            if self.points[..i].iter().any(|q| q.fold == p.fold) {
                return bad("fold factors must be distinct");
            }
            if !p.mean.is_finite() || !(p.stderr >= 0.0) {
                return bad("energies must be finite and standard errors non-negative");
            }
        }
        Ok(())
    }
}

/// Weighted least-squares line `E = a + b·f`, evaluated at `f = 0`.
///
/// Weights are `1/stderr²` when every point has a positive standard error,
/// uniform otherwise. The intercept variance is the WLS covariance scaled
/// by `max(1, χ²/(n−2))`, so scatter beyond the stated errors widens the
/// interval; with uniform weights the residual variance sets the scale.
pub fn zne_extrapolate(series: &ZneSeries) -> Result<ZneFit> {
    series.validate()?;
    let pts = &series.points;
    let weighted = pts.iter().all(|p| p.stderr > 0.0);
    let w: Vec<f64> = pts
        .iter()
        .map(|p| if weighted { 1.0 / (p.stderr * p.stderr) } else { 1.0 })
        .collect();
    let mut a = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for (p, &wi) in pts.iter().zip(&w) {
        let f = p.fold as f64;
        a += Matrix2::new(1.0, f, f, f * f) * wi;
        rhs += Vector2::new(1.0, f) * (wi * p.mean);
    }
    let cov = a.try_inverse().ok_or_else(|| Error::InvalidZneSeries("singular fit".into()))?;
    let beta = cov * rhs;
    let dof = pts.len() as f64 - 2.0;
    let chi2: f64 = pts
        .iter()
        .zip(&w)
        .map(|(p, wi)| wi * (p.mean - beta[0] - beta[1] * p.fold as f64).powi(2))
        .sum();
    let residual_variance = if dof > 0.0 { chi2 / dof } else { 0.0 };
    let var = if weighted {
        cov[(0, 0)] * residual_variance.max(1.0)
    } else {
        cov[(0, 0)] * residual_variance
    };
    let intercept_stderr = var.max(0.0).sqrt();
    Ok(ZneFit {
        intercept: beta[0],
        slope: beta[1],
        intercept_stderr,
        residual_variance,
        ci95: 1.96 * intercept_stderr,
    })
}

//! Cascade evaluation of the scaling function and wavelet on dyadic points.

use nalgebra::DMatrix;

use super::filter::WaveletFilter;
use crate::error::{Error, Result};

/// Finest level used for point evaluation unless the caller asks otherwise.
pub const DEFAULT_LEVEL: u32 = 10;

const EIGEN_ONE_TOL: f64 = 1e-9;
const EIGEN_GAP_TOL: f64 = 1e-6;

/// `phi` and `psi` tabulated at `x = (1 - m) + n / 2^level` for
/// `n = 0 ..= (2m - 1) 2^level`.
#[derive(Debug, Clone)]
pub struct DyadicFunctionTable {
    filter: WaveletFilter,
    level: u32,
    phi: Vec<f64>,
    psi: Vec<f64>,
}

pub fn evaluate_cascade(filter: &WaveletFilter, level: u32) -> Result<DyadicFunctionTable> {
    let m = filter.order() as i64;
    let first = filter.first_index();
    let sqrt2 = std::f64::consts::SQRT_2;

    // phi at the integers 1-m ..= m: eigenvector of the refinement matrix for eigenvalue 1.
    let n_int = (2 * m) as usize;
    let refine = DMatrix::from_fn(n_int, n_int, |a, b| {
        let i = first + a as i64;
        let k = first + b as i64;
        sqrt2 * filter.h(2 * i - k)
    });
    let shifted = refine - DMatrix::identity(n_int, n_int);
    let svd = shifted.svd(false, true);
    let mut order: Vec<usize> = (0..n_int).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = svd.singular_values[order[0]];
    let second = svd.singular_values[order[1]];
    if smallest > EIGEN_ONE_TOL {
        return Err(Error::DegenerateRefinementSpectrum(format!(
            "no eigenvalue 1 (smallest singular value of M - I is {smallest:e})"
        )));
    }
    if second < EIGEN_GAP_TOL {
        return Err(Error::DegenerateRefinementSpectrum(format!(
            "eigenvalue 1 is not simple (second singular value {second:e})"
        )));
    }
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut phi: Vec<f64> = v_t.row(order[0]).iter().copied().collect();
    let total: f64 = phi.iter().sum();
    if total.abs() < 1e-12 {
        return Err(Error::DegenerateRefinementSpectrum(
            "integer values sum to zero".into(),
        ));
    }
    phi.iter_mut().for_each(|v| *v /= total);

    for l in 1..=level {
        let len = ((2 * m - 1) << l) as usize + 1;
        let half = 1i64 << (l - 1);
        let prev = phi;
        let mut next = vec![0.0; len];
        for (a, out) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in filter.indices() {
                let b = (1 - m - j) * half + a as i64;
                if b >= 0 && (b as usize) < prev.len() {
                    acc += filter.h(j) * prev[b as usize];
                }
            }
            *out = sqrt2 * acc;
        }
        phi = next;
    }

    let psi = refine_with(filter, level, &phi, |j| filter.g(j));
    Ok(DyadicFunctionTable {
        filter: filter.clone(),
        level,
        phi,
        psi,
    })
}

/// `sqrt2 * sum_j taps(j) phi(2x - j)` at every tabulated point.
fn refine_with(
    filter: &WaveletFilter,
    level: u32,
    phi: &[f64],
    taps: impl Fn(i64) -> f64,
) -> Vec<f64> {
    let m = filter.order() as i64;
    let scale = 1i64 << level;
    (0..phi.len())
        .map(|a| {
            let mut acc = 0.0;
            for j in filter.indices() {
                let b = (1 - m - j) * scale + 2 * a as i64;
                if b >= 0 && (b as usize) < phi.len() {
                    acc += taps(j) * phi[b as usize];
                }
            }
            std::f64::consts::SQRT_2 * acc
        })
        .collect()
}

impl DyadicFunctionTable {
    pub fn filter(&self) -> &WaveletFilter {
        &self.filter
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Spacing between tabulated points, `2^-level`.
    pub fn step(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    /// Support `[1 - m, m]` shared by `phi` and `psi`.
    pub fn support(&self) -> (f64, f64) {
        (self.filter.first_index() as f64, self.filter.last_index() as f64)
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Abscissa of table entry `n`.
    pub fn point(&self, n: usize) -> f64 {
        self.support().0 + n as f64 * self.step()
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_values(&self) -> &[f64] {
        &self.psi
    }

    /// `phi(x)` by linear interpolation on the table; zero outside the support.
    pub fn phi(&self, x: f64) -> f64 {
        self.interpolate(&self.phi, x)
    }

    /// `psi(x)` by linear interpolation on the table; zero outside the support.
    pub fn psi(&self, x: f64) -> f64 {
        self.interpolate(&self.psi, x)
    }

    fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return 0.0;
        }
        let t = (x - lo) / self.step();
        let n = t.floor() as usize;
        if n + 1 >= values.len() {
            return values[values.len() - 1];
        }
        let frac = t - n as f64;
        values[n] * (1.0 - frac) + values[n + 1] * frac
    }

    /// Largest `|phi(x) - sqrt2 sum_j h_j phi(2x - j)|` over the table.
    pub fn refinement_residual(&self) -> f64 {
        let rhs = refine_with(&self.filter, self.level, &self.phi, |j| self.filter.h(j));
        max_abs_diff(&self.phi, &rhs)
    }

    /// Largest `|psi(x) - sqrt2 sum_j g_j phi(2x - j)|` over the table.
    pub fn wavelet_residual(&self) -> f64 {
        let rhs = refine_with(&self.filter, self.level, &self.phi, |j| self.filter.g(j));
        max_abs_diff(&self.psi, &rhs)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::build_filter;

    #[test]
    fn integer_values_of_db2() {
        // phi(0) = (1 + sqrt3)/2, phi(1) = (1 - sqrt3)/2 for the (1-m, m) indexing.
        let t = evaluate_cascade(&build_filter(2).unwrap(), 0).unwrap();
        let s3 = 3f64.sqrt();
        assert_eq!(t.len(), 4);
        assert!(t.phi_values()[0].abs() < 1e-14);
        assert!((t.phi_values()[1] - (1.0 + s3) / 2.0).abs() < 1e-13);
        assert!((t.phi_values()[2] - (1.0 - s3) / 2.0).abs() < 1e-13);
        assert!(t.phi_values()[3].abs() < 1e-14);
    }

    #[test]
    fn partition_of_unity() {
        for order in [2, 8] {
            let t = evaluate_cascade(&build_filter(order).unwrap(), 8).unwrap();
            let per_unit = 1usize << t.level();
            for n in 0..per_unit {
                let sum: f64 = t.phi_values().iter().skip(n).step_by(per_unit).sum();
                assert!((sum - 1.0).abs() < 1e-8, "order {order} n {n}: {sum}");
            }
        }
    }

    #[test]
    fn residuals_are_small() {
        for order in [2, 4, 8] {
            let t = evaluate_cascade(&build_filter(order).unwrap(), 9).unwrap();
            assert!(t.refinement_residual() < 1e-10);
            assert!(t.wavelet_residual() < 1e-10);
        }
    }

    #[test]
    fn interpolation_hits_table_points() {
        let t = evaluate_cascade(&build_filter(4).unwrap(), 6).unwrap();
        for n in [1usize, 17, 100, 300] {
            assert!((t.phi(t.point(n)) - t.phi_values()[n]).abs() < 1e-12);
        }
        assert_eq!(t.phi(-10.0), 0.0);
        assert_eq!(t.psi(10.0), 0.0);
    }
}

//! Iterative eigensolvers for the matrix-free paths.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Lowest `k` eigenpairs of a real symmetric operator (Davidson with a
/// diagonal preconditioner).
pub fn davidson(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    diag: &[f64],
    k: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let dim = diag.len();
    let k = k.min(dim);
    let max_sub = (8 * k).max(40).min(dim);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let n_guess = (k + 4).min(dim);
    let mut pending: Vec<Vec<f64>> = order[..n_guess]
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            v
        })
        .collect();

    for _ in 0..max_iter {
        for mut v in pending.drain(..) {
            orthogonalize(&mut v, &basis);
            let nv = norm(&v);
            if nv > 1e-10 {
                v.iter_mut().for_each(|x| *x /= nv);
                images.push(apply(&v));
                basis.push(v);
            }
        }
        let m = basis.len();
        let t = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &images[j]));
        let t = (&t + t.transpose()) * 0.5;
        let eig = SymmetricEigen::new(t);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut values = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(k);
        let mut converged = true;
        for &c in idx.iter().take(k) {
            let theta = eig.eigenvalues[c];
            let y = eig.eigenvectors.column(c);
            let mut x = vec![0.0; dim];
            let mut r = vec![0.0; dim];
            for (a, coef) in y.iter().enumerate() {
                x.iter_mut().zip(&basis[a]).for_each(|(xi, b)| *xi += coef * b);
                r.iter_mut().zip(&images[a]).for_each(|(ri, b)| *ri += coef * b);
            }
            r.iter_mut().zip(&x).for_each(|(ri, xi)| *ri -= theta * xi);
            if norm(&r) > tol {
                converged = false;
                let corr: Vec<f64> = r
                    .iter()
                    .zip(diag)
                    .map(|(ri, d)| {
                        let den = theta - d;
                        ri / if den.abs() < 1e-8 { 1e-8f64.copysign(den) } else { den }
                    })
                    .collect();
                pending.push(corr);
            }
            values.push(theta);
            vectors.push(x);
        }
        if converged {
            return Ok((values, vectors));
        }
        if basis.len() + pending.len() > max_sub {
            let (old_b, old_i) = (basis.clone(), images.clone());
            basis.clear();
            images.clear();
            for &c in idx.iter().take(k.max(2).min(m)) {
                let y = eig.eigenvectors.column(c);
                let mut x = vec![0.0; dim];
                let mut ax = vec![0.0; dim];
                for (a, coef) in y.iter().enumerate() {
                    x.iter_mut().zip(&old_b[a]).for_each(|(xi, b)| *xi += coef * b);
                    ax.iter_mut().zip(&old_i[a]).for_each(|(xi, b)| *xi += coef * b);
                }
                orthogonalize(&mut x, &basis);
                let nx = norm(&x);
                if nx > 1e-10 {
                    x.iter_mut().for_each(|v| *v /= nx);
                    basis.push(x);
                    images.push(ax.iter().map(|v| v / nx).collect());
                }
            }
        }
    }
    Err(Error::Capacity(format!(
        "Davidson did not converge to {tol:e} within {max_iter} iterations"
    )))
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lowest eigenvalue of a Hermitian operator by Lanczos with full
/// reorthogonalization.
pub fn lanczos_lowest(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    dim: usize,
    tol: f64,
) -> Result<f64> {
    let mut rng = stream_rng(0x1a2c, &[dim as u64]);
    let mut q: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let n0 = cdot(&q, &q).re.sqrt();
    q.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let max_steps = dim.min(600);
    let mut last = f64::INFINITY;
    for j in 0..max_steps {
        let mut w = apply(&basis[j]);
        let a = cdot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = cdot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnorm = cdot(&w, &w).re.sqrt();

        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, &emin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let ritz_residual = bnorm * eig.eigenvectors[(m - 1, imin)].abs();
        if ritz_residual < tol || bnorm < 1e-12 || (j > 20 && (last - emin).abs() < tol * 1e-2) {
            return Ok(emin);
        }
        last = emin;
        beta.push(bnorm);
        w.iter_mut().for_each(|x| *x /= bnorm);
        basis.push(w);
    }
    Ok(last)
}

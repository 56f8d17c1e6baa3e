//! Box-constrained limited-memory BFGS with projected backtracking.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsbOptions {
    pub memory: usize,
    /// Stop when an iteration lowers f by less than this.
    pub ftol: f64,
    /// Stop when the projected gradient's largest entry is below this.
    pub gtol: f64,
    pub max_iter: usize,
}

impl Default for LbfgsbOptions {
    fn default() -> Self {
        LbfgsbOptions { memory: 10, ftol: 1e-9, gtol: 1e-8, max_iter: 500 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    /// f at the start and after every accepted iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn projected_gradient_norm(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| ((x[i] - g[i]).clamp(lo[i], hi[i]) - x[i]).abs())
        .fold(0.0, f64::max)
}

/// Minimize `f` over the box `[lo, hi]` (entries may be infinite).
pub fn lbfgsb(
    f: impl Fn(&[f64]) -> Result<f64>,
    grad: impl Fn(&[f64]) -> Result<Vec<f64>>,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: &LbfgsbOptions,
) -> Result<Minimum> {
    let n = x0.len();
    if lo.len() != n || hi.len() != n || (0..n).any(|i| lo[i] > hi[i]) {
        return Err(Error::InvalidProblem("bounds do not match the parameter vector".into()));
    }
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let mut fx = f(&x)?;
    let mut evaluations = 1;
    let mut g = grad(&x)?;
    let mut trace = vec![fx];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        if n == 0 || projected_gradient_norm(&x, &g, lo, hi) < opts.gtol {
            converged = true;
            break;
        }
        let free: Vec<bool> = (0..n)
            .map(|i| !((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)))
            .collect();
        let masked = |v: &[f64]| -> Vec<f64> {
            v.iter().zip(&free).map(|(&a, &fr)| if fr { a } else { 0.0 }).collect()
        };

        // Two-loop recursion on the free subspace.
        let mut q = masked(&g);
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * dot(&masked(s), &q);
            for i in 0..n {
                q[i] -= a * y[i] * free[i] as u8 as f64;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = memory.back() {
            let (sm, ym) = (masked(s), masked(y));
            let yy = dot(&ym, &ym);
            if yy > 0.0 {
                let gamma = dot(&sm, &ym) / yy;
                if gamma > 0.0 {
                    q.iter_mut().for_each(|v| *v *= gamma);
                }
            }
        }
        for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(&masked(y), &q);
            for i in 0..n {
                q[i] += (a - b) * s[i] * free[i] as u8 as f64;
            }
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        if dot(&d, &g) >= 0.0 {
            memory.clear();
            d = masked(&g).iter().map(|v| -v).collect();
        }

        let mut step = if memory.is_empty() {
            let gmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax > 1.0 { 1.0 / gmax } else { 1.0 }
        } else {
            1.0
        };
        let accepted = loop {
            let mut xn: Vec<f64> = (0..n).map(|i| x[i] + step * d[i]).collect();
            project(&mut xn, lo, hi);
            let moved: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
            let fxn = f(&xn)?;
            evaluations += 1;
            if fxn <= fx + ARMIJO * dot(&g, &moved) && fxn <= fx {
                break Some((xn, fxn));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((xn, fxn)) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };
        iterations += 1;
        let gn = grad(&xn)?;
        let s: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).max(f64::MIN_POSITIVE) {
            memory.push_back((s, y, 1.0 / sy));
            if memory.len() > opts.memory {
                memory.pop_front();
            }
        }
        let decrease = fx - fxn;
        x = xn;
        fx = fxn;
        g = gn;
        trace.push(fx);
        if decrease < opts.ftol {
            converged = true;
            break;
        }
    }
    Ok(Minimum { x, f: fx, trace, iterations, evaluations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unbounded(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    #[test]
    fn one_dimensional_quadratic() {
        let (lo, hi) = unbounded(1);
        let opts = LbfgsbOptions { ftol: 0.0, gtol: 1e-12, ..Default::default() };
        let m = lbfgsb(
            |x| Ok(3.0 * (x[0] - 0.7).powi(2) - 1.0),
            |x| Ok(vec![6.0 * (x[0] - 0.7)]),
            &[5.0],
            &lo,
            &hi,
            &opts,
        )
        .unwrap();
        assert!((m.x[0] - 0.7).abs() < 1e-8);
        assert!(m.converged);
    }

    #[test]
    fn rosenbrock() {
        let (lo, hi) = unbounded(2);
        let f = |x: &[f64]| Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let g = |x: &[f64]| {
            Ok(vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ])
        };
        let opts = LbfgsbOptions { ftol: 0.0, gtol: 1e-10, max_iter: 1000, ..Default::default() };
        let m = lbfgsb(f, g, &[-1.2, 1.0], &lo, &hi, &opts).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn active_bound() {
        // Unconstrained minimum at (2, -3); box clips both coordinates.
        let f = |x: &[f64]| Ok((x[0] - 2.0).powi(2) + (x[1] + 3.0).powi(2) + 0.5 * x[0] * x[1]);
        let g = |x: &[f64]| Ok(vec![2.0 * (x[0] - 2.0) + 0.5 * x[1], 2.0 * (x[1] + 3.0) + 0.5 * x[0]]);
        let m = lbfgsb(f, g, &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0], &LbfgsbOptions::default()).unwrap();
        // At x0 = 1 the bound is active; x1 then minimizes 2(x1+3) + 0.5 = 0 → clipped to -1.
        assert_eq!(m.x, vec![1.0, -1.0]);
        assert!(m.converged);
    }

    #[test]
    fn bad_bounds() {
        let r = lbfgsb(|_| Ok(0.0), |_| Ok(vec![0.0]), &[0.0], &[1.0], &[0.0], &LbfgsbOptions::default());
        assert!(r.is_err());
    }
}

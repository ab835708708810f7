//! Levenberg-Marquardt for small dense problems.

use alloc::vec;
use alloc::vec::Vec;



use super::linear::SymMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative cost decrease falls below this.
    pub cost_tol: f64,
    /// Stop when the relative parameter step falls below this.
    pub step_tol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iterations: 500, cost_tol: 1e-15, step_tol: 1e-12, initial_lambda: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    /// (JᵀJ)⁻¹ at the solution, unscaled.
    pub jtj_inverse: SymMatrix,
    pub iterations: usize,
}

/// Minimise Σ r_i(p)² where `model(p, r, j)` fills residuals `r` (length m)
/// and the row-major Jacobian `j` (m × n).
pub fn levenberg_marquardt<F>(
    mut model: F,
    p0: &[f64],
    m: usize,
    opts: &LmOptions,
) -> Result<LmResult>
where
    F: FnMut(&[f64], &mut [f64], &mut [f64]),
{
    let n = p0.len();
    if m < n {
        return Err(Error::NotEnoughData { needed: n, got: m });
    }
    let mut p = p0.to_vec();
    let mut r = vec![0.0; m];
    let mut j = vec![0.0; m * n];
    let mut r_try = vec![0.0; m];
    let mut j_try = vec![0.0; m * n];
    model(&p, &mut r, &mut j);
    let mut cost: f64 = r.iter().map(|x| x * x).sum();
    if !cost.is_finite() {
        return Err(Error::NotConverged { what: "Levenberg-Marquardt", iterations: 0, residual: cost });
    }
    let mut lambda = opts.initial_lambda;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let (jtj, jtr) = normal_equations(&j, &r, m, n);
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..n {
                let d = jtj.get(i, i);
                a.set(i, i, d + lambda * d.max(1e-300));
            }
            let step = match a.solve(&jtr) {
                Ok(s) => s,
                Err(_) => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let p_try: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a - b).collect();
            model(&p_try, &mut r_try, &mut j_try);
            let c_try: f64 = r_try.iter().map(|x| x * x).sum();
            if c_try.is_finite() && c_try <= cost {
                let rel_step = step
                    .iter()
                    .zip(&p)
                    .map(|(s, q)| (s / q.abs().max(1e-12)).abs())
                    .fold(0.0, f64::max);
                let rel_cost = (cost - c_try) / cost.max(1e-300);
                p = p_try;
                core::mem::swap(&mut r, &mut r_try);
                core::mem::swap(&mut j, &mut j_try);
                cost = c_try;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if rel_step < opts.step_tol || rel_cost < opts.cost_tol || cost == 0.0 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                break;
            }
        }
        if converged || !improved {
            // A step that cannot reduce the cost at huge damping means we sit
            // at a stationary point.
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "Levenberg-Marquardt",
            iterations,
            residual: cost,
        });
    }
    let (jtj, _) = normal_equations(&j, &r, m, n);
    let jtj_inverse = jtj.inverse()?;
    Ok(LmResult { params: p, cost, jtj_inverse, iterations })
}

fn normal_equations(j: &[f64], r: &[f64], m: usize, n: usize) -> (SymMatrix, Vec<f64>) {
    let mut jtj = SymMatrix::zeros(n);
    let mut jtr = vec![0.0; n];
    for i in 0..m {
        let row = &j[i * n..(i + 1) * n];
        for a in 0..n {
            jtr[a] += row[a] * r[i];
            for b in 0..=a {
                let v = jtj.get(a, b) + row[a] * row[b];
                jtj.set(a, b, v);
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            let v = jtj.get(a, b);
            jtj.set(b, a, v);
        }
    }
    (jtj, jtr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_as_least_squares() {
        let res = levenberg_marquardt(
            |p, r, j| {
                r[0] = 10.0 * (p[1] - p[0] * p[0]);
                r[1] = 1.0 - p[0];
                j[0] = -20.0 * p[0];
                j[1] = 10.0;
                j[2] = -1.0;
                j[3] = 0.0;
            },
            &[-1.2, 1.0],
            2,
            &LmOptions::default(),
        )
        .unwrap();
        assert!((res.params[0] - 1.0).abs() < 1e-8);
        assert!((res.params[1] - 1.0).abs() < 1e-8);
    }
}

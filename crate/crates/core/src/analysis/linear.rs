//! Small dense linear algebra for the fitters (n ≤ a handful of parameters).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;


use crate::error::{Error, Result};

/// Symmetric positive-definite matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Cholesky factor L (lower), failing if a pivot falls below `rel_tol`
    /// times the largest diagonal entry.
    pub fn cholesky(&self, rel_tol: f64) -> Result<Vec<f64>> {
        let n = self.n;
        let scale = (0..n).map(|i| self.get(i, i).abs()).fold(0.0, f64::max);
        if !(scale > 0.0) {
            return Err(Error::RankDeficient);
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > rel_tol * scale) {
                return Err(Error::RankDeficient);
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(l)
    }

    /// Solve A x = b given the Cholesky factor of A.
    pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[i * n + k] * y[k];
            }
            y[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[k * n + i] * y[k];
            }
            y[i] /= l[i * n + i];
        }
        y
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let l = self.cholesky(1e-13)?;
        Ok(Self::cholesky_solve(&l, self.n, b))
    }

    pub fn inverse(&self) -> Result<SymMatrix> {
        let n = self.n;
        let l = self.cholesky(1e-13)?;
        let mut inv = SymMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = Self::cholesky_solve(&l, n, &e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        Ok(inv)
    }
}

/// Weighted linear least squares y ≈ Σ_k c_k basis_k(x).
///
/// Returns coefficients, the unscaled covariance (AᵀWA)⁻¹ and the weighted
/// residual sum of squares.
pub fn linear_least_squares(
    rows: &[Vec<f64>],
    y: &[f64],
    weights: Option<&[f64]>,
) -> Result<(Vec<f64>, SymMatrix, f64)> {
    let m = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.len() != y.len() || weights.is_some_and(|w| w.len() != y.len()) {
        return Err(Error::DimensionMismatch { what: "design matrix rows vs observations" });
    }
    if rows.len() < m || m == 0 {
        return Err(Error::NotEnoughData { needed: m.max(1), got: rows.len() });
    }
    let mut ata = SymMatrix::zeros(m);
    let mut atb = vec![0.0; m];
    for (i, r) in rows.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        for a in 0..m {
            atb[a] += w * r[a] * y[i];
            for b in 0..=a {
                let v = ata.get(a, b) + w * r[a] * r[b];
                ata.set(a, b, v);
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            let v = ata.get(a, b);
            ata.set(b, a, v);
        }
    }
    let coef = ata.solve(&atb)?;
    let cov = ata.inverse()?;
    let mut rss = 0.0;
    for (i, r) in rows.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        let model: f64 = r.iter().zip(&coef).map(|(a, c)| a * c).sum();
        rss += w * (y[i] - model) * (y[i] - model);
    }
    Ok((coef, cov, rss))
}

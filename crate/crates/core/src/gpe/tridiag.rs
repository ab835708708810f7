//! Cayley-form Crank-Nicolson solves for a fixed tridiagonal operator.

use alloc::vec::Vec;

use num_complex::Complex64;

/// Real tridiagonal operator K with rows (lower, diag, upper).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tridiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// (Kψ)_k for a line of values.
    #[inline]
    pub fn apply_at(&self, k: usize, prev: Complex64, cur: Complex64, next: Complex64) -> Complex64 {
        prev * self.lower[k] + cur * self.diag[k] + next * self.upper[k]
    }
}

/// Prefactored (1 + sK)⁻¹(1 − sK) for a fixed complex s.
#[derive(Debug, Clone)]
pub(crate) struct Cayley {
    pub op: Tridiag,
    pub s: Complex64,
    /// Modified upper coefficients c'ₖ.
    cprime: Vec<Complex64>,
    /// 1/(bₖ − aₖ c'ₖ₋₁)
    inv: Vec<Complex64>,
}

impl Cayley {
    pub fn new(op: Tridiag, s: Complex64) -> Self {
        let n = op.len();
        let mut cprime = Vec::with_capacity(n);
        let mut inv = Vec::with_capacity(n);
        let one = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let a = s * op.lower[k];
            let b = one + s * op.diag[k];
            let c = s * op.upper[k];
            let den = if k == 0 { b } else { b - a * cprime[k - 1] };
            let m = one / den;
            inv.push(m);
            cprime.push(c * m);
        }
        Self { op, s, cprime, inv }
    }

    /// In-place solve along one contiguous line.
    pub fn apply_line(&self, x: &mut [Complex64]) {
        let n = x.len();
        debug_assert_eq!(n, self.op.len());
        let s = self.s;
        let zero = Complex64::new(0.0, 0.0);
        let mut prev_orig = zero;
        let mut prev_d = zero;
        for k in 0..n {
            let cur = x[k];
            let next = if k + 1 < n { x[k + 1] } else { zero };
            let r = cur - s * self.op.apply_at(k, prev_orig, cur, next);
            let d = (r - s * self.op.lower[k] * prev_d) * self.inv[k];
            x[k] = d;
            prev_orig = cur;
            prev_d = d;
        }
        for k in (0..n - 1).rev() {
            let nx = x[k + 1];
            x[k] -= self.cprime[k] * nx;
        }
    }

    /// In-place solve along the slow axis of a row-major block with `width`
    /// independent lines; `scratch` holds one row.
    pub fn apply_strided(&self, x: &mut [Complex64], width: usize, scratch: &mut Vec<Complex64>) {
        let n = self.op.len();
        debug_assert_eq!(x.len(), n * width);
        let s = self.s;
        scratch.clear();
        scratch.resize(width, Complex64::new(0.0, 0.0));
        let mut cur_orig: Vec<Complex64> = Vec::with_capacity(width);
        for k in 0..n {
            let (lo, diag, up) = (self.op.lower[k], self.op.diag[k], self.op.upper[k]);
            let sl = s * lo;
            let m = self.inv[k];
            cur_orig.clear();
            cur_orig.extend_from_slice(&x[k * width..(k + 1) * width]);
            let (head, tail) = x.split_at_mut(k * width);
            let (row, rest) = tail.split_at_mut(width);
            let prev_d = if k > 0 { Some(&head[(k - 1) * width..]) } else { None };
            let next_orig = if k + 1 < n { Some(&rest[..width]) } else { None };
            for j in 0..width {
                let cur = cur_orig[j];
                let mut kpsi = cur * diag;
                if k > 0 {
                    kpsi += scratch[j] * lo;
                }
                if let Some(nx) = next_orig {
                    kpsi += nx[j] * up;
                }
                let mut r = cur - s * kpsi;
                if let Some(pd) = prev_d {
                    r -= sl * pd[j];
                }
                row[j] = r * m;
            }
            core::mem::swap(scratch, &mut cur_orig);
        }
        for k in (0..n - 1).rev() {
            let c = self.cprime[k];
            let (head, tail) = x.split_at_mut((k + 1) * width);
            let row = &mut head[k * width..];
            for j in 0..width {
                row[j] -= c * tail[j];
            }
        }
    }
}

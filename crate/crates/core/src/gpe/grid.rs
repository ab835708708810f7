//! Cylindrical grid, two-component field and pointwise pulse mappings.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use super::tridiag::Tridiag;
use crate::constants::PI;
use crate::error::{Error, Result};

/// Cell-centred (ρ, z) grid in oscillator units. Row-major with z fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CylGrid {
    pub n_rho: usize,
    pub n_z: usize,
    pub d_rho: f64,
    pub d_z: f64,
    pub rho_max: f64,
    pub z_max: f64,
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    /// 2πρ dρ dz per cell.
    pub weights: Vec<f64>,
    /// SI length of one grid unit, m.
    pub length_unit: f64,
}

impl CylGrid {
    pub fn new(n_rho: usize, n_z: usize, rho_max: f64, z_max: f64, length_unit: f64) -> Result<Self> {
        if n_rho < 4 || n_z < 4 {
            return Err(Error::InvalidParameter {
                name: "grid size",
                value: n_rho.min(n_z) as f64,
                reason: "need at least 4 cells per axis",
            });
        }
        crate::error::positive("rho_max", rho_max)?;
        crate::error::positive("z_max", z_max)?;
        let d_rho = rho_max / n_rho as f64;
        let d_z = 2.0 * z_max / n_z as f64;
        let rho: Vec<f64> = (0..n_rho).map(|i| (i as f64 + 0.5) * d_rho).collect();
        let z: Vec<f64> = (0..n_z).map(|j| -z_max + (j as f64 + 0.5) * d_z).collect();
        let mut weights = Vec::with_capacity(n_rho * n_z);
        for &r in &rho {
            weights.extend(core::iter::repeat(2.0 * PI * r * d_rho * d_z).take(n_z));
        }
        Ok(Self { n_rho, n_z, d_rho, d_z, rho_max, z_max, rho, z, weights, length_unit })
    }

    pub fn len(&self) -> usize {
        self.n_rho * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i_rho: usize, j_z: usize) -> usize {
        i_rho * self.n_z + j_z
    }

    /// −½ × radial Laplacian (1/ρ)∂ρ(ρ∂ρ) with zero flux at the axis and
    /// ψ = 0 beyond ρ_max.
    pub(crate) fn radial_kinetic(&self) -> Tridiag {
        let h2 = self.d_rho * self.d_rho;
        let n = self.n_rho;
        let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let r = self.rho[i];
            let rm = i as f64 * self.d_rho;
            let rp = (i as f64 + 1.0) * self.d_rho;
            lower[i] = -0.5 * rm / (r * h2);
            upper[i] = -0.5 * rp / (r * h2);
            diag[i] = 0.5 * (rm + rp) / (r * h2);
        }
        upper[n - 1] = 0.0;
        Tridiag { lower, diag, upper }
    }

    /// −½ ∂²/∂z² with ψ = 0 beyond ±z_max.
    pub(crate) fn axial_kinetic(&self) -> Tridiag {
        let h2 = self.d_z * self.d_z;
        let n = self.n_z;
        let mut lower = vec![-0.5 / h2; n];
        let diag = vec![1.0 / h2; n];
        let mut upper = vec![-0.5 / h2; n];
        lower[0] = 0.0;
        upper[n - 1] = 0.0;
        Tridiag { lower, diag, upper }
    }

    /// Σ w f over the grid.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(k, w)| w * f(k)).sum()
    }
}

/// Two-component wavefunction normalised to the atom number.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: Arc<CylGrid>,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    /// Elapsed evolution time, oscillator units.
    pub t: f64,
}

impl SpinorField {
    pub fn zeros(grid: Arc<CylGrid>) -> Self {
        let n = grid.len();
        let z = Complex64::new(0.0, 0.0);
        Self { grid, psi1: vec![z; n], psi2: vec![z; n], t: 0.0 }
    }

    pub fn populations(&self) -> (f64, f64) {
        let g = &self.grid;
        (g.integrate(|k| self.psi1[k].norm_sqr()), g.integrate(|k| self.psi2[k].norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        let (a, b) = self.populations();
        a + b
    }

    /// ∫ψ₁*ψ₂ dV
    pub fn overlap(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, w) in self.grid.weights.iter().enumerate() {
            acc += self.psi1[k].conj() * self.psi2[k] * *w;
        }
        acc
    }

    /// Multiply both components by e^{iθ}.
    pub fn rotate_global_phase(&mut self, theta: f64) {
        let c = Complex64::from_polar(1.0, theta);
        self.psi1.iter_mut().chain(self.psi2.iter_mut()).for_each(|x| *x *= c);
    }

    /// arg(ψ₂ψ₁*) per cell.
    pub fn relative_phase(&self) -> Vec<f64> {
        self.psi1.iter().zip(&self.psi2).map(|(a, b)| (b * a.conj()).arg()).collect()
    }
}

/// ψ₂ → e^{iφ}ψ₂, then ψ₁ → (ψ₁ − iψ₂)/√2, ψ₂ → (ψ₂ − iψ₁)/√2.
pub fn apply_pi_half(field: &mut SpinorField, phase: f64) {
    let e = Complex64::from_polar(1.0, phase);
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let mi = Complex64::new(0.0, -1.0);
    for (a, b) in field.psi1.iter_mut().zip(field.psi2.iter_mut()) {
        let (p1, p2) = (*a, *b * e);
        *a = (p1 + mi * p2) * r;
        *b = (p2 + mi * p1) * r;
    }
}

/// ψ₁ → −iψ₂, ψ₂ → −iψ₁.
pub fn apply_pi(field: &mut SpinorField) {
    let mi = Complex64::new(0.0, -1.0);
    for (a, b) in field.psi1.iter_mut().zip(field.psi2.iter_mut()) {
        let (p1, p2) = (*a, *b);
        *a = mi * p2;
        *b = mi * p1;
    }
}

/// V = 2|∫ψ₁*ψ₂|/N.
pub fn interference_visibility(field: &SpinorField) -> Result<f64> {
    let n = field.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((2.0 * field.overlap().norm() / n).min(1.0))
}

/// Fraction of atoms in state 2 after a final π/2 pulse with phase φ.
pub fn output_fraction(field: &SpinorField, phase: f64) -> Result<f64> {
    let mut f = field.clone();
    apply_pi_half(&mut f, phase);
    let (_, n2) = f.populations();
    let n = f.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(n2 / n)
}

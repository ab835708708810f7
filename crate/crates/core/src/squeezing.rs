//! One-axis-twisting squeezed input for a Ramsey readout.
//!
//! The collective spin starts in the coherent state along +x (a π/2 pulse on
//! all atoms in the lower state) and is twisted by e^{−iμ J_z²}. The readout
//! rotates the state by φ about x and measures J_z, so φ selects which
//! quadrature of the y-z noise ellipse reaches the detector. The phase
//! signal is a small rotation that tilts the mean spin into z, giving
//! d⟨J_z⟩/dθ = ⟨J_x⟩.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::atomphys::Couplings;
use crate::error::{Error, Result};

/// Largest atom number accepted by the state-vector oracle.
pub const MAX_DICKE_ATOMS: usize = 200;

/// Twisting rate χ = (g₁₁ − 2g₁₂ + g₂₂)/2, rad/s.
pub fn twisting_rate(c: &Couplings) -> f64 {
    0.5 * c.nonlinearity()
}

/// Standard quantum limit 1/√N.
pub fn sql(n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter { name: "atom_number", value: n, reason: "must be >= 1" });
    }
    Ok(1.0 / n.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OatConfig {
    pub n: f64,
    /// rad/s
    pub chi: f64,
    /// s
    pub prep_time: f64,
    /// Readout rotation angles, rad.
    pub phases: Vec<f64>,
}

impl OatConfig {
    /// χ from mean-field couplings, scaled by `chi_multiplier`.
    pub fn from_couplings(c: &Couplings, n: f64, prep_time: f64, chi_multiplier: f64, phases: Vec<f64>) -> Self {
        Self { n, chi: twisting_rate(c) * chi_multiplier, prep_time, phases }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 2.0) {
            return Err(Error::InvalidParameter { name: "atom_number", value: self.n, reason: "must be >= 2" });
        }
        crate::error::non_negative("prep_time", self.prep_time)?;
        if !self.chi.is_finite() {
            return Err(Error::InvalidParameter { name: "chi", value: self.chi, reason: "must be finite" });
        }
        Ok(())
    }

    /// μ = χ t
    pub fn mu_twist(&self) -> f64 {
        self.chi * self.prep_time
    }
}

/// First and second moments of the twisted state. ⟨J_y⟩ = ⟨J_z⟩ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OatMoments {
    pub n: f64,
    pub mu: f64,
    pub mean_x: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_z: f64,
    /// ⟨{J_y, J_z}⟩/2
    pub cov_yz: f64,
}

impl OatMoments {
    /// Var(J_z) after rotating the state by φ about x.
    pub fn readout_variance(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        c * c * self.var_z + s * s * self.var_y + 2.0 * s * c * self.cov_yz
    }

    /// Smallest and largest readout variance, with the angle of the smallest.
    pub fn principal_variances(&self) -> (f64, f64, f64) {
        let mean = 0.5 * (self.var_y + self.var_z);
        let half = 0.5 * (self.var_y - self.var_z);
        let r = half.hypot(self.cov_yz);
        let big = mean + r;
        let det = self.var_y * self.var_z - self.cov_yz * self.cov_yz;
        let small = if big > 0.0 { det / big } else { mean - r };
        // Var(φ) = mean − half cos2φ + cov sin2φ, minimal where (−half, cov)·(cos2φ, sin2φ) = −r
        let phi = 0.5 * (-self.cov_yz).atan2(half);
        (small, big, phi)
    }

    /// Δφ√N at readout angle φ; +∞ where the mean spin vanishes.
    pub fn normalized_sensitivity(&self, phi: f64) -> f64 {
        normalized(self.readout_variance(phi), self.mean_x, self.n)
    }
}

fn normalized(var: f64, mean_x: f64, n: f64) -> f64 {
    if mean_x == 0.0 {
        f64::INFINITY
    } else {
        (var.max(0.0) * n).sqrt() / mean_x.abs()
    }
}

/// cos(x)^k computed through ln cos for large k.
fn cos_pow(x: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    let c = x.cos();
    if c <= 0.0 {
        return c.powf(k);
    }
    let s = (0.5 * x).sin();
    (k * (-2.0 * s * s).ln_1p()).exp()
}

/// Analytic moments of e^{−iμJ_z²} applied to the x-polarised coherent state.
pub fn oat_moments(n: f64, mu: f64) -> Result<OatMoments> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::InvalidParameter { name: "atom_number", value: n, reason: "must be >= 2" });
    }
    let j = 0.5 * n;
    let mean_x = j * cos_pow(mu, n - 1.0);
    // 1 − cos^{N−2}(2μ) without cancellation when the power is near one
    let c2 = (2.0 * mu).cos();
    let a = if c2 > 0.0 {
        let s = mu.sin();
        -((n - 2.0) * (-2.0 * s * s).ln_1p()).exp_m1()
    } else {
        1.0 - c2.powf(n - 2.0)
    };
    let b = 4.0 * mu.sin() * cos_pow(mu, n - 2.0);
    let var_z = 0.5 * j;
    let var_y = 0.5 * j * (1.0 + (j - 0.5) * a);
    let cov_yz = 0.25 * j * (j - 0.5) * b;
    let var_x = j * (j + 1.0) - var_z - var_y - mean_x * mean_x;
    Ok(OatMoments { n, mu, mean_x, var_x, var_y, var_z, cov_yz })
}

/// Δφ√N against readout angle.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub phases: Vec<f64>,
    /// Δφ√N, `f64::INFINITY` where the signal slope vanishes.
    pub normalized: Vec<f64>,
    /// Analytic minimum over all angles and where it occurs.
    pub min_value: f64,
    pub min_phase: f64,
}

impl SensitivityCurve {
    /// Smallest sampled value and its angle.
    pub fn sampled_min(&self) -> Option<(f64, f64)> {
        self.phases
            .iter()
            .zip(&self.normalized)
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(p, v)| (*p, *v))
    }
}

pub fn phase_sensitivity(cfg: &OatConfig) -> Result<SensitivityCurve> {
    cfg.validate()?;
    let m = oat_moments(cfg.n, cfg.mu_twist())?;
    let normalized = cfg.phases.iter().map(|&p| m.normalized_sensitivity(p)).collect();
    let (small, _, phi) = m.principal_variances();
    Ok(SensitivityCurve {
        phases: cfg.phases.clone(),
        normalized,
        min_value: normalized_min(small, m.mean_x, cfg.n),
        min_phase: phi,
    })
}

fn normalized_min(var: f64, mean_x: f64, n: f64) -> f64 {
    normalized(var, mean_x, n)
}

/// Operation on a Dicke-basis state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DickeOp {
    /// e^{−iθ n̂·J} for a unit axis.
    Rotate { axis: [f64; 3], angle: f64 },
    /// e^{−iμ J_z²}
    Twist(f64),
}

/// Symmetric N-atom state in the J_z basis, m = −j..j.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

/// Exact state after applying `ops` to all atoms in the lower state.
pub fn dicke_oracle(n: usize, ops: &[DickeOp]) -> Result<DickeState> {
    let mut s = DickeState::all_down(n)?;
    for op in ops {
        s.apply(op)?;
    }
    Ok(s)
}

/// The π/2 pulse and twist that produce the state described by [`oat_moments`].
pub fn oat_sequence(mu: f64) -> [DickeOp; 2] {
    [
        DickeOp::Rotate { axis: [0.0, 1.0, 0.0], angle: -0.5 * core::f64::consts::PI },
        DickeOp::Twist(mu),
    ]
}

impl DickeState {
    pub fn all_down(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DICKE_ATOMS {
            return Err(Error::TooManyAtoms { n, max: MAX_DICKE_ATOMS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    fn j(&self) -> f64 {
        0.5 * self.n as f64
    }

    fn m(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    /// ⟨m+1|J₊|m⟩ for index k (m = k − j).
    fn raise(&self, k: usize) -> f64 {
        let (j, m) = (self.j(), self.m(k));
        (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }

    /// (n̂·J) ψ
    fn apply_axis(&self, axis: [f64; 3], psi: &[Complex64]) -> Vec<Complex64> {
        let d = psi.len();
        // n̂·J = nz J_z + (nx − i ny)/2 J₊ + (nx + i ny)/2 J₋
        let cp = Complex64::new(0.5 * axis[0], -0.5 * axis[1]);
        let cm = Complex64::new(0.5 * axis[0], 0.5 * axis[1]);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for k in 0..d {
            out[k] += psi[k] * (axis[2] * self.m(k));
            if k + 1 < d {
                let r = self.raise(k);
                out[k + 1] += cp * psi[k] * r;
                out[k] += cm * psi[k + 1] * r;
            }
        }
        out
    }

    pub fn apply(&mut self, op: &DickeOp) -> Result<()> {
        match *op {
            DickeOp::Twist(mu) => {
                for k in 0..self.amps.len() {
                    let m = self.m(k);
                    self.amps[k] *= Complex64::from_polar(1.0, -mu * m * m);
                }
            }
            DickeOp::Rotate { axis, angle } => {
                let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
                if !(norm > 0.0) || !angle.is_finite() {
                    return Err(Error::InvalidParameter { name: "rotation", value: norm, reason: "needs a nonzero axis and finite angle" });
                }
                let axis = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
                // Taylor series on short steps with |h|·j ≤ 1/2
                let steps = ((angle.abs() * self.j().max(1.0)) / 0.5).ceil().max(1.0) as usize;
                let h = angle / steps as f64;
                let minus_ih = Complex64::new(0.0, -h);
                for _ in 0..steps {
                    let mut term = self.amps.clone();
                    let mut acc = self.amps.clone();
                    for order in 1..200 {
                        let next = self.apply_axis(axis, &term);
                        let scale = minus_ih / order as f64;
                        let mut size = 0.0;
                        for (t, x) in term.iter_mut().zip(next) {
                            *t = x * scale;
                            size += t.norm_sqr();
                        }
                        for (a, t) in acc.iter_mut().zip(&term) {
                            *a += *t;
                        }
                        if size < 1e-36 {
                            break;
                        }
                    }
                    self.amps = acc;
                }
            }
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// (m, probability) for each J_z eigenvalue.
    pub fn jz_distribution(&self) -> Vec<(f64, f64)> {
        self.amps.iter().enumerate().map(|(k, a)| (self.m(k), a.norm_sqr())).collect()
    }

    fn expect(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        // Re⟨(a·J)(b·J)⟩ = ⟨{a·J, b·J}⟩/2 for real axes
        let bj = self.apply_axis(b, &self.amps);
        let aj = self.apply_axis(a, &self.amps);
        aj.iter().zip(&bj).map(|(x, y)| (x.conj() * y).re).sum()
    }

    fn mean(&self, a: [f64; 3]) -> f64 {
        let aj = self.apply_axis(a, &self.amps);
        self.amps.iter().zip(&aj).map(|(x, y)| (x.conj() * y).re).sum()
    }

    /// Moments in the same layout as [`oat_moments`]; `mu` is left at zero.
    pub fn moments(&self) -> OatMoments {
        const X: [f64; 3] = [1.0, 0.0, 0.0];
        const Y: [f64; 3] = [0.0, 1.0, 0.0];
        const Z: [f64; 3] = [0.0, 0.0, 1.0];
        let (mx, my, mz) = (self.mean(X), self.mean(Y), self.mean(Z));
        OatMoments {
            n: self.n as f64,
            mu: 0.0,
            mean_x: mx,
            var_x: self.expect(X, X) - mx * mx,
            var_y: self.expect(Y, Y) - my * my,
            var_z: self.expect(Z, Z) - mz * mz,
            cov_yz: self.expect(Y, Z) - my * mz,
        }
    }

    /// Δφ√N after an explicit rotation by φ about x, from the rotated state.
    pub fn normalized_sensitivity(&self, phi: f64) -> Result<f64> {
        let mut s = self.clone();
        s.apply(&DickeOp::Rotate { axis: [1.0, 0.0, 0.0], angle: phi })?;
        let d = s.jz_distribution();
        let mean: f64 = d.iter().map(|(m, p)| m * p).sum();
        let var: f64 = d.iter().map(|(m, p)| (m - mean) * (m - mean) * p).sum();
        Ok(normalized(var, s.mean([1.0, 0.0, 0.0]), self.n as f64))
    }
}

//! Fringe, decay and drift-envelope fitting with linearised uncertainties.

pub mod linear;
pub mod lm;
pub mod stats;

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use rand::Rng;

use crate::constants::{PI, TAU};
use crate::error::{Error, Result};
use linear::{linear_least_squares, SymMatrix};
use lm::{levenberg_marquardt, LmOptions};

/// Sampled transition probability against a scanned abscissa.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FringeDataset {
    /// Phase (rad), detuning (rad/s) or interrogation time (s).
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Optional one-sigma uncertainty per point.
    pub sigma: Option<Vec<f64>>,
}

impl FringeDataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let d = Self { x, y, sigma: None };
        d.validate()?;
        Ok(d)
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Result<Self> {
        self.sigma = Some(sigma);
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::DimensionMismatch { what: "x and y lengths differ" });
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.x.len() {
                return Err(Error::DimensionMismatch { what: "sigma length differs from data" });
            }
            if let Some(&bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidParameter { name: "sigma", value: bad, reason: "must be > 0" });
            }
        }
        if let Some(&bad) = self.x.iter().chain(&self.y).find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter { name: "data", value: bad, reason: "must be finite" });
        }
        Ok(())
    }

    fn weights(&self) -> Option<Vec<f64>> {
        self.sigma.as_ref().map(|s| s.iter().map(|v| 1.0 / (v * v)).collect())
    }
}

/// Named parameters with linearised one-sigma errors.
///
/// `covariance` is over the first `covariance.n` entries of `names`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub covariance: SymMatrix,
    /// √(Σ w r²)
    pub residual_norm: f64,
    /// Degrees of freedom, m − fitted parameters.
    pub dof: usize,
    pub iterations: usize,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.values[i])
    }

    pub fn error(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.errors[i])
    }
}

/// Covariance scale: 1 when per-point sigmas were supplied, else the reduced χ².
fn covariance_scale(weighted: bool, rss: f64, dof: usize) -> f64 {
    if weighted {
        1.0
    } else if dof > 0 {
        rss / dof as f64
    } else {
        f64::NAN
    }
}

/// Fit p(φ) = c₀ + A cos(φ − φ₀) on a 2π-periodic abscissa by linear least
/// squares on {1, cos φ, sin φ}. Visibility V = 2A.
pub fn fit_sinusoid_fixed_freq(data: &FringeDataset) -> Result<FitResult> {
    data.validate()?;
    if data.len() < 4 {
        return Err(Error::NotEnoughData { needed: 4, got: data.len() });
    }
    let rows: Vec<Vec<f64>> = data.x.iter().map(|&x| vec![1.0, x.cos(), x.sin()]).collect();
    let w = data.weights();
    let (c, cov, rss) = linear_least_squares(&rows, &data.y, w.as_deref())?;
    let dof = data.len() - 3;
    let s2 = covariance_scale(w.is_some(), rss, dof);
    let (a, b) = (c[1], c[2]);
    let amp = a.hypot(b);
    let phase = if amp > 0.0 { b.atan2(a) } else { 0.0 };
    // (offset, a, b) -> (offset, A, φ₀)
    let mut jac = [[0.0; 3]; 3];
    jac[0][0] = 1.0;
    if amp > 0.0 {
        jac[1][1] = a / amp;
        jac[1][2] = b / amp;
        jac[2][1] = -b / (amp * amp);
        jac[2][2] = a / (amp * amp);
    }
    let mut out = SymMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            let mut v = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    v += jac[i][k] * cov.get(k, l) * jac[j][l];
                }
            }
            out.set(i, j, v * s2);
        }
    }
    let amp_err = if amp > 0.0 {
        out.get(1, 1).max(0.0).sqrt()
    } else {
        // Degenerate direction; report the radial spread of (a, b).
        (0.5 * (cov.get(1, 1) + cov.get(2, 2)) * s2).max(0.0).sqrt()
    };
    let errors = vec![
        out.get(0, 0).max(0.0).sqrt(),
        amp_err,
        out.get(2, 2).max(0.0).sqrt(),
        2.0 * amp_err,
    ];
    Ok(FitResult {
        names: vec!["offset", "amplitude", "phase", "visibility"],
        values: vec![c[0], amp, phase, 2.0 * amp],
        errors,
        covariance: out,
        residual_norm: rss.sqrt(),
        dof,
        iterations: 0,
    })
}

/// Evaluate the fitted sinusoid.
pub fn sinusoid_model(fit: &FitResult, phi: f64) -> f64 {
    let c0 = fit.values[0];
    let a = fit.values[1];
    let p0 = fit.values[2];
    c0 + a * (phi - p0).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpModel {
    /// V = e^{−T/τ}
    #[default]
    Unit,
    /// V = A e^{−T/τ}
    FreeAmplitude,
}

/// Weighted log-linear fit of V(T) = [A] e^{−T/τ}. `data.x` is T, `data.y` is V.
pub fn fit_exponential_decay(data: &FringeDataset, model: ExpModel) -> Result<FitResult> {
    data.validate()?;
    if data.len() < 3 {
        return Err(Error::NotEnoughData { needed: 3, got: data.len() });
    }
    if let Some(&bad) = data.y.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParameter { name: "visibility", value: bad, reason: "must be > 0 for a log fit" });
    }
    let ly: Vec<f64> = data.y.iter().map(|v| v.ln()).collect();
    // σ_lnV = σ_V / V
    let w: Option<Vec<f64>> = data
        .sigma
        .as_ref()
        .map(|s| s.iter().zip(&data.y).map(|(s, v)| (v / s) * (v / s)).collect());
    let rows: Vec<Vec<f64>> = match model {
        ExpModel::Unit => data.x.iter().map(|&t| vec![t]).collect(),
        ExpModel::FreeAmplitude => data.x.iter().map(|&t| vec![1.0, t]).collect(),
    };
    let (c, cov, rss) = linear_least_squares(&rows, &ly, w.as_deref())?;
    let k = rows[0].len();
    let dof = data.len() - k;
    let s2 = covariance_scale(w.is_some(), rss, dof);
    let slope = c[k - 1];
    let slope_var = cov.get(k - 1, k - 1) * s2;
    if !(slope < 0.0) {
        return Err(Error::InvalidParameter {
            name: "decay slope",
            value: slope,
            reason: "data do not decay",
        });
    }
    let tau = -1.0 / slope;
    let tau_err = slope_var.max(0.0).sqrt() / (slope * slope);
    let (names, values, errors, covariance) = match model {
        ExpModel::Unit => {
            let mut m = SymMatrix::zeros(1);
            m.set(0, 0, tau_err * tau_err);
            (vec!["tau"], vec![tau], vec![tau_err], m)
        }
        ExpModel::FreeAmplitude => {
            let a = c[0].exp();
            // (ln A, slope) -> (τ, A)
            let ja = [0.0, 1.0 / (slope * slope)];
            let jb = [a, 0.0];
            let mut m = SymMatrix::zeros(2);
            let rows = [ja, jb];
            for i in 0..2 {
                for j in 0..2 {
                    let mut v = 0.0;
                    for p in 0..2 {
                        for q in 0..2 {
                            v += rows[i][p] * cov.get(p, q) * rows[j][q];
                        }
                    }
                    m.set(i, j, v * s2);
                }
            }
            let ae = m.get(1, 1).max(0.0).sqrt();
            (vec!["tau", "amplitude"], vec![tau, a], vec![tau_err, ae], m)
        }
    };
    Ok(FitResult {
        names,
        values,
        errors,
        covariance,
        residual_norm: rss.sqrt(),
        dof,
        iterations: 0,
    })
}

/// p(T) = ½[1 + V₀ e^{−T/τ} cos(νT²/4)]; same form as
/// [`crate::twomode::drift_fringe_model`].
#[inline]
pub fn drift_model(nu: f64, tau: f64, v0: f64, t: f64) -> f64 {
    0.5 * (1.0 + v0 * (-t / tau).exp() * (nu * t * t / 4.0).cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftFitOptions {
    /// Number of ν values in the initial grid search.
    pub nu_grid: usize,
    /// Number of τ values (log-spaced) in the initial grid search.
    pub tau_grid: usize,
    pub lm: LmOptions,
}

impl Default for DriftFitOptions {
    fn default() -> Self {
        Self { nu_grid: 400, tau_grid: 40, lm: LmOptions::default() }
    }
}

/// Fit (ν, τ, V₀) of the drift-envelope model. `data.x` is T (s) and
/// `data.y` is the measured population.
///
/// ν is reported as |ν| since the model is even in ν. When the best
/// grid point has ν = 0 the fit is done with ν fixed at zero and its error
/// is reported as NaN (the Gauss-Newton curvature vanishes there).
pub fn fit_drift_envelope(data: &FringeDataset, opts: &DriftFitOptions) -> Result<FitResult> {
    data.validate()?;
    let m = data.len();
    if m < 6 {
        return Err(Error::NotEnoughData { needed: 6, got: m });
    }
    let w = data.weights();
    let sw: Vec<f64> = match &w {
        Some(w) => w.iter().map(|v| v.sqrt()).collect(),
        None => vec![1.0; m],
    };
    let t_max = data.x.iter().cloned().fold(0.0, f64::max);
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter { name: "T", value: t_max, reason: "need positive times" });
    }
    let mut ts = data.x.clone();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut gaps: Vec<f64> = ts.windows(2).map(|p| p[1] - p[0]).filter(|g| *g > 0.0).collect();
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let dt = if gaps.is_empty() { t_max } else { gaps[gaps.len() / 2] };
    // Largest ν whose phase νT²/4 advances by at most π between neighbouring samples.
    let nu_max = TAU / (t_max * dt);

    let ys: Vec<f64> = data.y.iter().map(|p| 2.0 * p - 1.0).collect();
    let mut best = (f64::INFINITY, 0.0, t_max, 1.0);
    let mut basis = vec![0.0; m];
    for inu in 0..opts.nu_grid.max(1) {
        let nu = nu_max * inu as f64 / opts.nu_grid.max(1) as f64;
        for itau in 0..opts.tau_grid.max(1) {
            let f = itau as f64 / (opts.tau_grid.max(2) - 1) as f64;
            let tau = t_max * 10f64.powf(-1.0 + 3.0 * f);
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..m {
                let t = data.x[i];
                basis[i] = (-t / tau).exp() * (nu * t * t / 4.0).cos();
                let wi = sw[i] * sw[i];
                num += wi * basis[i] * ys[i];
                den += wi * basis[i] * basis[i];
            }
            if den <= 0.0 {
                continue;
            }
            let v0 = num / den;
            let mut sse = 0.0;
            for i in 0..m {
                let r = 0.5 * (v0 * basis[i] - ys[i]) * sw[i];
                sse += r * r;
            }
            if sse < best.0 {
                best = (sse, nu, tau, v0);
            }
        }
    }
    let (_, nu0, tau0, v00) = best;

    let x = &data.x;
    let y = &data.y;
    let fixed_nu = nu0 == 0.0;
    let result = if fixed_nu {
        levenberg_marquardt(
            |p, r, j| {
                let (tau, v0) = (p[0], p[1]);
                for i in 0..m {
                    let t = x[i];
                    let e = (-t / tau).exp();
                    r[i] = (0.5 * (1.0 + v0 * e) - y[i]) * sw[i];
                    j[2 * i] = 0.5 * v0 * e * t / (tau * tau) * sw[i];
                    j[2 * i + 1] = 0.5 * e * sw[i];
                }
            },
            &[tau0, v00],
            m,
            &opts.lm,
        )?
    } else {
        levenberg_marquardt(
            |p, r, j| {
                let (nu, tau, v0) = (p[0], p[1], p[2]);
                for i in 0..m {
                    let t = x[i];
                    let e = (-t / tau).exp();
                    let (s, c) = (nu * t * t / 4.0).sin_cos();
                    r[i] = (0.5 * (1.0 + v0 * e * c) - y[i]) * sw[i];
                    j[3 * i] = -0.5 * v0 * e * s * t * t / 4.0 * sw[i];
                    j[3 * i + 1] = 0.5 * v0 * e * c * t / (tau * tau) * sw[i];
                    j[3 * i + 2] = 0.5 * e * c * sw[i];
                }
            },
            &[nu0, tau0, v00],
            m,
            &opts.lm,
        )?
    };
    let k = result.params.len();
    let dof = m - k;
    let s2 = covariance_scale(w.is_some(), result.cost, dof);
    let mut cov = result.jtj_inverse.clone();
    cov.data.iter_mut().for_each(|v| *v *= s2);
    let err = |i: usize| cov.get(i, i).max(0.0).sqrt();
    let (values, errors, covariance) = if fixed_nu {
        let mut c3 = SymMatrix::zeros(3);
        for i in 0..2 {
            for j in 0..2 {
                c3.set(i + 1, j + 1, cov.get(i, j));
            }
        }
        c3.set(0, 0, f64::NAN);
        (
            vec![0.0, result.params[0], result.params[1]],
            vec![f64::NAN, err(0), err(1)],
            c3,
        )
    } else {
        (
            vec![result.params[0].abs(), result.params[1], result.params[2]],
            vec![err(0), err(1), err(2)],
            cov,
        )
    };
    if !(values[1] > 0.0) {
        return Err(Error::NotConverged {
            what: "drift envelope fit (tau <= 0)",
            iterations: result.iterations,
            residual: result.cost,
        });
    }
    Ok(FitResult {
        names: vec!["nu", "tau", "v0"],
        values,
        errors,
        covariance,
        residual_norm: result.cost.sqrt(),
        dof,
        iterations: result.iterations,
    })
}

/// Residual-resampling bootstrap. `refit` maps a resampled ordinate vector to
/// parameter values (or `None` if that replicate failed). Returns the 15.87th
/// and 84.13th percentile of each parameter over the successful replicates.
pub fn residual_bootstrap<R, F>(
    fitted: &[f64],
    observed: &[f64],
    resamples: usize,
    rng: &mut R,
    mut refit: F,
) -> Result<Vec<(f64, f64)>>
where
    R: Rng + ?Sized,
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    if fitted.len() != observed.len() {
        return Err(Error::DimensionMismatch { what: "fitted vs observed" });
    }
    let m = fitted.len();
    let resid: Vec<f64> = observed.iter().zip(fitted).map(|(o, f)| o - f).collect();
    let mut draws: Vec<Vec<f64>> = Vec::new();
    let mut y = vec![0.0; m];
    for _ in 0..resamples {
        for i in 0..m {
            y[i] = fitted[i] + resid[rng.random_range(0..m)];
        }
        if let Some(p) = refit(&y) {
            if draws.is_empty() {
                draws.resize(p.len(), Vec::new());
            }
            for (d, v) in draws.iter_mut().zip(p) {
                d.push(v);
            }
        }
    }
    if draws.is_empty() || draws[0].len() < 2 {
        return Err(Error::NotEnoughData { needed: 2, got: draws.first().map_or(0, |d| d.len()) });
    }
    Ok(draws
        .into_iter()
        .map(|mut d| {
            d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
            (stats::quantile_sorted(&d, 0.158_655), stats::quantile_sorted(&d, 0.841_345))
        })
        .collect())
}

/// Visibility taken as the range max(p) − min(p) of phase-scrambled data.
pub fn range_visibility(p: &[f64]) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::NotEnoughData { needed: 2, got: p.len() });
    }
    let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(hi - lo)
}

/// Sample scatter of mid-fringe populations in units of the projection
/// noise √(p̄(1 − p̄)/N).
pub fn allan_style_scatter(p: &[f64], n: f64) -> Result<f64> {
    if p.len() < 10 {
        return Err(Error::NotEnoughData { needed: 10, got: p.len() });
    }
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter { name: "atom_number", value: n, reason: "must be >= 1" });
    }
    let sd = stats::sample_std(p);
    if sd == 0.0 {
        return Ok(0.0);
    }
    let pm = stats::mean(p);
    let proj = (pm * (1.0 - pm) / n).sqrt();
    Ok(sd / proj)
}

/// Uniform phase grid over [0, 2π).
pub fn phase_grid(samples: usize) -> Vec<f64> {
    (0..samples).map(|k| 2.0 * PI * k as f64 / samples as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoid_exact() {
        let x = phase_grid(16);
        let y: Vec<f64> = x.iter().map(|p| 0.5 * (1.0 + 0.75 * (p - 0.4).cos())).collect();
        let f = fit_sinusoid_fixed_freq(&FringeDataset::new(x, y).unwrap()).unwrap();
        assert!((f.value("visibility").unwrap() - 0.75).abs() < 1e-12);
        assert!((f.value("phase").unwrap() - 0.4).abs() < 1e-12);
        assert!((f.value("offset").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sinusoid_constant_and_degenerate() {
        let x = phase_grid(8);
        let f = fit_sinusoid_fixed_freq(&FringeDataset::new(x, vec![0.3; 8]).unwrap()).unwrap();
        assert!(f.value("visibility").unwrap() < 1e-14);
        let same = FringeDataset::new(vec![1.0; 6], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(fit_sinusoid_fixed_freq(&same), Err(Error::RankDeficient));
    }

    #[test]
    fn exponential_exact() {
        let t: Vec<f64> = [0.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0].iter().map(|v| v * 1e-3).collect();
        let v: Vec<f64> = t.iter().map(|t| (-t / 14e-3).exp()).collect();
        let f = fit_exponential_decay(&FringeDataset::new(t.clone(), v).unwrap(), ExpModel::Unit).unwrap();
        assert!((f.value("tau").unwrap() / 14e-3 - 1.0).abs() < 1e-6);
        let v: Vec<f64> = t.iter().map(|t| 0.9 * (-t / 14e-3).exp()).collect();
        let f = fit_exponential_decay(&FringeDataset::new(t, v).unwrap(), ExpModel::FreeAmplitude).unwrap();
        assert!((f.value("amplitude").unwrap() - 0.9).abs() < 1e-10);
    }

    #[test]
    fn exponential_rejects_nonpositive() {
        let d = FringeDataset::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 0.5]).unwrap();
        assert!(fit_exponential_decay(&d, ExpModel::Unit).is_err());
    }

    #[test]
    fn drift_self_inversion() {
        let nu = TAU * 50.0;
        let t: Vec<f64> = (0..40).map(|i| 0.005 * i as f64).collect();
        let p: Vec<f64> = t.iter().map(|&t| drift_model(nu, 1.0, 0.9, t)).collect();
        let f = fit_drift_envelope(&FringeDataset::new(t, p).unwrap(), &DriftFitOptions::default()).unwrap();
        assert!((f.value("nu").unwrap() / nu - 1.0).abs() < 1e-4);
        assert!((f.value("tau").unwrap() - 1.0).abs() < 1e-4);
        assert!((f.value("v0").unwrap() - 0.9).abs() < 1e-4);
    }

    #[test]
    fn scatter_and_range() {
        assert_eq!(allan_style_scatter(&[0.5; 12], 1e4).unwrap(), 0.0);
        assert!(allan_style_scatter(&[0.5; 5], 1e4).is_err());
        assert_eq!(range_visibility(&[0.2, 0.9, 0.4]).unwrap(), 0.9 - 0.2);
    }
}

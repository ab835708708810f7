//! Absorption imaging: atom counting from image pairs, detection-noise
//! budgets, photon shot-noise Monte Carlo and imaging-parameter search.
//!
//! Naming: `bright` is the incident (no atoms) frame and `shadow` the frame
//! with the cloud, so that per pixel
//! `N_px = c₀ (L ln(bright/shadow) + (bright − shadow)/e_sat)`.

mod cloud;
mod optimize;
mod sim;

pub use cloud::{expansion_factors, CloudModel, ImagingAxis};
pub use optimize::{evaluate, optimize_parameters, OptimizationResult, SearchPoint, SearchSpace};
pub use sim::{
    monte_carlo, simulate_image_pair, ImagePair, ImagingSetup, Roi, RunOptions,
};

pub use crate::analysis::stats::cumulative_std;

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::atomphys::AtomSpecies;
use crate::constants::{HBAR, PI, SPEED_OF_LIGHT, TAU};
use crate::error::{positive, unit_interval, Error, Result};

/// Camera sensor and exposure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraConfig {
    /// η
    pub quantum_efficiency: f64,
    /// Physical pixel area on the sensor, m².
    pub pixel_area: f64,
    /// s
    pub exposure_time: f64,
    /// Electrons a pixel well can hold.
    pub full_well: f64,
}

impl CameraConfig {
    /// η = 0.17, 6.45 µm pixels, 18 000 e⁻ wells, 100 µs exposure.
    pub fn low_qe_ccd() -> Self {
        Self {
            quantum_efficiency: 0.17,
            pixel_area: 6.45e-6 * 6.45e-6,
            exposure_time: 100e-6,
            full_well: 18_000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        unit_interval("quantum_efficiency", self.quantum_efficiency)?;
        positive("quantum_efficiency", self.quantum_efficiency)?;
        positive("pixel_area", self.pixel_area)?;
        positive("exposure_time", self.exposure_time)?;
        positive("full_well", self.full_well)?;
        Ok(())
    }

    pub fn pixel_pitch(&self) -> f64 {
        self.pixel_area.sqrt()
    }
}

/// Optical settings of one absorption image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingConfig {
    /// M
    pub magnification: f64,
    /// I/I_sat at the atoms.
    pub intensity_ratio: f64,
    /// Detuning of the probe from the cycling transition, rad/s.
    pub detuning: f64,
}

impl ImagingConfig {
    pub fn validate(&self) -> Result<()> {
        positive("magnification", self.magnification)?;
        positive("intensity_ratio", self.intensity_ratio)?;
        if !self.detuning.is_finite() {
            return Err(Error::InvalidParameter {
                name: "imaging detuning",
                value: self.detuning,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// L = (4Δ² + Γ²)/Γ²
    pub fn detuning_factor(&self, species: &AtomSpecies) -> f64 {
        let g = species.linewidth;
        (4.0 * self.detuning * self.detuning + g * g) / (g * g)
    }

    /// Pixel area referred to the object plane, P_px/M².
    pub fn object_pixel_area(&self, camera: &CameraConfig) -> f64 {
        camera.pixel_area / (self.magnification * self.magnification)
    }

    /// c₀ = (pixel area in the object plane)/σ₀ with σ₀ = 3λ²/(2π).
    pub fn c0(&self, species: &AtomSpecies, camera: &CameraConfig) -> f64 {
        self.object_pixel_area(camera) / resonant_cross_section(species)
    }

    /// Electrons per pixel produced by an intensity `ratio`·I_sat at the atoms.
    pub fn counts_at(&self, ratio: f64, species: &AtomSpecies, camera: &CameraConfig) -> f64 {
        let photon = TAU * HBAR * SPEED_OF_LIGHT / species.wavelength;
        camera.quantum_efficiency
            * camera.exposure_time
            * ratio
            * species.saturation_intensity
            * self.object_pixel_area(camera)
            / photon
    }

    /// e_sat
    pub fn saturation_counts(&self, species: &AtomSpecies, camera: &CameraConfig) -> f64 {
        self.counts_at(1.0, species, camera)
    }

    /// Mean bright-field electrons per pixel.
    pub fn bright_counts(&self, species: &AtomSpecies, camera: &CameraConfig) -> f64 {
        self.counts_at(self.intensity_ratio, species, camera)
    }
}

/// σ₀ = 3λ²/(2π)
pub fn resonant_cross_section(species: &AtomSpecies) -> f64 {
    3.0 * species.wavelength * species.wavelength / (2.0 * PI)
}

/// Per-pixel conversion constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCalibration {
    pub c0: f64,
    pub e_sat: f64,
    /// L
    pub detuning_factor: f64,
}

impl PixelCalibration {
    pub fn new(species: &AtomSpecies, cfg: &ImagingConfig, camera: &CameraConfig) -> Self {
        Self {
            c0: cfg.c0(species, camera),
            e_sat: cfg.saturation_counts(species, camera),
            detuning_factor: cfg.detuning_factor(species),
        }
    }

    /// N_px for one pixel; `None` when either count is not positive.
    #[inline]
    pub fn atoms(&self, bright: f64, shadow: f64) -> Option<f64> {
        if bright > 0.0 && shadow > 0.0 {
            Some(
                self.c0
                    * (self.detuning_factor * (bright / shadow).ln()
                        + (bright - shadow) / self.e_sat),
            )
        } else {
            None
        }
    }

    /// Solve N_px = c₀(L ln(e_b/e_s) + (e_b − e_s)/e_sat) for the shadow
    /// count. Newton in y = ln(e_b/e_s) from y = 0; the residual is concave
    /// and increasing in y so the iterates approach the root from below.
    pub fn invert(&self, bright: f64, atoms: f64) -> Option<f64> {
        let target = atoms / self.c0;
        if target == 0.0 {
            return Some(bright);
        }
        if !(target > 0.0 && bright > 0.0) {
            return None;
        }
        let l = self.detuning_factor;
        let r = bright / self.e_sat;
        let resid = |y: f64| l * y - r * (-y).exp_m1() - target;
        let mut y = 0.0;
        for _ in 0..200 {
            let step = resid(y) / (l + r * (-y).exp());
            y -= step;
            if step.abs() <= 1e-14 * y.abs() {
                if resid(y).abs() <= 1e-10 * target {
                    return Some(bright * (-y).exp());
                }
                break;
            }
        }
        None
    }
}

/// Extracted atom numbers from one image pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomCount {
    /// N_px per pixel, zero where the pixel was invalid.
    pub per_pixel: Vec<f64>,
    /// Indices of pixels with non-positive counts, excluded from `total`.
    pub invalid: Vec<usize>,
    pub total: f64,
}

/// Pixel-wise atom numbers from bright and shadow electron counts.
pub fn atoms_per_pixel(bright: &[f64], shadow: &[f64], cal: &PixelCalibration) -> Result<AtomCount> {
    if bright.len() != shadow.len() {
        return Err(Error::DimensionMismatch { what: "bright and shadow frames differ in size" });
    }
    let mut per_pixel = Vec::with_capacity(bright.len());
    let mut invalid = Vec::new();
    let mut total = 0.0;
    for (k, (&b, &s)) in bright.iter().zip(shadow).enumerate() {
        match cal.atoms(b, s) {
            Some(n) => {
                per_pixel.push(n);
                total += n;
            }
            None => {
                per_pixel.push(0.0);
                invalid.push(k);
            }
        }
    }
    Ok(AtomCount { per_pixel, invalid, total })
}

/// σ_det in the two pairings of the propagation sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionNoise {
    /// Σ e_b(1/e_sat + L/e_s)² + e_s(1/e_sat + L/e_b)², the printed form.
    pub printed: f64,
    /// Σ e_b(1/e_sat + L/e_b)² + e_s(1/e_sat + L/e_s)², first-order propagation.
    pub standard: f64,
}

/// Closed-form detection noise (atoms) for mean frames over a region.
pub fn detection_noise_closed_form(
    bright: &[f64],
    shadow: &[f64],
    cal: &PixelCalibration,
) -> Result<DetectionNoise> {
    if bright.len() != shadow.len() {
        return Err(Error::DimensionMismatch { what: "bright and shadow frames differ in size" });
    }
    let is = 1.0 / cal.e_sat;
    let l = cal.detuning_factor;
    let (mut p, mut s) = (0.0, 0.0);
    for (&b, &f) in bright.iter().zip(shadow) {
        positive("mean bright count", b)?;
        positive("mean shadow count", f)?;
        let (ab, af) = (is + l / b, is + l / f);
        p += b * af * af + f * ab * ab;
        s += b * ab * ab + f * af * af;
    }
    Ok(DetectionNoise { printed: cal.c0 * p.sqrt(), standard: cal.c0 * s.sqrt() })
}

/// σ_a = √(N p (1 − p))
pub fn projection_noise_atoms(n: f64, p: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter { name: "atom_number", value: n, reason: "must be >= 1" });
    }
    unit_interval("p", p)?;
    Ok((n * p * (1.0 - p)).sqrt())
}

/// Total image noise √(σ_a² + σ_det²).
pub fn total_image_noise(sigma_a: f64, sigma_det: f64) -> f64 {
    sigma_a.hypot(sigma_det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cal() -> PixelCalibration {
        PixelCalibration { c0: 0.3, e_sat: 700.0, detuning_factor: 1.0 }
    }

    #[test]
    fn no_absorption_no_atoms() {
        let c = atoms_per_pixel(&[100.0, 200.0], &[100.0, 200.0], &cal()).unwrap();
        assert_eq!(c.total, 0.0);
        assert!(c.invalid.is_empty());
    }

    #[test]
    fn beer_law_limit() {
        let c = PixelCalibration { e_sat: f64::INFINITY, ..cal() };
        let n = c.atoms(400.0, 100.0).unwrap();
        assert!((n - 0.3 * 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn invalid_pixels_are_masked() {
        let c = atoms_per_pixel(&[100.0, 100.0, 0.0], &[50.0, 0.0, 10.0], &cal()).unwrap();
        assert_eq!(c.invalid, [1, 2]);
        assert!((c.total - cal().atoms(100.0, 50.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn inversion_roundtrip() {
        for &(b, n) in &[(1e4, 0.0), (1e4, 3.0), (500.0, 0.01), (2e4, 10.0)] {
            let s = cal().invert(b, n).unwrap();
            let back = cal().atoms(b, s).unwrap();
            assert!((back - n).abs() <= 1e-10 * n.max(1e-12), "{b} {n} {back}");
        }
    }

    #[test]
    fn pairings_agree_on_flat_field() {
        let e = [1000.0; 9];
        let d = detection_noise_closed_form(&e, &e, &cal()).unwrap();
        assert!((d.printed - d.standard).abs() < 1e-12);
        let want = 0.3 * (9.0 * 2.0 * 1000.0 * (1.0 / 700.0 + 1.0 / 1000.0f64).powi(2)).sqrt();
        assert!((d.standard - want).abs() < 1e-12);
    }

    #[test]
    fn projection_noise() {
        assert_eq!(projection_noise_atoms(1e6, 0.5).unwrap(), 500.0);
        assert!(projection_noise_atoms(0.0, 0.5).is_err());
    }

    #[test]
    fn counts_scale_with_exposure_and_magnification() {
        let sp = AtomSpecies::rb87();
        let cam = CameraConfig::low_qe_ccd();
        let cfg = ImagingConfig { magnification: 8.0, intensity_ratio: 15.0, detuning: 0.0 };
        let e = cfg.bright_counts(&sp, &cam);
        assert!(e > 1.0e4 && e < 1.2e4, "{e}");
        let cfg2 = ImagingConfig { magnification: 4.0, ..cfg };
        assert!((cfg2.bright_counts(&sp, &cam) / e - 4.0).abs() < 1e-12);
        assert_eq!(cfg.detuning_factor(&sp), 1.0);
        let cfg3 = ImagingConfig { detuning: sp.linewidth / 2.0, ..cfg };
        assert!((cfg3.detuning_factor(&sp) - 2.0).abs() < 1e-12);
    }
}

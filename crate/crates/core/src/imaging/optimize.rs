//! Exhaustive grid search over imaging parameters.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use super::{CameraConfig, CloudModel, ImagingConfig, ImagingSetup};
use crate::atomphys::AtomSpecies;
use crate::error::{Error, Result};

/// Candidate values for each imaging parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub intensity_ratios: Vec<f64>,
    pub magnifications: Vec<f64>,
    /// s
    pub exposure_times: Vec<f64>,
    /// rad/s
    pub detunings: Vec<f64>,
    /// Configurations within this relative margin of the minimum are
    /// considered tied and resolved by preferring resonant light, then lower
    /// magnification, lower intensity and shorter exposure.
    pub tie_tolerance: f64,
}

impl SearchSpace {
    /// I/I_sat ∈ {1,2,5,10,15,20,30,50}, M ∈ {1,2,4,6,8,10,12},
    /// τ ∈ {25,50,100} µs, Δ ∈ {0, Γ/2, Γ}.
    pub fn standard(species: &AtomSpecies) -> Self {
        let g = species.linewidth;
        Self {
            intensity_ratios: alloc::vec![1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0],
            magnifications: alloc::vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            exposure_times: alloc::vec![25e-6, 50e-6, 100e-6],
            detunings: alloc::vec![0.0, 0.5 * g, g],
            tie_tolerance: 0.01,
        }
    }

    pub fn len(&self) -> usize {
        self.intensity_ratios.len() * self.magnifications.len() * self.exposure_times.len() * self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchPoint {
    pub imaging: ImagingConfig,
    pub exposure_time: f64,
    pub bright_counts: f64,
    /// σ_det (standard pairing); `None` if the bright frame exceeds the full well.
    pub sigma_det: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best: SearchPoint,
    pub sigma_det: f64,
    /// Every grid point in (intensity, magnification, exposure, detuning) order.
    pub surface: Vec<SearchPoint>,
}

/// Grid search for the imaging configuration minimising σ_det.
pub fn optimize_parameters(
    species: &AtomSpecies,
    cloud: &CloudModel,
    camera: &CameraConfig,
    space: &SearchSpace,
) -> Result<OptimizationResult> {
    let mut surface = Vec::with_capacity(space.len());
    for &ir in &space.intensity_ratios {
        for &m in &space.magnifications {
            for &tau in &space.exposure_times {
                for &d in &space.detunings {
                    surface.push(evaluate(species, cloud, camera, ir, m, tau, d)?);
                }
            }
        }
    }
    let min = surface
        .iter()
        .filter_map(|p| p.sigma_det)
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::EmptySearch);
    }
    let key = |p: &SearchPoint| {
        (
            p.imaging.detuning.abs(),
            p.imaging.magnification,
            p.imaging.intensity_ratio,
            p.exposure_time,
        )
    };
    let best = surface
        .iter()
        .filter(|p| p.sigma_det.is_some_and(|s| s <= min * (1.0 + space.tie_tolerance)))
        .min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(core::cmp::Ordering::Equal))
        .copied()
        .ok_or(Error::EmptySearch)?;
    Ok(OptimizationResult { sigma_det: best.sigma_det.unwrap_or(min), best, surface })
}

/// Evaluate σ_det for a single configuration.
pub fn evaluate(
    species: &AtomSpecies,
    cloud: &CloudModel,
    camera: &CameraConfig,
    intensity_ratio: f64,
    magnification: f64,
    exposure_time: f64,
    detuning: f64,
) -> Result<SearchPoint> {
    let imaging = ImagingConfig { magnification, intensity_ratio, detuning };
    let cam = CameraConfig { exposure_time, ..*camera };
    imaging.validate()?;
    cam.validate()?;
    let bright_counts = imaging.bright_counts(species, &cam);
    let sigma_det = if bright_counts > cam.full_well {
        None
    } else {
        Some(ImagingSetup::new(species, cloud, &imaging, &cam)?.detection_noise()?.standard)
    };
    Ok(SearchPoint { imaging, exposure_time, bright_counts, sigma_det })
}

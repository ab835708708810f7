//! Synthetic image pairs and photon shot-noise Monte Carlo.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{atoms_per_pixel, CameraConfig, CloudModel, DetectionNoise, ImagingConfig, PixelCalibration};
use crate::atomphys::AtomSpecies;
use crate::error::{Error, Result};

/// Pixel rectangle within a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roi {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Roi {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Two electron-count frames, row-major, `width` × `height`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePair {
    pub width: usize,
    pub height: usize,
    /// Incident light, no atoms.
    pub bright: Vec<f64>,
    /// Light transmitted through the cloud.
    pub shadow: Vec<f64>,
    pub roi: Roi,
    /// Atoms actually placed in the imaged state for this shot.
    pub true_number: f64,
}

impl ImagePair {
    fn roi_frames(&self) -> (Vec<f64>, Vec<f64>) {
        let r = self.roi;
        let mut b = Vec::with_capacity(r.len());
        let mut s = Vec::with_capacity(r.len());
        for y in r.y0..r.y0 + r.height {
            let row = y * self.width;
            b.extend_from_slice(&self.bright[row + r.x0..row + r.x0 + r.width]);
            s.extend_from_slice(&self.shadow[row + r.x0..row + r.x0 + r.width]);
        }
        (b, s)
    }

    /// Atom number summed over the ROI, and the count of masked pixels.
    pub fn measured_number(&self, cal: &PixelCalibration) -> Result<(f64, usize)> {
        let (b, s) = self.roi_frames();
        let c = atoms_per_pixel(&b, &s, cal)?;
        Ok((c.total, c.invalid.len()))
    }
}

/// Which noise sources a simulated shot includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub photon_noise: bool,
    /// Draw the imaged atom number from Binomial(N, p).
    pub atomic_noise: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { photon_noise: true, atomic_noise: false }
    }
}

/// Precomputed geometry and mean frames for one imaging configuration.
///
/// The frame is the bounding box of the cloud plus one pixel on each side,
/// with a pixel centred on the cloud centre.
#[derive(Debug, Clone)]
pub struct ImagingSetup {
    pub species: AtomSpecies,
    pub cloud: CloudModel,
    pub imaging: ImagingConfig,
    pub camera: CameraConfig,
    pub cal: PixelCalibration,
    pub width: usize,
    pub height: usize,
    /// Pixel pitch in the object plane, m.
    pub pitch: f64,
    /// Column-density shape per pixel, normalised to sum to one.
    pub weights: Vec<f64>,
    pub bright_mean: f64,
    /// Mean shadow frame for the mean imaged atom number.
    pub shadow_mean: Vec<f64>,
    shadow_poisson: Vec<Poisson<f64>>,
}

impl ImagingSetup {
    pub fn new(
        species: &AtomSpecies,
        cloud: &CloudModel,
        imaging: &ImagingConfig,
        camera: &CameraConfig,
    ) -> Result<Self> {
        cloud.validate()?;
        imaging.validate()?;
        camera.validate()?;
        let pitch = camera.pixel_pitch() / imaging.magnification;
        let nx = (cloud.radius_x / pitch).ceil() as usize + 1;
        let ny = (cloud.radius_y / pitch).ceil() as usize + 1;
        let (width, height) = (2 * nx + 1, 2 * ny + 1);
        let mut weights = Vec::with_capacity(width * height);
        for j in 0..height {
            let y = cloud.center.1 + (j as f64 - ny as f64) * pitch;
            for i in 0..width {
                let x = cloud.center.0 + (i as f64 - nx as f64) * pitch;
                weights.push(cloud.shape(x, y));
            }
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cloud radius",
                value: cloud.radius_x.min(cloud.radius_y),
                reason: "cloud smaller than one pixel",
            });
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        let cal = PixelCalibration::new(species, imaging, camera);
        let bright_mean = imaging.bright_counts(species, camera);
        let mut s = Self {
            species: *species,
            cloud: *cloud,
            imaging: *imaging,
            camera: *camera,
            cal,
            width,
            height,
            pitch,
            weights,
            bright_mean,
            shadow_mean: Vec::new(),
            shadow_poisson: Vec::new(),
        };
        s.shadow_mean = s.shadow_for(cloud.imaged_number())?;
        s.shadow_poisson = s.shadow_mean.iter().map(|&m| poisson(m)).collect::<Result<_>>()?;
        Ok(s)
    }

    pub fn roi(&self) -> Roi {
        Roi { x0: 0, y0: 0, width: self.width, height: self.height }
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Mean shadow frame for `n` atoms in the imaged state.
    pub fn shadow_for(&self, n: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.weights.len());
        for (k, &w) in self.weights.iter().enumerate() {
            let target = n * w;
            match self.cal.invert(self.bright_mean, target) {
                Some(s) => out.push(s),
                None => {
                    return Err(Error::InversionFailed {
                        row: k / self.width,
                        col: k % self.width,
                        residual: target,
                    })
                }
            }
        }
        Ok(out)
    }

    /// Closed-form σ_det over the ROI for the mean frames.
    pub fn detection_noise(&self) -> Result<DetectionNoise> {
        let bright = alloc::vec![self.bright_mean; self.pixel_count()];
        super::detection_noise_closed_form(&bright, &self.shadow_mean, &self.cal)
    }

    /// Smallest mean shadow count in the frame.
    pub fn min_shadow(&self) -> f64 {
        self.shadow_mean.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Simulate shot `k` with seed `base_seed ^ k`.
    pub fn simulate(&self, base_seed: u64, k: u64, opts: RunOptions) -> Result<ImagePair> {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ k);
        let mean_n = self.cloud.imaged_number();
        let (n, custom) = if opts.atomic_noise {
            let total = self.cloud.n.round() as u64;
            let b = Binomial::new(total, self.cloud.state_fraction).map_err(|_| Error::InvalidParameter {
                name: "state_fraction",
                value: self.cloud.state_fraction,
                reason: "invalid binomial parameters",
            })?;
            let n = b.sample(&mut rng) as f64;
            (n, Some(self.shadow_for(n)?))
        } else {
            (mean_n, None)
        };
        let shadow_means = custom.as_deref().unwrap_or(&self.shadow_mean);
        let npx = self.pixel_count();
        let (bright, shadow) = if opts.photon_noise {
            let pb = poisson(self.bright_mean)?;
            let bright: Vec<f64> = (0..npx).map(|_| pb.sample(&mut rng)).collect();
            let shadow: Vec<f64> = match &custom {
                None => self.shadow_poisson.iter().map(|p| p.sample(&mut rng)).collect(),
                Some(m) => {
                    let mut v = Vec::with_capacity(npx);
                    for &mu in m {
                        v.push(poisson(mu)?.sample(&mut rng));
                    }
                    v
                }
            };
            (bright, shadow)
        } else {
            (alloc::vec![self.bright_mean; npx], shadow_means.to_vec())
        };
        Ok(ImagePair {
            width: self.width,
            height: self.height,
            bright,
            shadow,
            roi: self.roi(),
            true_number: n,
        })
    }

    /// Simulate shot `k` and return the atom number extracted from it.
    pub fn measure(&self, base_seed: u64, k: u64, opts: RunOptions) -> Result<f64> {
        let pair = self.simulate(base_seed, k, opts)?;
        Ok(pair.measured_number(&self.cal)?.0)
    }
}

fn poisson(mean: f64) -> Result<Poisson<f64>> {
    Poisson::new(mean).map_err(|_| Error::InvalidParameter {
        name: "mean electron count",
        value: mean,
        reason: "invalid Poisson mean",
    })
}

/// One image pair of `cloud` with the given seed and noise switches.
pub fn simulate_image_pair(
    species: &AtomSpecies,
    cloud: &CloudModel,
    imaging: &ImagingConfig,
    camera: &CameraConfig,
    seed: u64,
    opts: RunOptions,
) -> Result<ImagePair> {
    ImagingSetup::new(species, cloud, imaging, camera)?.simulate(seed, 0, opts)
}

/// Extracted atom numbers for `runs` independent shots, in run order.
pub fn monte_carlo(setup: &ImagingSetup, runs: usize, base_seed: u64, opts: RunOptions) -> Result<Vec<f64>> {
    (0..runs as u64).map(|k| setup.measure(base_seed, k, opts)).collect()
}

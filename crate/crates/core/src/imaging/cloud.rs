//! Post-expansion Thomas-Fermi column-density model.

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::atomphys::{tf_radii, AtomSpecies, TrapConfig};
use crate::error::{non_negative, positive, unit_interval, Result};

/// Line of sight of the imaging beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImagingAxis {
    X,
    Y,
    /// Looks down z and sees the (x, y) plane.
    #[default]
    Z,
}

/// Integrated Thomas-Fermi column density
/// n(x, y) ∝ (1 − x²/R_x² − y²/R_y²)^{3/2} in the object plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudModel {
    /// Atoms in the cloud before state selection.
    pub n: f64,
    /// Fraction p of the atoms in the imaged state.
    pub state_fraction: f64,
    /// Radii in the image plane (object coordinates), m.
    pub radius_x: f64,
    pub radius_y: f64,
    /// Centre offset, m.
    pub center: (f64, f64),
}

impl CloudModel {
    pub fn new(n: f64, radius_x: f64, radius_y: f64) -> Result<Self> {
        let c = Self { n, state_fraction: 1.0, radius_x, radius_y, center: (0.0, 0.0) };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        positive("cloud atom number", self.n)?;
        unit_interval("state_fraction", self.state_fraction)?;
        positive("radius_x", self.radius_x)?;
        positive("radius_y", self.radius_y)?;
        Ok(())
    }

    /// Condensate released from `trap` and imaged after `expansion_time` along `axis`.
    pub fn ballistic(
        species: &AtomSpecies,
        trap: &TrapConfig,
        n: f64,
        expansion_time: f64,
        axis: ImagingAxis,
    ) -> Result<Self> {
        non_negative("expansion_time", expansion_time)?;
        let r0 = tf_radii(species, trap, n)?;
        let l = expansion_factors(trap, expansion_time);
        let r = [r0[0] * l[0], r0[1] * l[1], r0[2] * l[2]];
        let (rx, ry) = match axis {
            ImagingAxis::X => (r[1], r[2]),
            ImagingAxis::Y => (r[0], r[2]),
            ImagingAxis::Z => (r[0], r[1]),
        };
        Self::new(n, rx, ry)
    }

    /// Mean number of atoms in the imaged state.
    pub fn imaged_number(&self) -> f64 {
        self.n * self.state_fraction
    }

    /// Unnormalised column-density shape at (x, y).
    pub fn shape(&self, x: f64, y: f64) -> f64 {
        let dx = (x - self.center.0) / self.radius_x;
        let dy = (y - self.center.1) / self.radius_y;
        let u = 1.0 - dx * dx - dy * dy;
        if u > 0.0 {
            u * u.sqrt()
        } else {
            0.0
        }
    }
}

/// Castin-Dum scaling factors λ_i(t) for free expansion of a Thomas-Fermi
/// condensate: λ̈_i = ω_i²/(λ_i λ_x λ_y λ_z), λ_i(0) = 1, λ̇_i(0) = 0.
pub fn expansion_factors(trap: &TrapConfig, t: f64) -> [f64; 3] {
    let w2 = [
        trap.omega_x * trap.omega_x,
        trap.omega_y * trap.omega_y,
        trap.omega_z * trap.omega_z,
    ];
    if t <= 0.0 {
        return [1.0; 3];
    }
    let rhs = |s: &[f64; 6]| -> [f64; 6] {
        let p = s[0] * s[1] * s[2];
        [s[3], s[4], s[5], w2[0] / (s[0] * p), w2[1] / (s[1] * p), w2[2] / (s[2] * p)]
    };
    // A step of 1/(50 ω_max) keeps RK4 well inside its accuracy window.
    let steps = ((t * trap.max_frequency() * 50.0).ceil() as usize).max(100);
    let h = t / steps as f64;
    let mut s = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
    for _ in 0..steps {
        let k1 = rhs(&s);
        let k2 = rhs(&add(&s, &k1, h / 2.0));
        let k3 = rhs(&add(&s, &k2, h / 2.0));
        let k4 = rhs(&add(&s, &k3, h));
        for i in 0..6 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    [s[0], s[1], s[2]]
}

fn add(s: &[f64; 6], k: &[f64; 6], h: f64) -> [f64; 6] {
    let mut o = *s;
    for i in 0..6 {
        o[i] += h * k[i];
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TAU;

    #[test]
    fn isotropic_expansion_matches_closed_form() {
        // For an isotropic trap λ̈ = ω²/λ⁴; energy conservation gives
        // λ̇² = (2ω²/3)(1 − 1/λ³). Check that invariant at the end point.
        let trap = TrapConfig::cartesian(TAU * 40.0, TAU * 40.0, TAU * 40.0).unwrap();
        let t = 0.02;
        let l = expansion_factors(&trap, t)[0];
        let h = 1e-6;
        let v = (expansion_factors(&trap, t + h)[0] - expansion_factors(&trap, t - h)[0]) / (2.0 * h);
        let w = TAU * 40.0;
        let want = (2.0 * w * w / 3.0 * (1.0 - 1.0 / (l * l * l))).sqrt();
        assert!((v / want - 1.0).abs() < 1e-5, "{v} {want}");
    }

    #[test]
    fn crossed_dipole_cloud_radii() {
        let c = CloudModel::ballistic(
            &AtomSpecies::rb87(),
            &TrapConfig::crossed_dipole(),
            1e6,
            0.03,
            ImagingAxis::Z,
        )
        .unwrap();
        assert!((c.radius_x * 1e6 - 105.0).abs() < 3.0, "{}", c.radius_x);
        assert!((c.radius_y * 1e6 - 112.0).abs() < 3.0, "{}", c.radius_y);
    }
}

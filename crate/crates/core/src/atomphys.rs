//! Species constants, clock-transition field sensitivity and Thomas-Fermi
//! condensate properties.


#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;
use crate::constants::{ATOMIC_MASS_UNIT, BOHR_MAGNETON, BOHR_RADIUS, HBAR, PI, TAU};
use crate::error::{non_negative, positive, Error, Result};

/// Physical constants of an alkali clock transition.
///
/// Scattering lengths are stored in metres; use [`AtomSpecies::with_scattering_bohr`]
/// to set them in units of a₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpecies {
    /// kg
    pub mass: f64,
    /// Natural linewidth Γ of the imaging transition, rad/s.
    pub linewidth: f64,
    /// Imaging wavelength, m.
    pub wavelength: f64,
    /// W/m²
    pub saturation_intensity: f64,
    /// Ground-state hyperfine splitting f₀, Hz.
    pub hyperfine_splitting: f64,
    pub lande_gj: f64,
    pub lande_gi: f64,
    /// J/T
    pub bohr_magneton: f64,
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl AtomSpecies {
    /// ⁸⁷Rb in the |F=1, m_F=0⟩ / |F=2, m_F=0⟩ clock pair, imaged on the D2 line.
    pub fn rb87() -> Self {
        Self {
            mass: 86.909_180_527 * ATOMIC_MASS_UNIT,
            linewidth: TAU * 6.067e6,
            wavelength: 780.241e-9,
            saturation_intensity: 16.7,
            hyperfine_splitting: 6.834_682_610_904e9,
            lande_gj: 2.002_331_13,
            lande_gi: -0.000_995_141_4,
            bohr_magneton: BOHR_MAGNETON,
            a11: 100.9 * BOHR_RADIUS,
            a12: 98.9 * BOHR_RADIUS,
            a22: 94.9 * BOHR_RADIUS,
        }
    }

    pub fn with_scattering_bohr(mut self, a11: f64, a12: f64, a22: f64) -> Self {
        self.a11 = a11 * BOHR_RADIUS;
        self.a12 = a12 * BOHR_RADIUS;
        self.a22 = a22 * BOHR_RADIUS;
        self
    }

    /// Scattering lengths (a₁₁, a₁₂, a₂₂) in Bohr radii.
    pub fn scattering_bohr(&self) -> (f64, f64, f64) {
        (
            self.a11 / BOHR_RADIUS,
            self.a12 / BOHR_RADIUS,
            self.a22 / BOHR_RADIUS,
        )
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("linewidth", self.linewidth)?;
        positive("wavelength", self.wavelength)?;
        positive("saturation_intensity", self.saturation_intensity)?;
        positive("hyperfine_splitting", self.hyperfine_splitting)?;
        positive("bohr_magneton", self.bohr_magneton)?;
        if !(self.lande_gj.is_finite() && self.lande_gi.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lande_g",
                value: self.lande_gj,
                reason: "must be finite",
            });
        }
        non_negative("a11", self.a11)?;
        non_negative("a12", self.a12)?;
        non_negative("a22", self.a22)?;
        Ok(())
    }

    /// Breit-Rabi field scale x = μ_B|g_J − g_I|/(h f₀), in 1/T.
    pub fn breit_rabi_x(&self) -> f64 {
        self.bohr_magneton * (self.lande_gj - self.lande_gi).abs()
            / (TAU * HBAR * self.hyperfine_splitting)
    }

    /// Contact coupling U = 4πħ²a/m, J m³.
    pub fn contact_coupling(&self, a: f64) -> f64 {
        4.0 * PI * HBAR * HBAR * a / self.mass
    }
}

impl Default for AtomSpecies {
    fn default() -> Self {
        Self::rb87()
    }
}

/// Harmonic trap frequencies in rad/s. A cylindrical trap has ω_x = ω_y = ω_ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_z: f64,
}

impl TrapConfig {
    pub fn cartesian(omega_x: f64, omega_y: f64, omega_z: f64) -> Result<Self> {
        positive("omega_x", omega_x)?;
        positive("omega_y", omega_y)?;
        positive("omega_z", omega_z)?;
        Ok(Self { omega_x, omega_y, omega_z })
    }

    pub fn cylindrical(omega_rho: f64, omega_z: f64) -> Result<Self> {
        Self::cartesian(omega_rho, omega_rho, omega_z)
    }

    /// Crossed dipole trap of the interferometer experiment, 2π×(50, 57, 28) Hz.
    pub fn crossed_dipole() -> Self {
        Self { omega_x: TAU * 50.0, omega_y: TAU * 57.0, omega_z: TAU * 28.0 }
    }

    /// Cylindrical trap used for the mean-field simulations, ω_{z,ρ} = 2π×{30, 55} Hz.
    pub fn gpe_default() -> Self {
        Self { omega_x: TAU * 55.0, omega_y: TAU * 55.0, omega_z: TAU * 30.0 }
    }

    pub fn is_cylindrical(&self) -> bool {
        self.omega_x == self.omega_y
    }

    /// Geometric mean ω̄.
    pub fn mean_frequency(&self) -> f64 {
        (self.omega_x * self.omega_y * self.omega_z).cbrt()
    }

    pub fn max_frequency(&self) -> f64 {
        self.omega_x.max(self.omega_y).max(self.omega_z)
    }
}

/// Bias field and oscillator noise for the detuning budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldConfig {
    /// T
    pub bias_field: f64,
    /// T
    pub field_noise: f64,
    /// rad/s
    pub oscillator_frequency: f64,
    /// rad/s
    pub oscillator_noise: f64,
}

impl FieldConfig {
    pub fn validate(&self) -> Result<()> {
        non_negative("bias_field", self.bias_field)?;
        non_negative("field_noise", self.field_noise)?;
        non_negative("oscillator_frequency", self.oscillator_frequency)?;
        non_negative("oscillator_noise", self.oscillator_noise)?;
        Ok(())
    }

    /// Detuning fluctuation δΔ for this field environment.
    pub fn detuning_fluctuation(&self, species: &AtomSpecies) -> Result<f64> {
        self.validate()?;
        let kappa = resonance_sensitivity_kappa(species, self.bias_field)?;
        detuning_fluctuation(kappa, self.field_noise, self.oscillator_noise)
    }
}

/// Clock transition frequency in Hz at bias field `b` (tesla).
pub fn breit_rabi_frequency(species: &AtomSpecies, b: f64) -> Result<f64> {
    non_negative("bias_field", b)?;
    let bx = b * species.breit_rabi_x();
    Ok(species.hyperfine_splitting * (1.0 + bx * bx).sqrt())
}

/// Quadratic clock shift f − f₀ in Hz, evaluated without cancellation.
pub fn clock_shift(species: &AtomSpecies, b: f64) -> Result<f64> {
    non_negative("bias_field", b)?;
    let bx = b * species.breit_rabi_x();
    // √(1+u²) − 1 = u²/(√(1+u²) + 1)
    Ok(species.hyperfine_splitting * bx * bx / ((1.0 + bx * bx).sqrt() + 1.0))
}

/// κ(B) = 2π f₀ B x²/√(1 + B²x²), so that δω_res = κ δB.
pub fn resonance_sensitivity_kappa(species: &AtomSpecies, b: f64) -> Result<f64> {
    non_negative("bias_field", b)?;
    let x = species.breit_rabi_x();
    let bx = b * x;
    Ok(TAU * species.hyperfine_splitting * b * x * x / (1.0 + bx * bx).sqrt())
}

/// δΔ = √(κ²δB² + δω_app²)
pub fn detuning_fluctuation(kappa: f64, field_noise: f64, oscillator_noise: f64) -> Result<f64> {
    non_negative("kappa", kappa)?;
    non_negative("field_noise", field_noise)?;
    non_negative("oscillator_noise", oscillator_noise)?;
    Ok((kappa * field_noise).hypot(oscillator_noise))
}

/// Oscillator length a_ho = √(ħ/(m ω̄)).
pub fn oscillator_length(species: &AtomSpecies, trap: &TrapConfig) -> f64 {
    (HBAR / (species.mass * trap.mean_frequency())).sqrt()
}

/// Thomas-Fermi chemical potential of a single-component condensate in state 1, J.
pub fn tf_chemical_potential(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<f64> {
    positive("atom_number", n)?;
    non_negative("a11", species.a11)?;
    let wbar = trap.mean_frequency();
    let a_ho = oscillator_length(species, trap);
    Ok(0.5 * HBAR * wbar * (15.0 * n * species.a11 / a_ho).powf(0.4))
}

/// Thomas-Fermi radii (x, y, z) in metres.
pub fn tf_radii(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<[f64; 3]> {
    let mu = tf_chemical_potential(species, trap, n)?;
    let r = |w: f64| (2.0 * mu / (species.mass * w * w)).sqrt();
    Ok([r(trap.omega_x), r(trap.omega_y), r(trap.omega_z)])
}

/// Peak Thomas-Fermi density n₀ = μ/U₁₁, m⁻³.
pub fn tf_peak_density(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<f64> {
    let mu = tf_chemical_potential(species, trap, n)?;
    positive("a11", species.a11)?;
    Ok(mu / species.contact_coupling(species.a11))
}

/// Healing length 1/√(8π n₀ a₁₁), m.
pub fn healing_length(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<f64> {
    let n0 = tf_peak_density(species, trap, n)?;
    Ok(1.0 / (8.0 * PI * n0 * species.a11).sqrt())
}

/// Two-mode coupling constants in rad/s per atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl Couplings {
    /// g₁₁ − 2g₁₂ + g₂₂
    pub fn nonlinearity(&self) -> f64 {
        self.g11 - 2.0 * self.g12 + self.g22
    }
}

/// Thomas-Fermi two-mode couplings g_ij for a total of `n` atoms.
pub fn tf_couplings(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<Couplings> {
    positive("atom_number", n)?;
    positive("a11", species.a11)?;
    let u11 = species.contact_coupling(species.a11);
    let wbar = trap.mean_frequency();
    let base = 2f64.powf(0.2) / (7.0 * HBAR)
        * (15.0 * u11 / PI).powf(0.4)
        * (species.mass * wbar * wbar / n).powf(0.6);
    Ok(Couplings {
        g11: base,
        g12: base * species.a12 / species.a11,
        g22: base * species.a22 / species.a11,
    })
}

/// μ = a₁₁a₂₂/a₁₂². Values below one are immiscible.
pub fn miscibility_parameter(a11: f64, a12: f64, a22: f64) -> Result<f64> {
    if a12 == 0.0 || !a12.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a12",
            value: a12,
            reason: "must be finite and nonzero",
        });
    }
    Ok(a11 * a22 / (a12 * a12))
}

pub fn is_miscible(mu: f64) -> bool {
    mu >= 1.0
}

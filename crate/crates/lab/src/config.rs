//! Run configuration: TOML file, built-in experiment defaults and `section.key`
//! overrides.
//!
//! Frequencies in the file are in Hz (ordinary, not angular) and carry a
//! `_hz` suffix; every other key names its unit when it is not SI.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunBlock,
    pub species: SpeciesBlock,
    pub pulse: PulseBlock,
    pub noise: NoiseBlock,
    pub gpe: GpeBlock,
    pub imaging: ImagingBlock,
    pub optimize: OptimizeBlock,
    pub squeezing: SqueezingBlock,
    pub twomode: TwoModeBlock,
    pub fit: FitBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            run: RunBlock::default(),
            species: SpeciesBlock::default(),
            pulse: PulseBlock::default(),
            noise: NoiseBlock::default(),
            gpe: GpeBlock::default(),
            imaging: ImagingBlock::default(),
            optimize: OptimizeBlock::default(),
            squeezing: SqueezingBlock::default(),
            twomode: TwoModeBlock::default(),
            fit: FitBlock::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunBlock {
    pub experiment: String,
    pub seed: u64,
    /// Output directory; falls back to `RAMSEY_LAB_OUT`, then `ramsey-lab-out`.
    pub out: Option<String>,
    /// Any of "csv", "json", "svg", "pgm".
    pub formats: Vec<String>,
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            experiment: "default".into(),
            seed: 2011,
            out: None,
            formats: vec!["csv".into(), "json".into(), "svg".into()],
        }
    }
}

impl RunBlock {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

/// ⁸⁷Rb with optional scattering-length overrides (Bohr radii).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeciesBlock {
    pub a11_bohr: f64,
    pub a12_bohr: f64,
    pub a22_bohr: f64,
}

impl Default for SpeciesBlock {
    fn default() -> Self {
        Self { a11_bohr: 100.9, a12_bohr: 98.9, a22_bohr: 94.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseBlock {
    pub rabi_hz: f64,
    /// Detuning used for the off-resonant beamsplitter check.
    pub offset_detuning_hz: f64,
    /// Free-evolution detuning Δ₁ of the resonant budget.
    pub evolution_detuning_hz: f64,
    pub interrogation_time_s: f64,
    pub atom_number: f64,
}

impl Default for PulseBlock {
    fn default() -> Self {
        Self {
            rabi_hz: 833.0,
            offset_detuning_hz: 100.0,
            evolution_detuning_hz: 100.0,
            interrogation_time_s: 5e-3,
            atom_number: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBlock {
    /// δP/P
    pub relative_power: f64,
    pub bias_gauss: f64,
    pub field_noise_gauss: f64,
    pub oscillator_noise_hz: f64,
    /// Pulse detuning noise; derived from the field block when absent.
    pub pulse_detuning_hz: Option<f64>,
    /// Free-evolution detuning noise; equal to the pulse value when absent.
    pub evolution_detuning_hz: Option<f64>,
    /// Bias fields for the κ(B) table.
    pub kappa_table_gauss: Vec<f64>,
    /// Number of ε points in the f/g sweep, 0 disables it.
    pub sweep_points: usize,
    pub sweep_max_epsilon: f64,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self {
            relative_power: 0.005,
            bias_gauss: 4.0,
            field_noise_gauss: 0.002,
            oscillator_noise_hz: 0.0,
            pulse_detuning_hz: None,
            evolution_detuning_hz: None,
            kappa_table_gauss: vec![0.1, 0.5, 1.0, 2.0, 4.0, 8.0],
            sweep_points: 18,
            sweep_max_epsilon: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpeBlock {
    pub atom_number: f64,
    pub omega_rho_hz: f64,
    pub omega_z_hz: f64,
    pub n_rho: usize,
    pub n_z: usize,
    /// Box half-width in Thomas-Fermi radii.
    pub extent: f64,
    pub dt_real_s: f64,
    pub dt_imag_s: f64,
    pub convergence_tol: f64,
    pub max_imag_steps: usize,
    pub a12_scale: f64,
    pub times_ms: Vec<f64>,
    pub spin_echo: bool,
    pub phase_samples: usize,
    pub decoherence_tau_s: Option<f64>,
    /// Write density/phase snapshots at the end of each interrogation.
    pub snapshots: bool,
}

impl Default for GpeBlock {
    fn default() -> Self {
        Self {
            atom_number: 1e6,
            omega_rho_hz: 55.0,
            omega_z_hz: 30.0,
            n_rho: 128,
            n_z: 256,
            extent: 4.0,
            dt_real_s: 2e-6,
            dt_imag_s: 1e-6,
            convergence_tol: 1e-12,
            max_imag_steps: 200_000,
            a12_scale: 1.0,
            times_ms: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
            spin_echo: false,
            phase_samples: 16,
            decoherence_tau_s: None,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImagingBlock {
    pub atom_number: f64,
    pub state_fraction: f64,
    pub trap_hz: [f64; 3],
    pub expansion_time_s: f64,
    /// "x", "y" or "z".
    pub axis: String,
    pub magnification: f64,
    pub intensity_ratio: f64,
    /// Probe detuning in linewidths Γ.
    pub detuning_linewidths: f64,
    pub quantum_efficiency: f64,
    pub pixel_um: f64,
    pub exposure_us: f64,
    pub full_well: f64,
    pub runs: usize,
    pub photon_noise: bool,
    pub atomic_noise: bool,
}

impl Default for ImagingBlock {
    fn default() -> Self {
        Self {
            atom_number: 1e6,
            state_fraction: 1.0,
            trap_hz: [50.0, 57.0, 28.0],
            expansion_time_s: 30e-3,
            axis: "z".into(),
            magnification: 8.0,
            intensity_ratio: 15.0,
            detuning_linewidths: 0.0,
            quantum_efficiency: 0.17,
            pixel_um: 6.45,
            exposure_us: 100.0,
            full_well: 18_000.0,
            runs: 30,
            photon_noise: true,
            atomic_noise: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeBlock {
    pub intensity_ratios: Vec<f64>,
    pub magnifications: Vec<f64>,
    pub exposure_us: Vec<f64>,
    pub detuning_linewidths: Vec<f64>,
    pub tie_tolerance: f64,
}

impl Default for OptimizeBlock {
    fn default() -> Self {
        Self {
            intensity_ratios: vec![1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0],
            magnifications: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            exposure_us: vec![25.0, 50.0, 100.0],
            detuning_linewidths: vec![0.0, 0.5, 1.0],
            tie_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqueezingBlock {
    pub atom_number: f64,
    /// Twisting rate in rad/s; the Thomas-Fermi value for `trap_hz` when absent.
    pub chi: Option<f64>,
    pub chi_multiplier: f64,
    pub trap_hz: [f64; 3],
    pub prep_time_s: f64,
    pub phase_min_rad: f64,
    pub phase_max_rad: f64,
    pub phase_points: usize,
}

impl Default for SqueezingBlock {
    fn default() -> Self {
        Self {
            atom_number: 1e6,
            chi: None,
            chi_multiplier: 1.0,
            trap_hz: [50.0, 57.0, 28.0],
            prep_time_s: 20e-3,
            phase_min_rad: -std::f64::consts::FRAC_PI_2,
            phase_max_rad: std::f64::consts::FRAC_PI_2,
            phase_points: 181,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoModeBlock {
    pub atom_number: f64,
    pub trap_hz: [f64; 3],
    pub times_s: Vec<f64>,
    /// Shot-to-shot spread of the total number, atoms.
    pub total_number_noise: f64,
    /// Survival pairs (k₁, k₂) for the differential-loss table.
    pub loss_pairs: Vec<[f64; 2]>,
}

impl Default for TwoModeBlock {
    fn default() -> Self {
        Self {
            atom_number: 1e6,
            trap_hz: [50.0, 57.0, 28.0],
            times_s: vec![0.0, 0.1, 0.2, 0.5, 1.0],
            total_number_noise: 1e4,
            loss_pairs: vec![[1.0, 0.5], [1.0, 0.1], [0.45, 0.18]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitBlock {
    /// "drift", "sinusoid", "decay" or "decay-amplitude".
    pub model: String,
    /// CSV with columns x,y[,sigma]; the bundled drift dataset when absent.
    pub data: Option<String>,
    pub bootstrap: usize,
}

impl Default for FitBlock {
    fn default() -> Self {
        Self { model: "drift".into(), data: None, bootstrap: 0 }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        toml::from_str(text).map_err(|e| LabError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        toml::from_str(&text).map_err(|e| LabError::Config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Set `section.key` from a textual value. The value is read as a TOML
    /// literal when possible (numbers, booleans, arrays) and as a bare string
    /// otherwise.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), LabError> {
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| LabError::Config(format!("override `{key}` must be section.key")))?;
        let mut doc = toml::Value::try_from(&*self).expect("config serialises");
        let table = doc
            .as_table_mut()
            .and_then(|t| t.get_mut(section))
            .and_then(|s| s.as_table_mut())
            .ok_or_else(|| LabError::Config(format!("unknown section `{section}`")))?;
        table.insert(field.to_string(), parse_value(raw));
        *self = doc.try_into().map_err(|e: toml::de::Error| {
            LabError::Config(format!("{key} = {raw}: {}", e.message()))
        })?;
        Ok(())
    }
}

fn parse_value(raw: &str) -> toml::Value {
    #[derive(Deserialize)]
    struct Probe {
        v: toml::Value,
    }
    // `1e6` is a valid TOML float; bare words fall through to strings.
    match toml::from_str::<Probe>(&format!("v = {raw}")) {
        Ok(p) => p.v,
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

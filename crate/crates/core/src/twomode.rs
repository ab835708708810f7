//! Two-mode mean-field model: interaction-driven phase evolution, phase
//! diffusion with and without spin echo, differential loss and drift fringes.


#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;
use crate::atomphys::{tf_couplings, AtomSpecies, Couplings, TrapConfig};
use crate::constants::{HBAR, PI};
use crate::error::{non_negative, positive, Error, Result};

/// Two condensate modes sharing a total of `total_number` atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeSystem {
    /// Linear energies ω₁, ω₂ (rad/s).
    pub omega1: f64,
    pub omega2: f64,
    pub couplings: Couplings,
    pub total_number: f64,
    /// ΔN in N₁ = N/2 + ΔN, N₂ = N/2 − ΔN.
    pub number_imbalance: f64,
    /// Shot-to-shot fluctuation of the total atom number.
    pub total_number_noise: f64,
}

impl TwoModeSystem {
    /// Balanced split with the binomial imbalance ΔN = √N/2.
    pub fn new(couplings: Couplings, total_number: f64) -> Result<Self> {
        let s = Self {
            omega1: 0.0,
            omega2: 0.0,
            couplings,
            total_number,
            number_imbalance: total_number.sqrt() / 2.0,
            total_number_noise: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    /// Thomas-Fermi couplings for `species` in `trap` with `n` atoms.
    pub fn thomas_fermi(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<Self> {
        Self::new(tf_couplings(species, trap, n)?, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_number >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "total_number",
                value: self.total_number,
                reason: "must be >= 1",
            });
        }
        if !(self.number_imbalance.abs() <= self.total_number / 2.0) {
            return Err(Error::InvalidParameter {
                name: "number_imbalance",
                value: self.number_imbalance,
                reason: "|dN| must not exceed N/2",
            });
        }
        non_negative("total_number_noise", self.total_number_noise)?;
        Ok(())
    }

    pub fn populations(&self) -> (f64, f64) {
        let h = self.total_number / 2.0;
        (h + self.number_imbalance, h - self.number_imbalance)
    }

    /// Mode frequencies ω_a, ω_b including mean-field shifts.
    pub fn mode_frequencies(&self) -> (f64, f64) {
        let (n1, n2) = self.populations();
        let c = &self.couplings;
        (
            self.omega1 + c.g11 * n1 + c.g12 * n2,
            self.omega2 + c.g22 * n2 + c.g12 * n1,
        )
    }
}

/// dφ/dt = (ω₁ − ω₂) + (g₁₁ − g₁₂)N₁ − (g₂₂ − g₁₂)N₂.
pub fn relative_phase_rate(sys: &TwoModeSystem) -> f64 {
    let (n1, n2) = sys.populations();
    let c = &sys.couplings;
    (sys.omega1 - sys.omega2) + (c.g11 - c.g12) * n1 - (c.g22 - c.g12) * n2
}

/// Rate split into the deterministic density shift (ΔN = 0) and the part
/// driven by the number imbalance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRate {
    pub deterministic: f64,
    pub stochastic: f64,
}

pub fn relative_phase_rate_parts(sys: &TwoModeSystem) -> PhaseRate {
    let balanced = TwoModeSystem { number_imbalance: 0.0, ..*sys };
    let deterministic = relative_phase_rate(&balanced);
    PhaseRate { deterministic, stochastic: sys.couplings.nonlinearity() * sys.number_imbalance }
}

/// Phase spread (g₁₁ − 2g₁₂ + g₂₂)ΔN·T after free evolution. With the
/// default ΔN = √N/2 this is ½(g₁₁ − 2g₁₂ + g₂₂)T√N.
pub fn phase_diffusion(sys: &TwoModeSystem, t: f64) -> Result<f64> {
    non_negative("T", t)?;
    Ok(sys.couplings.nonlinearity() * sys.number_imbalance * t)
}

/// (g₁₁ − g₂₂)·T·ΔN_tot, the spread between shots with N ± ΔN_tot atoms.
pub fn total_number_phase_diffusion(sys: &TwoModeSystem, t: f64, total_number_noise: f64) -> Result<f64> {
    non_negative("T", t)?;
    non_negative("total_number_noise", total_number_noise)?;
    Ok((sys.couplings.g11 - sys.couplings.g22) * t * total_number_noise)
}

/// Mode phases tracked through π/2 – Δt – π – Δt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoPhases {
    pub phi1: f64,
    pub phi2: f64,
    /// φ₂ − φ₁, accumulated per half so that mirrored terms cancel exactly.
    pub difference: f64,
}

impl EchoPhases {
    /// φ₂ − φ₁ at the end of the sequence.
    pub fn difference(&self) -> f64 {
        self.difference
    }
}

/// Follow the phases of c₁, c₂ through an echo sequence of two halves of
/// length `half`. The π pulse swaps the populations and maps c₁ → ic₂,
/// c₂ → ic₁. `total_shift` perturbs the total number for this shot.
pub fn track_echo_phases(sys: &TwoModeSystem, half: f64, total_shift: f64) -> EchoPhases {
    let n = sys.total_number + total_shift;
    let dn = sys.number_imbalance;
    let c = &sys.couplings;
    let h = n / 2.0;
    let phi1_a = (sys.omega1 + c.g11 * (h + dn) + c.g12 * (h - dn)) * half;
    let phi2_a = (sys.omega2 + c.g22 * (h - dn) + c.g12 * (h + dn)) * half;
    let inc1 = (sys.omega1 + c.g11 * (h - dn) + c.g12 * (h + dn)) * half;
    let inc2 = (sys.omega2 + c.g22 * (h + dn) + c.g12 * (h - dn)) * half;
    // After the swap φ₁ = φ₂ₐ + π/2 + inc₁ and φ₂ = φ₁ₐ + π/2 + inc₂.
    EchoPhases {
        phi1: phi2_a + PI / 2.0 + inc1,
        phi2: phi1_a + PI / 2.0 + inc2,
        difference: (phi1_a - phi2_a) + (inc2 - inc1),
    }
}

/// Result of the echo bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoDiffusion {
    /// Phase spread from the number imbalance, (g₁₁ − 2g₁₂ + g₂₂)√N Δt with Δt = T/2.
    pub imbalance: f64,
    /// Residual spread from total-number fluctuations; zero in exact arithmetic.
    pub total_number: f64,
}

/// Phase diffusion in a π/2 – π – π/2 sequence of total length `total_t`.
pub fn spin_echo_phase_diffusion(sys: &TwoModeSystem, total_t: f64) -> Result<EchoDiffusion> {
    non_negative("total_T", total_t)?;
    let half = total_t / 2.0;
    let balanced = TwoModeSystem { number_imbalance: 0.0, ..*sys };
    let reference = track_echo_phases(&balanced, half, 0.0).difference();
    let imbalance = track_echo_phases(sys, half, 0.0).difference() - reference;
    let dn = sys.total_number_noise;
    let total_number = track_echo_phases(&balanced, half, dn).difference()
        - track_echo_phases(&balanced, half, -dn).difference();
    Ok(EchoDiffusion { imbalance, total_number })
}

/// Closed-form Thomas-Fermi phase diffusion rate per unit interrogation time,
/// [(a₁₁ − 2a₁₂ + a₂₂)/a₁₁] (15√m ħ² ω̄³ a₁₁)^{2/5}/(7ħ N^{1/10}).
///
/// Identical to (g₁₁ − 2g₁₂ + g₂₂)√N/2 built from [`tf_couplings`].
pub fn tf_phase_diffusion_rate(species: &AtomSpecies, trap: &TrapConfig, n: f64) -> Result<f64> {
    positive("atom_number", n)?;
    positive("a11", species.a11)?;
    let wbar = trap.mean_frequency();
    let ratio = scattering_factor(species);
    let core = 15.0 * species.mass.sqrt() * HBAR * HBAR * wbar.powi(3) * species.a11;
    // The per-Δt coefficient carries a factor 2; Δt is half the sequence.
    Ok(ratio * 2.0 * core.powf(0.4) / (7.0 * HBAR) / n.powf(0.1) / 2.0)
}

/// (a₁₁ − 2a₁₂ + a₂₂)/a₁₁
pub fn scattering_factor(species: &AtomSpecies) -> f64 {
    (species.a11 - 2.0 * species.a12 + species.a22) / species.a11
}

/// Fringe visibility after survival fractions k₁, k₂: 2√(k₁k₂)/(k₁ + k₂).
pub fn differential_loss_visibility(k1: f64, k2: f64) -> Result<f64> {
    survival("k1", k1)?;
    survival("k2", k2)?;
    Ok((2.0 * (k1 * k2).sqrt() / (k1 + k2)).min(1.0))
}

/// Full fringe ½[1 + V cos φ] with differential-loss visibility.
pub fn differential_loss_fringe(k1: f64, k2: f64, phi: f64) -> Result<f64> {
    let v = differential_loss_visibility(k1, k2)?;
    Ok(0.5 * (1.0 + v * phi.cos()))
}

fn survival(name: &'static str, k: f64) -> Result<f64> {
    if k > 0.0 && k <= 1.0 {
        Ok(k)
    } else {
        Err(Error::InvalidParameter { name, value: k, reason: "survival fraction must be in (0, 1]" })
    }
}

/// p(T) = ½[1 + V₀ e^{−T/τ} cos(νT²/4)] for a linear detuning drift ν (rad/s²).
pub fn drift_fringe_model(nu: f64, t: f64, tau: f64, v0: f64) -> f64 {
    0.5 * (1.0 + v0 * (-t / tau).exp() * (nu * t * t / 4.0).cos())
}

/// Mid-fringe population noise δp = T δΔ/2.
pub fn detuning_noise_to_population(t: f64, detuning_noise: f64) -> Result<f64> {
    non_negative("T", t)?;
    non_negative("detuning_noise", detuning_noise)?;
    Ok(t * detuning_noise / 2.0)
}

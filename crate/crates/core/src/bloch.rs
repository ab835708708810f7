//! Two-level pulse algebra and noise propagation through Ramsey sequences.
//!
//! Sign conventions: a square pulse rotates the Bloch vector about the axis
//! (Ω, 0, Δ) by Ω_R t, free evolution rotates it about +z by ΔT, and the
//! atoms start at the north pole. `P_z = 1 − 2p` where `p` is the population
//! transferred to |2⟩. [`ideal_ramsey_probability`] uses the opposite labelling
//! (p = 1 at Δ = 0) and is kept separate on purpose.

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::constants::PI;
use crate::error::{non_negative, positive, unit_interval, Error, Result};

/// A square coupling pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Ω, rad/s
    pub rabi_frequency: f64,
    /// Δ, rad/s
    pub detuning: f64,
    /// s
    pub duration: f64,
}

impl PulseParams {
    pub fn new(rabi_frequency: f64, detuning: f64, duration: f64) -> Result<Self> {
        positive("rabi_frequency", rabi_frequency)?;
        non_negative("duration", duration)?;
        finite("detuning", detuning)?;
        Ok(Self { rabi_frequency, detuning, duration })
    }

    /// π/2 pulse at the given Rabi frequency and detuning.
    pub fn pi_half(rabi_frequency: f64, detuning: f64) -> Result<Self> {
        let t = pi_half_duration(rabi_frequency, detuning)?;
        Self::new(rabi_frequency, detuning, t)
    }

    /// ε = |Δ|/Ω
    pub fn epsilon(&self) -> f64 {
        self.detuning.abs() / self.rabi_frequency
    }

    /// Ω_R = √(Ω² + Δ²)
    pub fn generalized_rabi(&self) -> f64 {
        self.rabi_frequency.hypot(self.detuning)
    }
}

/// Pulse – free evolution – pulse, optionally with a mid-sequence π pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseySequence {
    pub pulse: PulseParams,
    /// T, s
    pub interrogation_time: f64,
    /// Detuning during free evolution; `None` means the pulse detuning.
    pub evolution_detuning: Option<f64>,
    /// Insert an ideal π rotation about x at T/2.
    pub spin_echo: bool,
}

impl RamseySequence {
    pub fn new(pulse: PulseParams, interrogation_time: f64) -> Result<Self> {
        non_negative("interrogation_time", interrogation_time)?;
        Ok(Self { pulse, interrogation_time, evolution_detuning: None, spin_echo: false })
    }

    pub fn evolution_detuning(&self) -> f64 {
        self.evolution_detuning.unwrap_or(self.pulse.detuning)
    }

    /// Final Bloch vector, by direct composition of rotations.
    pub fn final_bloch_vector(&self) -> [f64; 3] {
        let p = &self.pulse;
        let axis = [p.rabi_frequency, 0.0, p.detuning];
        let angle = p.generalized_rabi() * p.duration;
        let d1 = self.evolution_detuning();
        let t = self.interrogation_time;
        let mut v = [0.0, 0.0, 1.0];
        v = rotate(v, axis, angle);
        if self.spin_echo {
            v = rotate(v, [0.0, 0.0, 1.0], d1 * t / 2.0);
            v = rotate(v, [1.0, 0.0, 0.0], PI);
            v = rotate(v, [0.0, 0.0, 1.0], d1 * t / 2.0);
        } else {
            v = rotate(v, [0.0, 0.0, 1.0], d1 * t);
        }
        rotate(v, axis, angle)
    }

    /// Longitudinal projection P_z at the end of the sequence.
    pub fn pz(&self) -> f64 {
        if self.evolution_detuning.is_none() && !self.spin_echo {
            ramsey_pz(
                self.pulse.rabi_frequency,
                self.pulse.detuning,
                self.pulse.duration,
                self.interrogation_time,
            )
        } else {
            self.final_bloch_vector()[2]
        }
    }
}

/// Rodrigues rotation of `v` about `axis` (need not be normalised) by `angle`.
pub fn rotate(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if n == 0.0 {
        return v;
    }
    let k = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    let cross = [
        k[1] * v[2] - k[2] * v[1],
        k[2] * v[0] - k[0] * v[2],
        k[0] * v[1] - k[1] * v[0],
    ];
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = v[i] * c + cross[i] * s + k[i] * kv * (1.0 - c);
    }
    out
}

/// Linear noise inputs for the interferometer budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseBudget {
    /// δP/P
    pub relative_power_noise: f64,
    /// δΔ during the pulses, rad/s
    pub pulse_detuning_noise: f64,
    /// δΔ₁ during free evolution, rad/s
    pub evolution_detuning_noise: f64,
}

impl NoiseBudget {
    pub fn validate(&self) -> Result<()> {
        non_negative("relative_power_noise", self.relative_power_noise)?;
        non_negative("pulse_detuning_noise", self.pulse_detuning_noise)?;
        non_negative("evolution_detuning_noise", self.evolution_detuning_noise)?;
        Ok(())
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter { name, value: v, reason: "must be finite" })
    }
}

fn beamsplitter_epsilon(rabi_frequency: f64, detuning: f64) -> Result<f64> {
    positive("rabi_frequency", rabi_frequency)?;
    finite("detuning", detuning)?;
    let eps = detuning.abs() / rabi_frequency;
    if eps >= 1.0 {
        return Err(Error::NoBeamsplitter { epsilon: eps });
    }
    Ok(eps)
}

/// Duration of a pulse that takes the north pole onto the equator,
/// cos⁻¹(−ε²)/Ω_R.
pub fn pi_half_duration(rabi_frequency: f64, detuning: f64) -> Result<f64> {
    let eps = beamsplitter_epsilon(rabi_frequency, detuning)?;
    Ok((-eps * eps).acos() / rabi_frequency.hypot(detuning))
}

/// Single-pulse transfer probability (Ω²/Ω_R²) sin²(Ω_R t/2).
pub fn rabi_transition_probability(rabi_frequency: f64, detuning: f64, duration: f64) -> f64 {
    let w2 = rabi_frequency * rabi_frequency + detuning * detuning;
    if w2 == 0.0 {
        return 0.0;
    }
    let s = (w2.sqrt() * duration / 2.0).sin();
    (rabi_frequency * rabi_frequency / w2 * s * s).clamp(0.0, 1.0)
}

/// Fringe offset α and phase ξ of the closed-form Ramsey signal.
pub fn ramsey_alpha_xi(rabi_frequency: f64, detuning: f64, duration: f64) -> (f64, f64) {
    let eps = detuning.abs() / rabi_frequency;
    let e2 = eps * eps;
    let wr = rabi_frequency * (1.0 + e2).sqrt();
    let (s, c) = (wr * duration).sin_cos();
    let alpha = (e2 + c) / (e2 + 1.0);
    let num = (1.0 + 2.0 * e2) * c + 1.0;
    let den = 2.0 * eps * (1.0 + e2).sqrt() * s;
    let xi = if den != 0.0 {
        let n = if s < 0.0 { 1.0 } else { 0.0 };
        n * PI - (num / den).atan()
    } else if num != 0.0 {
        // tan⁻¹(±∞); on resonance this gives the textbook cos(2Ωt) fringe.
        -num.signum() * PI / 2.0
    } else {
        // α² = 1 here, so the phase does not matter.
        0.0
    };
    (alpha, xi)
}

/// P_z = α² + (1 − α²) sin(|Δ|T + ξ) after pulse – T – pulse.
pub fn ramsey_pz(rabi_frequency: f64, detuning: f64, duration: f64, interrogation_time: f64) -> f64 {
    let (alpha, xi) = ramsey_alpha_xi(rabi_frequency, detuning, duration);
    let a2 = alpha * alpha;
    a2 + (1.0 - a2) * (detuning.abs() * interrogation_time + xi).sin()
}

/// First zero crossing of the fringe, T₀ = sin⁻¹(1 − 2ε²)/|Δ|.
pub fn optimal_evolution_time(rabi_frequency: f64, detuning: f64) -> Result<f64> {
    let eps = beamsplitter_epsilon(rabi_frequency, detuning)?;
    if detuning == 0.0 {
        return Err(Error::UndefinedOnResonance { what: "optimal evolution time T0" });
    }
    Ok((1.0 - 2.0 * eps * eps).asin() / detuning.abs())
}

fn check_open_epsilon(eps: f64) -> Result<()> {
    if eps == 0.0 {
        return Err(Error::UndefinedOnResonance {
            what: "f/g noise decomposition (use resonant_noise_variance)",
        });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::NoBeamsplitter { epsilon: eps });
    }
    Ok(())
}

/// Power-noise coefficient f(ε).
pub fn power_coefficient(eps: f64) -> f64 {
    let e2 = eps * eps;
    let r = eps * ((-e2).acos() - (1.0 - e2 * e2).sqrt()) / (1.0 + e2).powf(1.5);
    r * r
}

/// Detuning-noise coefficient g(ε).
pub fn detuning_coefficient(eps: f64) -> f64 {
    let e2 = eps * eps;
    let r = (1.0 - 2.0 * e2).asin() / eps
        + 2.0 * ((1.0 - e2 * e2).sqrt() + e2 * (-e2).acos()) / (1.0 + e2).powf(1.5);
    r * r
}

/// Small-ε forms (π/2 − 1)²ε² and (π/(2ε))² of f and g.
pub fn power_coefficient_small_eps(eps: f64) -> f64 {
    let a = PI / 2.0 - 1.0;
    a * a * eps * eps
}

pub fn detuning_coefficient_small_eps(eps: f64) -> f64 {
    let b = PI / (2.0 * eps);
    b * b
}

/// (δP_z)² at t = t_π/2, T = T₀ for pulses detuned by ε = |Δ|/Ω.
pub fn ramsey_noise_variance(eps: f64, noise: &NoiseBudget, rabi_frequency: f64) -> Result<f64> {
    check_open_epsilon(eps)?;
    positive("rabi_frequency", rabi_frequency)?;
    noise.validate()?;
    let p = noise.relative_power_noise;
    let d = noise.pulse_detuning_noise / rabi_frequency;
    Ok(power_coefficient(eps) * p * p + detuning_coefficient(eps) * d * d)
}

/// Small-ε approximation of [`ramsey_noise_variance`].
pub fn ramsey_noise_variance_small_eps(
    eps: f64,
    noise: &NoiseBudget,
    rabi_frequency: f64,
) -> Result<f64> {
    check_open_epsilon(eps)?;
    positive("rabi_frequency", rabi_frequency)?;
    noise.validate()?;
    let p = noise.relative_power_noise;
    let d = noise.pulse_detuning_noise / rabi_frequency;
    Ok(power_coefficient_small_eps(eps) * p * p + detuning_coefficient_small_eps(eps) * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalDetuning {
    /// 1.66 √(δΔ Ω P/δP), rad/s
    pub approx: f64,
    /// Numerical minimiser of the exact variance, rad/s
    pub exact: f64,
    pub epsilon_approx: f64,
    pub epsilon_exact: f64,
    /// Exact (δP_z)² at the numerical optimum.
    pub variance: f64,
}

/// Pulse detuning that minimises the interferometer noise.
pub fn optimal_detuning(
    detuning_noise: f64,
    rabi_frequency: f64,
    relative_power_noise: f64,
) -> Result<OptimalDetuning> {
    positive("detuning_noise", detuning_noise)?;
    positive("rabi_frequency", rabi_frequency)?;
    positive("relative_power_noise", relative_power_noise)?;
    let ratio = detuning_noise / rabi_frequency / relative_power_noise;
    let approx = 1.66 * (detuning_noise * rabi_frequency / relative_power_noise).sqrt();
    let epsilon_approx = ratio.sqrt() / (1.0 - 2.0 / PI).sqrt();

    let d = detuning_noise / rabi_frequency;
    let p = relative_power_noise;
    let var = |e: f64| power_coefficient(e) * p * p + detuning_coefficient(e) * d * d;
    // Golden-section search in ln ε; the variance is unimodal on (0, 1).
    let (mut a, mut b) = ((1e-8f64).ln(), (0.999_999f64).ln());
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut e = a + r * (b - a);
    let (mut fc, mut fe) = (var(c.exp()), var(e.exp()));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - r * (b - a);
            fc = var(c.exp());
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + r * (b - a);
            fe = var(e.exp());
        }
    }
    let epsilon_exact = (0.5 * (a + b)).exp();
    Ok(OptimalDetuning {
        approx,
        exact: epsilon_exact * rabi_frequency,
        epsilon_approx,
        epsilon_exact,
        variance: var(epsilon_exact),
    })
}

/// Resonant pulses with detuning Δ₁ during free evolution:
/// (π/4)⁴(δP/P)⁴ + 4(δΔ/Ω)² + (π²/4)(δΔ₁/Δ₁)².
pub fn resonant_noise_variance(
    noise: &NoiseBudget,
    rabi_frequency: f64,
    evolution_detuning: f64,
) -> Result<f64> {
    positive("rabi_frequency", rabi_frequency)?;
    noise.validate()?;
    if evolution_detuning == 0.0 || !evolution_detuning.is_finite() {
        return Err(Error::InvalidParameter {
            name: "evolution_detuning",
            value: evolution_detuning,
            reason: "must be finite and nonzero",
        });
    }
    let p = noise.relative_power_noise;
    let d = noise.pulse_detuning_noise / rabi_frequency;
    let d1 = noise.evolution_detuning_noise / evolution_detuning;
    let q = PI / 4.0;
    Ok(q.powi(4) * p.powi(4) + 4.0 * d * d + PI * PI / 4.0 * d1 * d1)
}

/// First-order and exact sensitivity of a single π/2 beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterSensitivity {
    /// (2 − π/2)(Δ/Ω)(δΔ/Ω)
    pub detuning_term: f64,
    /// (π/4) δP/P
    pub power_term: f64,
    /// Sum of the two first-order terms, in P_z.
    pub first_order: f64,
    /// |ΔP_z| for a detuning step δΔ at fixed pulse length, from the Rabi formula.
    pub exact_detuning: f64,
    /// |ΔP_z| for a power step δP/P at fixed pulse length.
    pub exact_power: f64,
}

impl BeamsplitterSensitivity {
    /// Population fluctuation δp = δP_z/2 of the first-order estimate.
    pub fn first_order_population(&self) -> f64 {
        self.first_order / 2.0
    }
}

pub fn single_beamsplitter_sensitivity(
    detuning: f64,
    rabi_frequency: f64,
    detuning_noise: f64,
    relative_power_noise: f64,
) -> Result<BeamsplitterSensitivity> {
    let t = pi_half_duration(rabi_frequency, detuning)?;
    non_negative("detuning_noise", detuning_noise)?;
    non_negative("relative_power_noise", relative_power_noise)?;
    let detuning_term =
        (2.0 - PI / 2.0) * (detuning.abs() / rabi_frequency) * (detuning_noise / rabi_frequency);
    let power_term = PI / 4.0 * relative_power_noise;
    let p0 = rabi_transition_probability(rabi_frequency, detuning, t);
    let step = if detuning >= 0.0 { detuning_noise } else { -detuning_noise };
    let pd = rabi_transition_probability(rabi_frequency, detuning + step, t);
    let pp = rabi_transition_probability(
        rabi_frequency * (1.0 + relative_power_noise).sqrt(),
        detuning,
        t,
    );
    Ok(BeamsplitterSensitivity {
        detuning_term,
        power_term,
        first_order: detuning_term + power_term,
        exact_detuning: 2.0 * (pd - p0).abs(),
        exact_power: 2.0 * (pp - p0).abs(),
    })
}

/// Binomial projection noise √(p(1 − p)/N) on a population fraction.
pub fn projection_noise(n: f64, p: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter { name: "atom_number", value: n, reason: "must be >= 1" });
    }
    unit_interval("p", p)?;
    Ok((p * (1.0 - p) / n).sqrt())
}

/// p = ½[1 + cos(TΔ)] for ideal instantaneous pulses.
pub fn ideal_ramsey_probability(detuning: f64, interrogation_time: f64) -> f64 {
    0.5 * (1.0 + (interrogation_time * detuning).cos())
}

/// Largest detuning fluctuation compatible with projection-noise-limited
/// operation, 1/(T√N) in rad/s.
pub fn max_detuning_fluctuation(interrogation_time: f64, n: f64) -> Result<f64> {
    positive("interrogation_time", interrogation_time)?;
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter { name: "atom_number", value: n, reason: "must be >= 1" });
    }
    Ok(1.0 / (interrogation_time * n.sqrt()))
}

/// Monte Carlo companion to the linearised budget: samples Gaussian power
/// and detuning errors, recomputes P_z at fixed (t, T) and returns the
/// sample standard deviation of P_z.
pub fn monte_carlo_pz_std<R: Rng + ?Sized>(
    rabi_frequency: f64,
    detuning: f64,
    duration: f64,
    interrogation_time: f64,
    noise: &NoiseBudget,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    noise.validate()?;
    positive("rabi_frequency", rabi_frequency)?;
    if samples < 2 {
        return Err(Error::NotEnoughData { needed: 2, got: samples });
    }
    let dp = Normal::new(0.0, noise.relative_power_noise).map_err(|_| Error::InvalidParameter {
        name: "relative_power_noise",
        value: noise.relative_power_noise,
        reason: "invalid normal width",
    })?;
    let dd = Normal::new(0.0, noise.pulse_detuning_noise).map_err(|_| Error::InvalidParameter {
        name: "pulse_detuning_noise",
        value: noise.pulse_detuning_noise,
        reason: "invalid normal width",
    })?;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        let om = rabi_frequency * (1.0 + dp.sample(rng)).max(0.0).sqrt();
        let de = detuning + dd.sample(rng);
        let pz = ramsey_pz(om, de, duration, interrogation_time);
        let delta = pz - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (pz - mean);
    }
    Ok((m2 / (samples - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TAU;

    #[test]
    fn pi_half_resonant() {
        let t = pi_half_duration(2.0, 0.0).unwrap();
        assert!((t - PI / 4.0).abs() < 1e-15);
        assert!(pi_half_duration(1.0, 1.0).is_err());
        assert!(pi_half_duration(1.0, -1.5).is_err());
        let t = pi_half_duration(1.0, 1.0 - 1e-12).unwrap();
        assert!((t - PI / 2f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn pi_half_gives_half_transfer() {
        let t = pi_half_duration(1.0, 0.5).unwrap();
        assert!((t - (-0.25f64).acos() / 1.25f64.sqrt()).abs() < 1e-15);
        assert!((rabi_transition_probability(1.0, 0.5, t) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rabi_limits() {
        assert_eq!(rabi_transition_probability(3.0, 0.4, 0.0), 0.0);
        assert!((rabi_transition_probability(3.0, 0.0, PI / 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn resonant_double_pi_half_is_full_transfer() {
        for &tt in &[0.0, 0.3, 17.0] {
            let pz = ramsey_pz(2.0, 0.0, PI / 4.0, tt);
            assert!((pz + 1.0).abs() < 1e-15, "{pz}");
        }
    }

    #[test]
    fn zero_crossing_at_t0() {
        for i in 1..=18 {
            let eps = 0.05 * i as f64;
            let om = 3.0;
            let t = pi_half_duration(om, eps * om).unwrap();
            let t0 = optimal_evolution_time(om, eps * om).unwrap();
            assert!(ramsey_pz(om, eps * om, t, t0).abs() < 1e-10);
        }
        assert!(optimal_evolution_time(1.0, 0.0).is_err());
        let t0 = optimal_evolution_time(1.0, 0.5f64.sqrt()).unwrap();
        assert!(t0.abs() < 1e-7);
    }

    #[test]
    fn closed_form_matches_rotations() {
        for &(om, de, t, tt) in &[(1.0, 0.3, 1.1, 2.0), (2.5, -1.2, 0.4, 7.0), (1.0, 0.0, 0.9, 1.0)] {
            let seq = RamseySequence::new(PulseParams::new(om, de, t).unwrap(), tt).unwrap();
            let v = seq.final_bloch_vector();
            assert!((v[2] - ramsey_pz(om, de, t, tt)).abs() < 1e-12);
        }
    }

    #[test]
    fn echo_on_resonance_cancels_evolution_detuning() {
        let mut seq = RamseySequence::new(PulseParams::pi_half(1.0, 0.0).unwrap(), 3.0).unwrap();
        seq.evolution_detuning = Some(0.7);
        seq.spin_echo = true;
        // π/2 – echo – π/2 returns to the start regardless of Δ₁.
        assert!((seq.pz() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_against_finite_differences() {
        for &eps in &[0.05, 0.2, 0.5, 0.8] {
            let om = 1.0;
            let de = eps * om;
            let t = pi_half_duration(om, de).unwrap();
            let tt = optimal_evolution_time(om, de).unwrap();
            let h = 1e-6;
            let d_om = (ramsey_pz(om * (1.0 + h), de, t, tt) - ramsey_pz(om * (1.0 - h), de, t, tt))
                / (2.0 * h);
            let d_de = (ramsey_pz(om, de + h, t, tt) - ramsey_pz(om, de - h, t, tt)) / (2.0 * h);
            let f = (0.5 * d_om).powi(2);
            let g = (om * d_de).powi(2);
            assert!((f / power_coefficient(eps) - 1.0).abs() < 1e-6, "eps {eps}");
            assert!((g / detuning_coefficient(eps) - 1.0).abs() < 1e-6, "eps {eps}");
        }
    }

    #[test]
    fn variance_rejects_resonance() {
        let n = NoiseBudget::default();
        assert!(matches!(
            ramsey_noise_variance(0.0, &n, 1.0),
            Err(Error::UndefinedOnResonance { .. })
        ));
        assert_eq!(ramsey_noise_variance(0.3, &n, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn resonant_budget() {
        let n = NoiseBudget { relative_power_noise: 0.005, ..Default::default() };
        let v = resonant_noise_variance(&n, 1.0, 1.0).unwrap();
        assert!((v - (PI / 4.0).powi(4) * 0.005f64.powi(4)).abs() < 1e-22);
        assert!((v - 2.4e-10).abs() < 0.1e-10);
        let n = NoiseBudget { pulse_detuning_noise: 1e-3, ..Default::default() };
        assert!((resonant_noise_variance(&n, 1.0, 1.0).unwrap() - 4e-6).abs() < 1e-18);
        assert!(resonant_noise_variance(&n, 1.0, 0.0).is_err());
    }

    #[test]
    fn optimal_detuning_scaling() {
        let a = optimal_detuning(1.0, 100.0, 0.01).unwrap();
        let b = optimal_detuning(4.0, 100.0, 0.01).unwrap();
        assert!((b.approx / a.approx - 2.0).abs() < 1e-12);
        let c = optimal_detuning(1.0, 100.0, 0.04).unwrap();
        assert!((c.approx / a.approx - 0.5).abs() < 1e-12);
    }

    #[test]
    fn beamsplitter_terms() {
        let s = single_beamsplitter_sensitivity(0.0, 1.0, 0.1, 0.005).unwrap();
        assert_eq!(s.detuning_term, 0.0);
        assert!((s.first_order - PI / 4.0 * 0.005).abs() < 1e-15);
        assert!((s.first_order - 0.0039).abs() < 1e-4);
        let s = single_beamsplitter_sensitivity(TAU * 100.0, TAU * 833.0, TAU * 10.0, 0.0).unwrap();
        let want = (2.0 - PI / 2.0) * (100.0 / 833.0) * (10.0 / 833.0);
        assert!((s.detuning_term - want).abs() < 1e-15);
        assert!((s.detuning_term / s.exact_detuning - 1.0).abs() < 0.1);
    }

    #[test]
    fn projection_and_bounds() {
        assert_eq!(projection_noise(10.0, 0.0).unwrap(), 0.0);
        assert!((projection_noise(1e6, 0.5).unwrap() - 5e-4).abs() < 1e-15);
        let r = projection_noise(1e3, 0.5).unwrap() / projection_noise(1e6, 0.5).unwrap();
        assert!((r - 1000f64.sqrt()).abs() < 1e-10);
        assert!(projection_noise(0.5, 0.5).is_err());
        assert!(projection_noise(10.0, 1.5).is_err());
        let d = max_detuning_fluctuation(5e-3, 1e6).unwrap();
        assert!((d - 0.2).abs() < 1e-12);
        assert!((max_detuning_fluctuation(5e-3, 1e8).unwrap() - 0.02).abs() < 1e-12);
    }

    #[test]
    fn ideal_fringe() {
        assert_eq!(ideal_ramsey_probability(0.0, 1.0), 1.0);
        assert!((ideal_ramsey_probability(PI / 2.0, 1.0) - 0.5).abs() < 1e-15);
        assert!(ideal_ramsey_probability(PI, 1.0).abs() < 1e-15);
    }
}

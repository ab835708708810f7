use ramsey_core::atomphys::{clock_shift, resonance_sensitivity_kappa, FieldConfig};
use ramsey_core::bloch::{
    detuning_coefficient, detuning_coefficient_small_eps, max_detuning_fluctuation, optimal_detuning,
    power_coefficient, power_coefficient_small_eps, projection_noise, rabi_transition_probability,
    resonant_noise_variance, single_beamsplitter_sensitivity, NoiseBudget,
};
use ramsey_core::constants::{gauss_to_tesla, PI, TAU};
use serde::Serialize;

use super::{check, species};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{num, Output, Plot};

#[derive(Debug, Serialize)]
pub struct NoiseReport {
    pub rabi_frequency: f64,
    pub relative_power_noise: f64,
    pub pulse_detuning_noise_hz: f64,
    pub evolution_detuning_noise_hz: f64,
    /// None when either noise source is zero.
    pub optimum: Option<Optimum>,
    pub resonant: Resonant,
    pub beamsplitter: Beamsplitter,
    pub kappa_table: Vec<KappaRow>,
    pub projection: Projection,
}

#[derive(Debug, Serialize)]
pub struct Optimum {
    pub detuning_approx_hz: f64,
    pub detuning_exact_hz: f64,
    pub epsilon_approx: f64,
    pub epsilon_exact: f64,
    pub f: f64,
    pub g: f64,
    pub sigma_pz: f64,
}

/// Resonant pulses: the three terms of (δP_z)² and their sum.
#[derive(Debug, Serialize)]
pub struct Resonant {
    pub evolution_detuning_hz: f64,
    pub power_term: f64,
    pub pulse_detuning_term: f64,
    pub evolution_term: f64,
    pub variance: f64,
    pub sigma_pz: f64,
    /// √ of the power term alone: the full-interferometer power sensitivity.
    pub power_only_sigma_pz: f64,
}

#[derive(Debug, Serialize)]
pub struct Beamsplitter {
    /// |δp| between Δ = 0 and Δ = δΔ at the resonant π/2 length.
    pub resonant_population_change: f64,
    pub offset_detuning_hz: f64,
    /// First-order (2 − π/2)(Δ/Ω)(δΔ/Ω), in P_z.
    pub offset_first_order_pz: f64,
    /// Same step from the Rabi formula, in P_z.
    pub offset_exact_pz: f64,
    /// (π/4)δP/P, in P_z.
    pub power_first_order_pz: f64,
}

#[derive(Debug, Serialize)]
pub struct KappaRow {
    pub bias_gauss: f64,
    pub clock_shift_hz: f64,
    /// dν/dB in Hz per mG.
    pub kappa_hz_per_mg: f64,
    /// κ·δB for the configured field noise, Hz.
    pub field_noise_detuning_hz: f64,
}

#[derive(Debug, Serialize)]
pub struct Projection {
    pub interrogation_time_s: f64,
    pub atom_number: f64,
    pub sigma_p: f64,
    pub max_detuning_rad_s: f64,
    pub max_detuning_hz: f64,
    /// max_detuning_hz / f₀
    pub relative_stability: f64,
}

pub fn compute(cfg: &RunConfig) -> Result<(NoiseReport, Vec<[f64; 7]>), LabError> {
    let sp = species(cfg)?;
    let p = &cfg.pulse;
    let nz = &cfg.noise;
    check("pulse", p.rabi_hz > 0.0 && p.rabi_hz.is_finite(), || format!("rabi_hz = {} must be > 0", p.rabi_hz))?;
    check("pulse", p.evolution_detuning_hz != 0.0 && p.evolution_detuning_hz.is_finite(), || {
        "evolution_detuning_hz must be finite and nonzero".into()
    })?;
    check("pulse", p.offset_detuning_hz.abs() < p.rabi_hz, || {
        format!("offset_detuning_hz = {} must be below rabi_hz", p.offset_detuning_hz)
    })?;
    check("pulse", p.interrogation_time_s > 0.0, || "interrogation_time_s must be > 0".into())?;
    check("pulse", p.atom_number >= 1.0, || "atom_number must be >= 1".into())?;
    check("noise", nz.sweep_max_epsilon > 0.0 && nz.sweep_max_epsilon < 1.0, || {
        "sweep_max_epsilon must lie in (0, 1)".into()
    })?;
    let field = FieldConfig {
        bias_field: gauss_to_tesla(nz.bias_gauss),
        field_noise: gauss_to_tesla(nz.field_noise_gauss),
        oscillator_frequency: TAU * sp.hyperfine_splitting,
        oscillator_noise: TAU * nz.oscillator_noise_hz,
    };
    field.validate().map_err(|e| LabError::invalid("noise", e))?;
    for &b in &nz.kappa_table_gauss {
        check("noise", b.is_finite() && b >= 0.0, || format!("kappa_table_gauss entry {b} must be >= 0"))?;
    }
    let pulse_noise = match nz.pulse_detuning_hz {
        Some(hz) => TAU * hz,
        None => field.detuning_fluctuation(&sp).map_err(|e| LabError::invalid("noise", e))?,
    };
    let evo_noise = nz.evolution_detuning_hz.map_or(pulse_noise, |hz| TAU * hz);
    let budget = NoiseBudget {
        relative_power_noise: nz.relative_power,
        pulse_detuning_noise: pulse_noise,
        evolution_detuning_noise: evo_noise,
    };
    budget.validate().map_err(|e| LabError::invalid("noise", e))?;

    let omega = TAU * p.rabi_hz;
    let dp = nz.relative_power;
    let d = pulse_noise / omega;

    let optimum = if dp > 0.0 && pulse_noise > 0.0 {
        let o = optimal_detuning(pulse_noise, omega, dp)?;
        let (f, g) = (power_coefficient(o.epsilon_exact), detuning_coefficient(o.epsilon_exact));
        Some(Optimum {
            detuning_approx_hz: o.approx / TAU,
            detuning_exact_hz: o.exact / TAU,
            epsilon_approx: o.epsilon_approx,
            epsilon_exact: o.epsilon_exact,
            f,
            g,
            sigma_pz: o.variance.sqrt(),
        })
    } else {
        None
    };

    let delta1 = TAU * p.evolution_detuning_hz;
    let variance = resonant_noise_variance(&budget, omega, delta1)?;
    let power_term = (PI / 4.0).powi(4) * dp.powi(4);
    let resonant = Resonant {
        evolution_detuning_hz: p.evolution_detuning_hz,
        power_term,
        pulse_detuning_term: 4.0 * d * d,
        evolution_term: PI * PI / 4.0 * (evo_noise / delta1).powi(2),
        variance,
        sigma_pz: variance.sqrt(),
        power_only_sigma_pz: power_term.sqrt(),
    };

    let t_res = PI / (2.0 * omega);
    let offset = TAU * p.offset_detuning_hz;
    let bs = single_beamsplitter_sensitivity(offset, omega, pulse_noise, dp)?;
    let beamsplitter = Beamsplitter {
        resonant_population_change: (rabi_transition_probability(omega, pulse_noise, t_res)
            - rabi_transition_probability(omega, 0.0, t_res))
        .abs(),
        offset_detuning_hz: p.offset_detuning_hz,
        offset_first_order_pz: bs.detuning_term,
        offset_exact_pz: bs.exact_detuning,
        power_first_order_pz: bs.power_term,
    };

    let mut kappa_table = Vec::new();
    for &bg in &nz.kappa_table_gauss {
        let b = gauss_to_tesla(bg);
        let k = resonance_sensitivity_kappa(&sp, b)?;
        kappa_table.push(KappaRow {
            bias_gauss: bg,
            clock_shift_hz: clock_shift(&sp, b)?,
            kappa_hz_per_mg: k / TAU * gauss_to_tesla(1e-3),
            field_noise_detuning_hz: k * field.field_noise / TAU,
        });
    }

    let max_d = max_detuning_fluctuation(p.interrogation_time_s, p.atom_number)?;
    let projection = Projection {
        interrogation_time_s: p.interrogation_time_s,
        atom_number: p.atom_number,
        sigma_p: projection_noise(p.atom_number, 0.5)?,
        max_detuning_rad_s: max_d,
        max_detuning_hz: max_d / TAU,
        relative_stability: max_d / TAU / sp.hyperfine_splitting,
    };

    let sweep = (1..=nz.sweep_points)
        .map(|k| {
            let e = nz.sweep_max_epsilon * k as f64 / nz.sweep_points as f64;
            let (f, g) = (power_coefficient(e), detuning_coefficient(e));
            let (fs, gs) = (power_coefficient_small_eps(e), detuning_coefficient_small_eps(e));
            [e, f, g, fs, gs, f * dp * dp + g * d * d, fs * dp * dp + gs * d * d]
        })
        .collect();

    Ok((
        NoiseReport {
            rabi_frequency: omega,
            relative_power_noise: dp,
            pulse_detuning_noise_hz: pulse_noise / TAU,
            evolution_detuning_noise_hz: evo_noise / TAU,
            optimum,
            resonant,
            beamsplitter,
            kappa_table,
            projection,
        },
        sweep,
    ))
}

pub fn run(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let (report, sweep) = compute(cfg)?;
    if cfg.run.wants("csv") && !sweep.is_empty() {
        let rows: Vec<Vec<String>> = sweep.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect();
        out.csv(
            "sweep.csv",
            &["epsilon", "f", "g", "f_small", "g_small", "variance", "variance_small"],
            &rows,
        )?;
    }
    if cfg.run.wants("svg") && !sweep.is_empty() {
        let plot = Plot {
            title: "Ramsey output noise against detuning ratio",
            xlabel: "epsilon",
            ylabel: "sigma P_z",
            points: sweep.iter().map(|r| (r[0], r[5].sqrt())).collect(),
        };
        out.text("sweep.svg", &plot.svg())?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &report)?;
    }
    Ok(())
}

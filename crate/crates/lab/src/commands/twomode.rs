use serde::Serialize;

use ramsey_core::atomphys::{is_miscible, miscibility_parameter};
use ramsey_core::twomode::{
    differential_loss_visibility, phase_diffusion, scattering_factor, spin_echo_phase_diffusion,
    tf_phase_diffusion_rate, total_number_phase_diffusion, TwoModeSystem,
};

use super::{check, species, trap};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{num, Output, Plot};

#[derive(Debug, Serialize)]
pub struct TwoModeReport {
    pub atom_number: f64,
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub scattering_factor: f64,
    /// Closed-form Thomas-Fermi rate, rad/s.
    pub diffusion_rate: f64,
    /// (g₁₁ − 2g₁₂ + g₂₂)√N/2 from the couplings, rad/s.
    pub diffusion_rate_couplings: f64,
    pub miscibility: f64,
    pub miscible: bool,
    pub times: Vec<TimeRow>,
    pub loss: Vec<LossRow>,
}

#[derive(Debug, Serialize)]
pub struct TimeRow {
    pub t_s: f64,
    pub phase_diffusion: f64,
    pub total_number_spread: f64,
    pub echo_imbalance: f64,
    pub echo_total_number: f64,
}

#[derive(Debug, Serialize)]
pub struct LossRow {
    pub k1: f64,
    pub k2: f64,
    pub visibility: f64,
}

pub fn compute(cfg: &RunConfig) -> Result<TwoModeReport, LabError> {
    let b = &cfg.twomode;
    let sp = species(cfg)?;
    let tr = trap("twomode", b.trap_hz)?;
    for &t in &b.times_s {
        check("twomode", t.is_finite() && t >= 0.0, || format!("times_s entry {t} must be >= 0"))?;
    }
    check("twomode", b.total_number_noise >= 0.0, || "total_number_noise must be >= 0".into())?;
    let mut sys = TwoModeSystem::thomas_fermi(&sp, &tr, b.atom_number).map_err(|e| LabError::invalid("twomode", e))?;
    sys.total_number_noise = b.total_number_noise;
    sys.validate().map_err(|e| LabError::invalid("twomode", e))?;
    let mut loss = Vec::new();
    for &[k1, k2] in &b.loss_pairs {
        let v = differential_loss_visibility(k1, k2).map_err(|e| LabError::invalid("twomode", e))?;
        loss.push(LossRow { k1, k2, visibility: v });
    }
    let (a11, a12, a22) = sp.scattering_bohr();
    let mis = miscibility_parameter(a11, a12, a22).map_err(|e| LabError::invalid("species", e))?;
    let mut times = Vec::new();
    for &t in &b.times_s {
        let echo = spin_echo_phase_diffusion(&sys, t)?;
        times.push(TimeRow {
            t_s: t,
            phase_diffusion: phase_diffusion(&sys, t)?,
            total_number_spread: total_number_phase_diffusion(&sys, t, b.total_number_noise)?,
            echo_imbalance: echo.imbalance,
            echo_total_number: echo.total_number,
        });
    }
    let c = sys.couplings;
    Ok(TwoModeReport {
        atom_number: b.atom_number,
        g11: c.g11,
        g12: c.g12,
        g22: c.g22,
        scattering_factor: scattering_factor(&sp),
        diffusion_rate: tf_phase_diffusion_rate(&sp, &tr, b.atom_number)?,
        diffusion_rate_couplings: c.nonlinearity() * b.atom_number.sqrt() / 2.0,
        miscibility: mis,
        miscible: is_miscible(mis),
        times,
        loss,
    })
}

pub fn run(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let r = compute(cfg)?;
    if cfg.run.wants("csv") {
        let rows: Vec<Vec<String>> = r
            .times
            .iter()
            .map(|t| {
                vec![
                    num(t.t_s),
                    num(t.phase_diffusion),
                    num(t.total_number_spread),
                    num(t.echo_imbalance),
                    num(t.echo_total_number),
                ]
            })
            .collect();
        out.csv(
            "phase_diffusion.csv",
            &["t_s", "phase_diffusion", "total_number_spread", "echo_imbalance", "echo_total_number"],
            &rows,
        )?;
    }
    if cfg.run.wants("svg") {
        let plot = Plot {
            title: "Phase diffusion",
            xlabel: "T (s)",
            ylabel: "phase spread (rad)",
            points: r.times.iter().map(|t| (t.t_s, t.phase_diffusion.abs())).collect(),
        };
        out.text("phase_diffusion.svg", &plot.svg())?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &r)?;
    }
    Ok(())
}

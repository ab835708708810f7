use serde::Serialize;

use ramsey_core::atomphys::tf_couplings;
use ramsey_core::squeezing::{oat_moments, phase_sensitivity, sql, twisting_rate, OatConfig};

use super::{check, linspace, species, trap};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{num, Output, Plot};

#[derive(Debug, Serialize)]
pub struct SqueezeReport {
    pub atom_number: f64,
    pub chi: f64,
    /// Thomas-Fermi twisting rate for the configured trap, before the multiplier.
    pub chi_mean_field: f64,
    pub prep_time_s: f64,
    pub mu_twist: f64,
    pub n_mu: f64,
    pub sql_rad: f64,
    /// Minimum Δφ√N over all readout angles and where it occurs.
    pub min_normalized: f64,
    pub min_phase_rad: f64,
    pub min_delta_phi_rad: f64,
    pub mean_x: f64,
    pub var_y: f64,
    pub var_z: f64,
    pub cov_yz: f64,
}

pub struct SqueezeRun {
    pub report: SqueezeReport,
    pub phases: Vec<f64>,
    pub normalized: Vec<f64>,
}

pub fn compute(cfg: &RunConfig) -> Result<SqueezeRun, LabError> {
    let b = &cfg.squeezing;
    check("squeezing", b.phase_points >= 1, || "phase_points must be >= 1".into())?;
    check("squeezing", b.phase_min_rad.is_finite() && b.phase_max_rad.is_finite(), || {
        "phase range must be finite".into()
    })?;
    let sp = species(cfg)?;
    let tr = trap("squeezing", b.trap_hz)?;
    let c = tf_couplings(&sp, &tr, b.atom_number).map_err(|e| LabError::invalid("squeezing", e))?;
    let chi_mf = twisting_rate(&c);
    let phases = linspace(b.phase_min_rad, b.phase_max_rad, b.phase_points);
    let oat = OatConfig {
        n: b.atom_number,
        chi: b.chi.unwrap_or(chi_mf) * b.chi_multiplier,
        prep_time: b.prep_time_s,
        phases: phases.clone(),
    };
    oat.validate().map_err(|e| LabError::invalid("squeezing", e))?;
    let curve = phase_sensitivity(&oat)?;
    let m = oat_moments(oat.n, oat.mu_twist())?;
    let sql_rad = sql(oat.n)?;
    Ok(SqueezeRun {
        report: SqueezeReport {
            atom_number: oat.n,
            chi: oat.chi,
            chi_mean_field: chi_mf,
            prep_time_s: oat.prep_time,
            mu_twist: oat.mu_twist(),
            n_mu: oat.n * oat.mu_twist(),
            sql_rad,
            min_normalized: curve.min_value,
            min_phase_rad: curve.min_phase,
            min_delta_phi_rad: curve.min_value * sql_rad,
            mean_x: m.mean_x,
            var_y: m.var_y,
            var_z: m.var_z,
            cov_yz: m.cov_yz,
        },
        phases,
        normalized: curve.normalized,
    })
}

pub fn run(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let r = compute(cfg)?;
    let sql_rad = r.report.sql_rad;
    if cfg.run.wants("csv") {
        let rows: Vec<Vec<String>> = r
            .phases
            .iter()
            .zip(&r.normalized)
            .map(|(&p, &v)| vec![num(p), num(v), num(v * sql_rad), num(sql_rad)])
            .collect();
        out.csv("sensitivity.csv", &["phase_rad", "normalized", "delta_phi_rad", "sql_rad"], &rows)?;
    }
    if cfg.run.wants("svg") {
        let plot = Plot {
            title: "Normalised phase sensitivity",
            xlabel: "readout phase (rad)",
            ylabel: "delta phi sqrt(N)",
            points: r.phases.iter().copied().zip(r.normalized.iter().copied()).collect(),
        };
        out.text("sensitivity.svg", &plot.svg())?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &r.report)?;
    }
    Ok(())
}

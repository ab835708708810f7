use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use ramsey_core::atomphys::{tf_chemical_potential, TrapConfig};
use ramsey_core::constants::{HBAR, TAU};
use ramsey_core::gpe::{GpeConfig, GpeSimulator, GridSpec, RamseyOptions, Snapshot, VisibilityPoint};

use super::{check, species};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{num, Output, Plot};

#[derive(Debug, Serialize)]
pub struct GroundReport {
    pub steps: usize,
    pub final_change: f64,
    /// Chemical potential in units of ħω̄ and its Thomas-Fermi estimate.
    pub chemical_potential: f64,
    pub chemical_potential_tf: f64,
    pub energy_total: f64,
    pub virial_residual: f64,
    /// Healing length over the coarser grid spacing.
    pub healing_resolution: f64,
}

#[derive(Debug, Serialize)]
pub struct GpeReport {
    pub ground: GroundReport,
    pub time_step_s: f64,
    pub spin_echo: bool,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub t_ms: f64,
    pub visibility_fit: f64,
    pub visibility_overlap: f64,
    pub enveloped: f64,
}

pub fn build(cfg: &RunConfig) -> Result<GpeConfig, LabError> {
    let g = &cfg.gpe;
    let trap = TrapConfig::cylindrical(TAU * g.omega_rho_hz, TAU * g.omega_z_hz)
        .map_err(|e| LabError::invalid("gpe", e))?;
    check("gpe", g.n_rho >= 8 && g.n_z >= 8, || format!("grid {}x{} is too small", g.n_rho, g.n_z))?;
    check("gpe", g.phase_samples >= 8, || "phase_samples must be >= 8".into())?;
    check("gpe", !g.times_ms.is_empty(), || "times_ms is empty".into())?;
    for &t in &g.times_ms {
        check("gpe", t.is_finite() && t >= 0.0, || format!("times_ms entry {t} must be >= 0"))?;
    }
    if let Some(tau) = g.decoherence_tau_s {
        check("gpe", tau > 0.0, || "decoherence_tau_s must be > 0".into())?;
    }
    let c = GpeConfig {
        species: species(cfg)?,
        trap,
        n: g.atom_number,
        grid: GridSpec { n_rho: g.n_rho, n_z: g.n_z, extent: g.extent },
        dt_real: g.dt_real_s,
        dt_imag: g.dt_imag_s,
        convergence_tol: g.convergence_tol,
        a12_scale: g.a12_scale,
        max_imag_steps: g.max_imag_steps,
    };
    c.validate().map_err(|e| LabError::invalid("gpe", e))?;
    Ok(c)
}

pub struct GpeRun {
    pub report: GpeReport,
    pub snapshots: Vec<Snapshot>,
    pub log: String,
}

pub fn compute(cfg: &RunConfig) -> Result<GpeRun, LabError> {
    let g = &cfg.gpe;
    let config = build(cfg)?;
    let mut log = String::new();
    let t0 = Instant::now();
    let sim = GpeSimulator::new(config)?;
    let ground = sim.ground_state()?;
    let _ = writeln!(log, "ground state: {} steps, {:.3} s", ground.steps, t0.elapsed().as_secs_f64());
    let mu_tf = tf_chemical_potential(&config.species, &config.trap, config.n)? / (HBAR * sim.units.omega);
    let ground_report = GroundReport {
        steps: ground.steps,
        final_change: ground.final_change,
        chemical_potential: ground.chemical_potential,
        chemical_potential_tf: mu_tf,
        energy_total: ground.energy.total(),
        virial_residual: ground.energy.virial_residual(),
        healing_resolution: sim.healing_resolution()?,
    };

    let times: Vec<f64> = g.times_ms.iter().map(|t| t * 1e-3).collect();
    let envelope = |t: f64| g.decoherence_tau_s.map_or(1.0, |tau| (-t / tau).exp());
    let t1 = Instant::now();
    let (points, snapshots): (Vec<VisibilityPoint>, Vec<Snapshot>) = if g.spin_echo || g.snapshots {
        // Independent runs; collected in the order of `times`.
        let runs = times
            .par_iter()
            .map(|&t| {
                let mut o = RamseyOptions::new(t, g.spin_echo);
                o.phase_samples = g.phase_samples;
                if g.snapshots {
                    o.snapshot_times = vec![t];
                }
                sim.ramsey(&ground.field, &o)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut pts = Vec::new();
        let mut snaps = Vec::new();
        for (r, &t) in runs.into_iter().zip(&times) {
            pts.push(VisibilityPoint {
                t,
                visibility_fit: r.visibility_fit,
                visibility_overlap: r.visibility_overlap,
                enveloped: r.visibility_fit * envelope(t),
            });
            snaps.extend(r.snapshots);
        }
        (pts, snaps)
    } else {
        let pts = sim.visibility_curve(&ground.field, &times, false, g.phase_samples, g.decoherence_tau_s)?;
        (pts, Vec::new())
    };
    let _ = writeln!(log, "interrogation: {} points, {:.3} s", points.len(), t1.elapsed().as_secs_f64());

    Ok(GpeRun {
        report: GpeReport {
            ground: ground_report,
            time_step_s: sim.dt(),
            spin_echo: g.spin_echo,
            points: points
                .iter()
                .map(|p| PointReport {
                    t_ms: p.t * 1e3,
                    visibility_fit: p.visibility_fit,
                    visibility_overlap: p.visibility_overlap,
                    enveloped: p.enveloped,
                })
                .collect(),
        },
        snapshots,
        log,
    })
}

pub fn run(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let r = compute(cfg)?;
    let pts = &r.report.points;
    if cfg.run.wants("csv") {
        let rows: Vec<Vec<String>> = pts
            .iter()
            .map(|p| vec![num(p.t_ms), num(p.visibility_fit), num(p.visibility_overlap), num(p.enveloped)])
            .collect();
        out.csv("visibility.csv", &["t_ms", "visibility_fit", "visibility_overlap", "enveloped"], &rows)?;
        for s in &r.snapshots {
            let nz = s.z.len();
            let mut rows = Vec::with_capacity(s.density1.len());
            for (k, ((n1, n2), ph)) in s.density1.iter().zip(&s.density2).zip(&s.relative_phase).enumerate() {
                rows.push(vec![num(s.rho[k / nz]), num(s.z[k % nz]), num(*n1), num(*n2), num(*ph)]);
            }
            out.csv(
                &format!("snapshot_{:.3}ms.csv", s.t * 1e3),
                &["rho_m", "z_m", "density1", "density2", "relative_phase"],
                &rows,
            )?;
        }
    }
    if cfg.run.wants("svg") {
        let plot = Plot {
            title: if cfg.gpe.spin_echo { "GP visibility with spin echo" } else { "GP visibility" },
            xlabel: "T (ms)",
            ylabel: "V",
            points: pts.iter().map(|p| (p.t_ms, p.enveloped)).collect(),
        };
        out.text("visibility.svg", &plot.svg())?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &r.report)?;
    }
    out.text("run.log", &r.log)?;
    Ok(())
}

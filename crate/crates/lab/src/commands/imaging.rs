use rayon::prelude::*;
use serde::Serialize;

use ramsey_core::analysis::stats::{mean, sample_std};
use ramsey_core::atomphys::AtomSpecies;
use ramsey_core::imaging::{
    cumulative_std, optimize_parameters, CameraConfig, CloudModel, ImagingAxis, ImagingConfig, ImagingSetup,
    RunOptions, SearchSpace,
};

use super::{check, species, trap};
use crate::config::{ImagingBlock, RunConfig};
use crate::error::LabError;
use crate::output::{num, pgm16, Output, Plot};

pub struct ImagingInputs {
    pub species: AtomSpecies,
    pub cloud: CloudModel,
    pub imaging: ImagingConfig,
    pub camera: CameraConfig,
}

pub fn build(cfg: &RunConfig) -> Result<ImagingInputs, LabError> {
    let b: &ImagingBlock = &cfg.imaging;
    let sp = species(cfg)?;
    let tr = trap("imaging", b.trap_hz)?;
    let axis = match b.axis.as_str() {
        "x" => ImagingAxis::X,
        "y" => ImagingAxis::Y,
        "z" => ImagingAxis::Z,
        other => return Err(LabError::Config(format!("[imaging] axis = {other:?} must be x, y or z"))),
    };
    let mut cloud = CloudModel::ballistic(&sp, &tr, b.atom_number, b.expansion_time_s, axis)
        .map_err(|e| LabError::invalid("imaging", e))?;
    cloud.state_fraction = b.state_fraction;
    cloud.validate().map_err(|e| LabError::invalid("imaging", e))?;
    let imaging = ImagingConfig {
        magnification: b.magnification,
        intensity_ratio: b.intensity_ratio,
        detuning: b.detuning_linewidths * sp.linewidth,
    };
    imaging.validate().map_err(|e| LabError::invalid("imaging", e))?;
    let camera = CameraConfig {
        quantum_efficiency: b.quantum_efficiency,
        pixel_area: (b.pixel_um * 1e-6).powi(2),
        exposure_time: b.exposure_us * 1e-6,
        full_well: b.full_well,
    };
    camera.validate().map_err(|e| LabError::invalid("imaging", e))?;
    Ok(ImagingInputs { species: sp, cloud, imaging, camera })
}

#[derive(Debug, Serialize)]
pub struct SimReport {
    pub imaged_number: f64,
    pub radius_x_m: f64,
    pub radius_y_m: f64,
    pub frame_width: usize,
    pub frame_height: usize,
    pub bright_counts: f64,
    pub saturation_counts: f64,
    pub min_shadow_counts: f64,
    /// Mean bright counts exceed the full well.
    pub over_full_well: bool,
    pub sigma_det_standard: f64,
    pub sigma_det_printed: f64,
    pub runs: usize,
    pub mean_measured: f64,
    pub std_measured: f64,
    /// √N of the imaged atoms.
    pub atom_noise_reference: f64,
    /// atom_noise_reference / sigma_det_standard
    pub atom_to_detection_ratio: f64,
    /// 10 log₁₀ of the ratio.
    pub headroom_db: f64,
}

pub struct SimRun {
    pub report: SimReport,
    pub samples: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub setup: ImagingSetup,
    pub opts: RunOptions,
}

pub fn compute_sim(cfg: &RunConfig) -> Result<SimRun, LabError> {
    let inp = build(cfg)?;
    let b = &cfg.imaging;
    check("imaging", b.runs >= 2, || "runs must be >= 2".into())?;
    let opts = RunOptions { photon_noise: b.photon_noise, atomic_noise: b.atomic_noise };
    let setup = ImagingSetup::new(&inp.species, &inp.cloud, &inp.imaging, &inp.camera)?;
    let det = setup.detection_noise()?;
    let seed = cfg.run.seed;
    let samples = (0..b.runs as u64)
        .into_par_iter()
        .map(|k| setup.measure(seed, k, opts))
        .collect::<Result<Vec<f64>, _>>()?;
    let cumulative = cumulative_std(&samples)?;
    let n = inp.cloud.imaged_number();
    let reference = n.sqrt();
    let ratio = reference / det.standard;
    let report = SimReport {
        imaged_number: n,
        radius_x_m: inp.cloud.radius_x,
        radius_y_m: inp.cloud.radius_y,
        frame_width: setup.width,
        frame_height: setup.height,
        bright_counts: setup.bright_mean,
        saturation_counts: setup.cal.e_sat,
        min_shadow_counts: setup.min_shadow(),
        over_full_well: setup.bright_mean > inp.camera.full_well,
        sigma_det_standard: det.standard,
        sigma_det_printed: det.printed,
        runs: samples.len(),
        mean_measured: mean(&samples),
        std_measured: sample_std(&samples),
        atom_noise_reference: reference,
        atom_to_detection_ratio: ratio,
        headroom_db: 10.0 * ratio.log10(),
    };
    Ok(SimRun { report, samples, cumulative, setup, opts })
}

pub fn run_sim(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let r = compute_sim(cfg)?;
    if cfg.run.wants("csv") {
        let rows: Vec<Vec<String>> = r
            .samples
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let c = if k == 0 { String::new() } else { num(r.cumulative[k - 1]) };
                vec![k.to_string(), num(n), c]
            })
            .collect();
        out.csv("runs.csv", &["run", "n_measured", "cumulative_std"], &rows)?;
    }
    if cfg.run.wants("svg") {
        let plot = Plot {
            title: "Cumulative standard deviation of extracted atom number",
            xlabel: "runs",
            ylabel: "std (atoms)",
            points: r.cumulative.iter().enumerate().map(|(k, &s)| ((k + 2) as f64, s)).collect(),
        };
        out.text("cumulative_std.svg", &plot.svg())?;
    }
    if cfg.run.wants("pgm") {
        let pair = r.setup.simulate(cfg.run.seed, 0, r.opts)?;
        out.bytes("bright.pgm", &pgm16(pair.width, pair.height, &pair.bright))?;
        out.bytes("shadow.pgm", &pgm16(pair.width, pair.height, &pair.shadow))?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &r.report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SurfacePoint {
    pub intensity_ratio: f64,
    pub magnification: f64,
    pub exposure_us: f64,
    pub detuning_linewidths: f64,
    pub bright_counts: f64,
    /// None above the full well.
    pub sigma_det: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub best: SurfacePoint,
    pub sigma_det: f64,
    pub atom_noise_reference: f64,
    pub atom_to_detection_ratio: f64,
    pub feasible_points: usize,
    pub surface: Vec<SurfacePoint>,
}

pub fn compute_optimize(cfg: &RunConfig) -> Result<OptimizeReport, LabError> {
    let inp = build(cfg)?;
    let o = &cfg.optimize;
    let g = inp.species.linewidth;
    let space = SearchSpace {
        intensity_ratios: o.intensity_ratios.clone(),
        magnifications: o.magnifications.clone(),
        exposure_times: o.exposure_us.iter().map(|t| t * 1e-6).collect(),
        detunings: o.detuning_linewidths.iter().map(|d| d * g).collect(),
        tie_tolerance: o.tie_tolerance,
    };
    check("optimize", !space.is_empty(), || "search space is empty".into())?;
    check("optimize", o.tie_tolerance >= 0.0, || "tie_tolerance must be >= 0".into())?;
    let res = optimize_parameters(&inp.species, &inp.cloud, &inp.camera, &space)?;
    let conv = |p: &ramsey_core::imaging::SearchPoint| SurfacePoint {
        intensity_ratio: p.imaging.intensity_ratio,
        magnification: p.imaging.magnification,
        exposure_us: p.exposure_time * 1e6,
        detuning_linewidths: p.imaging.detuning / g,
        bright_counts: p.bright_counts,
        sigma_det: p.sigma_det,
    };
    let reference = inp.cloud.imaged_number().sqrt();
    Ok(OptimizeReport {
        best: conv(&res.best),
        sigma_det: res.sigma_det,
        atom_noise_reference: reference,
        atom_to_detection_ratio: reference / res.sigma_det,
        feasible_points: res.surface.iter().filter(|p| p.sigma_det.is_some()).count(),
        surface: res.surface.iter().map(conv).collect(),
    })
}

pub fn run_optimize(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let r = compute_optimize(cfg)?;
    if cfg.run.wants("csv") {
        let rows: Vec<Vec<String>> = r
            .surface
            .iter()
            .map(|p| {
                vec![
                    num(p.intensity_ratio),
                    num(p.magnification),
                    num(p.exposure_us),
                    num(p.detuning_linewidths),
                    num(p.bright_counts),
                    p.sigma_det.map(num).unwrap_or_default(),
                ]
            })
            .collect();
        out.csv(
            "surface.csv",
            &["intensity_ratio", "magnification", "exposure_us", "detuning_linewidths", "bright_counts", "sigma_det"],
            &rows,
        )?;
    }
    if cfg.run.wants("svg") {
        // σ_det against magnification through the optimum.
        let b = &r.best;
        let mut pts: Vec<(f64, f64)> = r
            .surface
            .iter()
            .filter(|p| {
                p.intensity_ratio == b.intensity_ratio
                    && p.exposure_us == b.exposure_us
                    && p.detuning_linewidths == b.detuning_linewidths
            })
            .filter_map(|p| p.sigma_det.map(|s| (p.magnification, s)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let plot = Plot { title: "Detection noise through the optimum", xlabel: "magnification", ylabel: "sigma_det (atoms)", points: pts };
        out.text("sigma_vs_magnification.svg", &plot.svg())?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &r)?;
    }
    Ok(())
}

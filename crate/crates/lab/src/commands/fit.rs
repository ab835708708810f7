use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ramsey_core::analysis::{
    drift_model, fit_drift_envelope, fit_exponential_decay, fit_sinusoid_fixed_freq, residual_bootstrap,
    sinusoid_model, DriftFitOptions, ExpModel, FitResult, FringeDataset,
};

use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{num, Output, Plot};

/// Synthetic drift-envelope fringe shipped with the crate.
pub const BUNDLED_DRIFT: &str = include_str!("../../data/drift_synthetic.csv");
/// Parameters the bundled dataset was generated with.
pub const BUNDLED_DRIFT_TRUTH: &str = include_str!("../../data/drift_synthetic.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Drift,
    Sinusoid,
    Decay(ExpModel),
}

impl Model {
    pub fn parse(s: &str) -> Result<Self, LabError> {
        match s {
            "drift" => Ok(Model::Drift),
            "sinusoid" => Ok(Model::Sinusoid),
            "decay" => Ok(Model::Decay(ExpModel::Unit)),
            "decay-amplitude" => Ok(Model::Decay(ExpModel::FreeAmplitude)),
            other => Err(LabError::Config(format!(
                "[fit] model = {other:?} must be drift, sinusoid, decay or decay-amplitude"
            ))),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Param {
    pub name: &'static str,
    pub value: f64,
    pub error: f64,
    /// 15.9th and 84.1st bootstrap percentiles, when requested.
    pub bootstrap: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub model: String,
    pub source: String,
    pub points: usize,
    pub parameters: Vec<Param>,
    pub residual_norm: f64,
    pub dof: usize,
    pub iterations: usize,
}

/// Parse x,y[,sigma] CSV with a header row.
pub fn parse_dataset(text: &str, origin: &str) -> Result<FringeDataset, LabError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Config(format!("[fit] {origin}: {e}")))?;
        let field = |j: usize| -> Result<Option<f64>, LabError> {
            rec.get(j)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| LabError::Config(format!("[fit] {origin}: row {} column {}: {v:?}", i + 2, j + 1)))
                })
                .transpose()
        };
        let (Some(a), Some(b)) = (field(0)?, field(1)?) else {
            return Err(LabError::Config(format!("[fit] {origin}: row {} needs two columns", i + 2)));
        };
        x.push(a);
        y.push(b);
        if let Some(c) = field(2)? {
            s.push(c);
        }
    }
    let mut d = FringeDataset::new(x, y).map_err(|e| LabError::invalid("fit", e))?;
    if !s.is_empty() {
        d = d.with_sigma(s).map_err(|e| LabError::invalid("fit", e))?;
    }
    d.validate().map_err(|e| LabError::invalid("fit", e))?;
    Ok(d)
}

fn fit_model(model: Model, d: &FringeDataset) -> ramsey_core::Result<FitResult> {
    match model {
        Model::Drift => fit_drift_envelope(d, &DriftFitOptions::default()),
        Model::Sinusoid => fit_sinusoid_fixed_freq(d),
        Model::Decay(m) => fit_exponential_decay(d, m),
    }
}

pub fn evaluate(model: Model, fit: &FitResult, x: f64) -> f64 {
    let v = |n: &str| fit.value(n).unwrap_or(f64::NAN);
    match model {
        Model::Drift => drift_model(v("nu"), v("tau"), v("v0"), x),
        Model::Sinusoid => sinusoid_model(fit, x),
        Model::Decay(ExpModel::Unit) => (-x / v("tau")).exp(),
        Model::Decay(ExpModel::FreeAmplitude) => v("amplitude") * (-x / v("tau")).exp(),
    }
}

pub struct FitRun {
    pub report: FitReport,
    pub data: FringeDataset,
    pub fitted: Vec<f64>,
}

pub fn compute(cfg: &RunConfig) -> Result<FitRun, LabError> {
    let b = &cfg.fit;
    let model = Model::parse(&b.model)?;
    let (data, source) = match &b.data {
        Some(p) => {
            let path = Path::new(p);
            let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            (parse_dataset(&text, p)?, p.clone())
        }
        None => (parse_dataset(BUNDLED_DRIFT, "bundled")?, "bundled:drift_synthetic.csv".to_string()),
    };
    let fit = fit_model(model, &data)?;
    let fitted: Vec<f64> = data.x.iter().map(|&x| evaluate(model, &fit, x)).collect();
    let intervals = if b.bootstrap > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
        let base = data.clone();
        let iv = residual_bootstrap(&fitted, &data.y, b.bootstrap, &mut rng, |y| {
            let d = FringeDataset { y: y.to_vec(), ..base.clone() };
            fit_model(model, &d).ok().map(|f| f.values)
        })?;
        Some(iv)
    } else {
        None
    };
    let parameters = fit
        .names
        .iter()
        .enumerate()
        .map(|(i, &name)| Param {
            name,
            value: fit.values[i],
            error: fit.errors[i],
            bootstrap: intervals.as_ref().and_then(|iv| iv.get(i).copied()),
        })
        .collect();
    Ok(FitRun {
        report: FitReport {
            model: b.model.clone(),
            source,
            points: data.len(),
            parameters,
            residual_norm: fit.residual_norm,
            dof: fit.dof,
            iterations: fit.iterations,
        },
        data,
        fitted,
    })
}

pub fn run(cfg: &RunConfig, out: &mut Output) -> Result<(), LabError> {
    let r = compute(cfg)?;
    if cfg.run.wants("csv") {
        let rows: Vec<Vec<String>> = r
            .data
            .x
            .iter()
            .zip(&r.data.y)
            .zip(&r.fitted)
            .map(|((&x, &y), &f)| vec![num(x), num(y), num(f), num(y - f)])
            .collect();
        out.csv("fit.csv", &["x", "y", "fit", "residual"], &rows)?;
    }
    if cfg.run.wants("svg") {
        let plot = Plot {
            title: "Fitted model",
            xlabel: "x",
            ylabel: "model",
            points: r.data.x.iter().copied().zip(r.fitted.iter().copied()).collect(),
        };
        out.text("fit.svg", &plot.svg())?;
    }
    if cfg.run.wants("json") {
        out.report(cfg, &r.report)?;
    }
    Ok(())
}

//! Argument parsing and config resolution.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Command};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{resolve_out_dir, Output};

const SECTIONS: [&str; 10] =
    ["run", "species", "pulse", "noise", "gpe", "imaging", "optimize", "squeezing", "twomode", "fit"];

#[derive(Debug, Parser)]
#[command(name = "ramsey-lab", version, about = "Trapped-BEC Ramsey interferometer models")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, global = true, conflicts_with = "paper_defaults")]
    pub config: Option<PathBuf>,
    /// Start from the built-in parameters of the experiment instead of a file.
    #[arg(long, global = true)]
    pub paper_defaults: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output root; each subcommand writes into <out>/<subcommand>/.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override any key, `section.key=value`. `--section.key value` is
    /// accepted as shorthand.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Comma-separated output formats (csv, json, svg, pgm).
    #[arg(long, global = true, value_delimiter = ',')]
    pub formats: Option<Vec<String>>,
    /// Atom number for the subcommand's block.
    #[arg(long = "N", global = true)]
    pub atom_number: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Pulse noise budget: f/g decomposition, optimal detuning, resonant budget, κ(B).
    NoiseBudget,
    /// Ramsey visibility from coupled Gross-Pitaevskii simulations.
    GpeVisibility {
        #[arg(long = "a12-scale")]
        a12_scale: Option<f64>,
        /// Interrogation times in ms, comma separated.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long)]
        echo: bool,
    },
    /// Photon shot-noise Monte Carlo of absorption images.
    ImagingSim {
        #[arg(long, value_parser = ["on", "off"])]
        noise: Option<String>,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Grid search for the imaging parameters that minimise detection noise.
    ImagingOptimize,
    /// Phase sensitivity of a one-axis-twisted input state.
    SqueezeSensitivity {
        /// Twisting rate, rad/s.
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<f64>,
    },
    /// Two-mode phase diffusion, spin echo and differential loss.
    TwoMode {
        /// Interrogation times in s, comma separated.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Fit drift, sinusoid or decay models to a CSV dataset.
    Fit {
        #[arg(long)]
        model: Option<String>,
        /// CSV with x,y[,sigma]; the bundled drift dataset when omitted.
        #[arg(long)]
        data: Option<String>,
    },
}

impl Sub {
    pub fn command(&self) -> Command {
        match self {
            Sub::NoiseBudget => Command::NoiseBudget,
            Sub::GpeVisibility { .. } => Command::GpeVisibility,
            Sub::ImagingSim { .. } => Command::ImagingSim,
            Sub::ImagingOptimize => Command::ImagingOptimize,
            Sub::SqueezeSensitivity { .. } => Command::SqueezeSensitivity,
            Sub::TwoMode { .. } => Command::TwoMode,
            Sub::Fit { .. } => Command::Fit,
        }
    }
}

/// Rewrite `--section.key value` and `--section.key=value` into `--set`.
pub fn expand_dotted(args: Vec<OsString>) -> Vec<OsString> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(s) = a.to_str().and_then(|s| s.strip_prefix("--")) else {
            out.push(a);
            continue;
        };
        let (key, inline) = match s.split_once('=') {
            Some((k, v)) => (k, Some(v.to_string())),
            None => (s, None),
        };
        let dotted = key.split_once('.').is_some_and(|(sec, field)| SECTIONS.contains(&sec) && !field.is_empty());
        if !dotted {
            out.push(a);
            continue;
        }
        let key = key.to_string();
        let value = match inline {
            Some(v) => v,
            // A missing value is left for `RunConfig::set` to report.
            None => it.next().and_then(|v| v.into_string().ok()).unwrap_or_default(),
        };
        out.push("--set".into());
        out.push(format!("{key}={value}").into());
    }
    out
}

/// Build the fully resolved configuration for this invocation.
pub fn resolve(cli: &Cli) -> Result<RunConfig, LabError> {
    let c = &cli.common;
    let mut cfg = match (&c.config, c.paper_defaults) {
        (Some(p), _) => RunConfig::load(p)?,
        (None, _) => RunConfig::default(),
    };
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| LabError::Config(format!("--set {kv:?} must be section.key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = c.seed {
        cfg.run.seed = seed;
    }
    if let Some(f) = &c.formats {
        cfg.run.formats = f.clone();
    }
    if let Some(n) = c.atom_number {
        match cli.command.command() {
            Command::NoiseBudget => cfg.pulse.atom_number = n,
            Command::GpeVisibility => cfg.gpe.atom_number = n,
            Command::ImagingSim | Command::ImagingOptimize => cfg.imaging.atom_number = n,
            Command::SqueezeSensitivity => cfg.squeezing.atom_number = n,
            Command::TwoMode => cfg.twomode.atom_number = n,
            Command::Fit => return Err(LabError::Config("--N has no meaning for fit".into())),
        }
    }
    match &cli.command {
        Sub::GpeVisibility { a12_scale, times, echo } => {
            if let Some(s) = a12_scale {
                cfg.gpe.a12_scale = *s;
            }
            if let Some(t) = times {
                cfg.gpe.times_ms = t.clone();
            }
            if *echo {
                cfg.gpe.spin_echo = true;
            }
        }
        Sub::ImagingSim { noise, runs } => {
            if let Some(n) = noise {
                cfg.imaging.photon_noise = n == "on";
            }
            if let Some(r) = runs {
                cfg.imaging.runs = *r;
            }
        }
        Sub::SqueezeSensitivity { chi: Some(chi) } => cfg.squeezing.chi = Some(*chi),
        Sub::TwoMode { times: Some(t) } => cfg.twomode.times_s = t.clone(),
        Sub::Fit { model, data } => {
            if let Some(m) = model {
                cfg.fit.model = m.clone();
            }
            if let Some(d) = data {
                cfg.fit.data = Some(d.clone());
            }
        }
        _ => {}
    }
    Ok(cfg)
}

/// Parse, resolve and run. `clap` errors are returned as-is so the caller can
/// print help/version with clap's own formatting.
pub fn run_from<I, T>(args: I) -> Result<Result<Output, LabError>, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = expand_dotted(args.into_iter().map(Into::into).collect());
    let cli = Cli::try_parse_from(args)?;
    Ok(execute(&cli))
}

pub fn execute(cli: &Cli) -> Result<Output, LabError> {
    let cfg = resolve(cli)?;
    let root = resolve_out_dir(cli.common.out.as_deref(), &cfg);
    commands::run(cli.command.command(), &cfg, &root)
}

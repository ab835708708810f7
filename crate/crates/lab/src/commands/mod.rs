//! Subcommand implementations. Each one validates its blocks into core
//! types first (config errors), then computes (numerical errors), then
//! writes its files.

use std::path::Path;

use ramsey_core::atomphys::{AtomSpecies, TrapConfig};
use ramsey_core::constants::TAU;

use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::Output;

pub mod fit;
pub mod gpe;
pub mod imaging;
pub mod noise;
pub mod squeeze;
pub mod twomode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    NoiseBudget,
    GpeVisibility,
    ImagingSim,
    ImagingOptimize,
    SqueezeSensitivity,
    TwoMode,
    Fit,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::NoiseBudget,
        Command::GpeVisibility,
        Command::ImagingSim,
        Command::ImagingOptimize,
        Command::SqueezeSensitivity,
        Command::TwoMode,
        Command::Fit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::NoiseBudget => "noise-budget",
            Command::GpeVisibility => "gpe-visibility",
            Command::ImagingSim => "imaging-sim",
            Command::ImagingOptimize => "imaging-optimize",
            Command::SqueezeSensitivity => "squeeze-sensitivity",
            Command::TwoMode => "two-mode",
            Command::Fit => "fit",
        }
    }
}

/// Run `cmd` and write its outputs under `<root>/<cmd>/`. Returns the
/// output handle so callers can list what was written.
pub fn run(cmd: Command, cfg: &RunConfig, root: &Path) -> Result<Output, LabError> {
    let mut out = Output::create(root, cmd.name())?;
    match cmd {
        Command::NoiseBudget => noise::run(cfg, &mut out)?,
        Command::GpeVisibility => gpe::run(cfg, &mut out)?,
        Command::ImagingSim => imaging::run_sim(cfg, &mut out)?,
        Command::ImagingOptimize => imaging::run_optimize(cfg, &mut out)?,
        Command::SqueezeSensitivity => squeeze::run(cfg, &mut out)?,
        Command::TwoMode => twomode::run(cfg, &mut out)?,
        Command::Fit => fit::run(cfg, &mut out)?,
    }
    out.config(cfg)?;
    Ok(out)
}

pub(crate) fn species(cfg: &RunConfig) -> Result<AtomSpecies, LabError> {
    let s = &cfg.species;
    let sp = AtomSpecies::rb87().with_scattering_bohr(s.a11_bohr, s.a12_bohr, s.a22_bohr);
    sp.validate().map_err(|e| LabError::invalid("species", e))?;
    Ok(sp)
}

pub(crate) fn trap(block: &str, hz: [f64; 3]) -> Result<TrapConfig, LabError> {
    TrapConfig::cartesian(TAU * hz[0], TAU * hz[1], TAU * hz[2]).map_err(|e| LabError::invalid(block, e))
}

pub(crate) fn check(block: &str, ok: bool, msg: impl FnOnce() -> String) -> Result<(), LabError> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Config(format!("[{block}] {}", msg())))
    }
}

/// Evenly spaced points from `a` to `b` inclusive.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

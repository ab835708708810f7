//! Command-line driver for `ramsey-core`: run configuration, subcommands
//! and output files.
//!
//! Every subcommand resolves a [`config::RunConfig`], validates the blocks
//! it uses, computes, and writes into `<out>/<subcommand>/`:
//! CSV tables, a `report.json` that embeds the resolved configuration, a
//! `config.toml` copy of that configuration, optional SVG plots and PGM
//! frames. Outputs are byte-identical for identical config and seed;
//! wall-clock timings go to `run.log` only.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::Command;
pub use config::RunConfig;
pub use error::LabError;

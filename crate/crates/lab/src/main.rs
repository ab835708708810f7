use std::process::ExitCode;

use anyhow::Context;
use ramsey_lab::{cli, LabError};

fn main() -> ExitCode {
    let parsed = match cli::run_from(std::env::args_os()) {
        Ok(r) => r,
        // clap prints help/version to stdout and usage errors to stderr;
        // usage errors exit with 2 like any other config problem.
        Err(e) => e.exit(),
    };
    match parsed.context("ramsey-lab failed") {
        Ok(out) => {
            for p in out.written() {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<LabError>().map_or(1, LabError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}

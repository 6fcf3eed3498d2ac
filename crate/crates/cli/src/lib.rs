//! Command-line driver for the entbound sweeps and the verification suite.

pub mod args;
pub mod commands;
pub mod config;
pub mod grid;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

use args::{Cli, Command};

/// Bad flags or values; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(e: impl fmt::Display) -> anyhow::Error {
    anyhow::Error::new(UsageError(format!("{e:#}")))
}

/// 2 for usage errors and rejected inputs, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<entbound::Error>() {
        Some(entbound::Error::InvalidArgument(_)) | Some(entbound::Error::DimensionMismatch(_)) => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<i32> {
    let threads = match &cli.command {
        Command::Lattice(a) => a.common.threads,
        Command::Spin1Quench(a) => a.common.threads,
        Command::Spin1Ground(a) => a.common.threads,
        Command::Verify(a) => a.common.threads,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("--threads must be positive"));
        }
        // Already initialised when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Lattice(a) => commands::lattice(a),
        Command::Spin1Quench(a) => commands::spin1_quench(a),
        Command::Spin1Ground(a) => commands::spin1_ground(a),
        Command::Verify(a) => verify::verify(a),
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match config::expand_args(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

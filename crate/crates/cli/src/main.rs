mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes. Clap reports usage errors with 2 as well.
pub mod code {
    pub const OTHER: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const SIZE_LIMIT: u8 = 3;
    pub const PARSE: u8 = 4;
    pub const VIOLATION: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    /// Errors while building a space from user parameters are configuration errors.
    pub fn config(e: regtsp::Error) -> Self {
        match e {
            regtsp::Error::Io(_) | regtsp::Error::Parse(_) => e.into(),
            other => Self::new(code::CONFIG, other.to_string()),
        }
    }

    /// Errors while loading a point file are parse errors unless they are I/O.
    pub fn input(e: regtsp::Error) -> Self {
        match e {
            regtsp::Error::Io(_) => e.into(),
            other => Self::new(code::PARSE, other.to_string()),
        }
    }
}

impl From<regtsp::Error> for CliError {
    fn from(e: regtsp::Error) -> Self {
        use regtsp::Error as E;
        let code = match &e {
            E::InvalidSpace(_)
            | E::UnequalRatios { .. }
            | E::InvalidArgument(_)
            | E::Config(_) => code::CONFIG,
            E::SizeLimit { .. } | E::TooFewPoints { .. } => code::SIZE_LIMIT,
            E::Parse(_) | E::OutOfBounds { .. } | E::DimensionMismatch { .. } => code::PARSE,
            _ => code::OTHER,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(code::OTHER, format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(&cli, a),
        Command::Solve(a) => commands::solve(&cli, a),
        Command::Verify(a) => commands::verify(&cli, a),
        Command::Scaling(a) => commands::scaling(&cli, a),
        Command::Adversarial(a) => commands::adversarial(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

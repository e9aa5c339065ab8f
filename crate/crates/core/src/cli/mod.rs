//! Command line front end: `sample`, `evolve`, `ifc-check`, `kernel`,
//! `measures` and `stats`.
//!
//! Every run writes its outputs and a `manifest.json` into `--out`. Options
//! may also come from a TOML file given with `--config`, whose keys are the
//! long flag names; flags on the command line take precedence.

mod commands;
pub mod config;
pub mod io;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::RunConfig;
pub use io::{config_hash, fmt_f, OutputEntry, RunManifest, MANIFEST};

#[derive(Debug, Error)]
pub enum CliError {
    /// Help, version or a malformed command line, rendered by clap, with
    /// the exit code clap would use.
    #[error("{text}")]
    Usage { text: String, code: i32 },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("run failed: {0}")]
    Failed(String),
}

macro_rules! failed_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Failed(e.to_string())
            }
        }
    )*};
}

failed_from!(
    crate::dynamics::DynamicsError,
    crate::ensembles::EnsembleError,
    crate::kernels::KernelError,
    crate::measures::MeasuresError,
    crate::stats::StatsError,
    crate::ifc::IfcError
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Sample,
    Evolve,
    IfcCheck,
    Kernel,
    Measures,
    Stats,
}

impl std::fmt::Display for CommandKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Sample => "sample",
            Self::Evolve => "evolve",
            Self::IfcCheck => "ifc-check",
            Self::Kernel => "kernel",
            Self::Measures => "measures",
            Self::Stats => "stats",
        })
    }
}

#[derive(Parser, Debug)]
#[command(name = "logdyn", version, about = "Interacting Brownian motions with logarithmic interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw equilibrium configurations of a finite ensemble.
    Sample(RunConfig),
    /// Integrate a labeled SDE system from equilibrium starting points.
    Evolve(RunConfig),
    /// Re-solve heads of a recorded evolve run against frozen tails.
    IfcCheck(RunConfig),
    /// Tabulate a correlation kernel and optionally a Fredholm determinant.
    Kernel(RunConfig),
    /// Integration by parts check (`ibp`) or quasi-Gibbs diagnostic (`qg-ratio`).
    Measures(RunConfig),
    /// Estimators and verdicts on the output of a sample or evolve run.
    Stats(RunConfig),
}

impl Command {
    fn split(self) -> (CommandKind, RunConfig) {
        match self {
            Command::Sample(c) => (CommandKind::Sample, c),
            Command::Evolve(c) => (CommandKind::Evolve, c),
            Command::IfcCheck(c) => (CommandKind::IfcCheck, c),
            Command::Kernel(c) => (CommandKind::Kernel, c),
            Command::Measures(c) => (CommandKind::Measures, c),
            Command::Stats(c) => (CommandKind::Stats, c),
        }
    }
}

/// Parses a command line (program name first), merges the config file and
/// validates the result.
pub fn parse_args<I, T>(args: I) -> Result<(CommandKind, RunConfig), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage { text: e.render().to_string(), code: e.exit_code() })?;
    let (kind, flags) = cli.command.split();
    let config = match &flags.config {
        Some(path) => flags.over(&RunConfig::from_file(path)?)?,
        None => flags,
    };
    config.validate(kind)?;
    Ok((kind, config))
}

/// Executes `command` and writes the manifest. On failure the manifest is
/// still written, marked incomplete, listing the files produced so far.
pub fn run(command: CommandKind, config: &RunConfig) -> Result<PathBuf, CliError> {
    let started = Instant::now();
    let mut out = io::Outputs::create(&config.out_dir())?;
    let mut diagnostics = BTreeMap::new();
    let result = match command {
        CommandKind::Sample => commands::sample(config, &mut out, &mut diagnostics),
        CommandKind::Evolve => commands::evolve(config, &mut out, &mut diagnostics),
        CommandKind::IfcCheck => commands::ifc_check(config, &mut out, &mut diagnostics),
        CommandKind::Kernel => commands::kernel(config, &mut out, &mut diagnostics),
        CommandKind::Measures => commands::measures(config, &mut out, &mut diagnostics),
        CommandKind::Stats => commands::stats(config, &mut out, &mut diagnostics),
    };
    let manifest = RunManifest {
        tool: "logdyn".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        config: config.clone(),
        config_hash: config_hash(config),
        complete: result.is_ok(),
        error: result.as_ref().err().map(ToString::to_string),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        diagnostics,
        outputs: out.entries.clone(),
    };
    let path = out.manifest(&manifest)?;
    result.map(|()| path)
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (command, config) = match parse_args(args) {
        Ok(v) => v,
        Err(CliError::Usage { text, code }) => {
            if code == 0 {
                print!("{text}");
            } else {
                eprint!("{text}");
            }
            return code;
        }
        Err(e) => {
            eprintln!("logdyn: {e}");
            return 2;
        }
    };
    match run(command, &config) {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("logdyn {command}: {e}");
            1
        }
    }
}

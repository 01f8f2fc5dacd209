// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for the `nop-explorer-core` cost model.
//!
//! Exit codes: 0 on success, 1 for usage, configuration or model errors,
//! 2 when a file cannot be read or written.

pub mod config;
pub mod report;

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nop_explorer_core::{ModelError, StrategyChoice, SweepAxis, TrxProfile};
use thiserror::Error;

use report::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_io() => 2,
            CliError::Usage(_) | CliError::Model(_) => 1,
            CliError::Read { .. } | CliError::Write { .. } => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(format!("csv encoding failed: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nop-explorer",
    version,
    about = "Cost model for chiplet accelerators with wired and wireless package networks"
)]
pub struct Cli {
    /// JSON configuration file
    #[arg(long, global = true, env = "NOP_EXPLORER_CONFIG")]
    pub config: Option<PathBuf>,
    /// Workload file (.csv or .json)
    #[arg(long, global = true)]
    pub workload: Option<PathBuf>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Suppress summaries and warnings
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_choice(s: &str) -> Result<StrategyChoice, String> {
    s.parse()
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse()
}

fn parse_profile(s: &str) -> Result<TrxProfile, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-layer and end-to-end cost of a workload
    Run {
        /// kp-cp, np-cp, yp-xp or adaptive [default: adaptive]
        #[arg(long, value_parser = parse_choice)]
        strategy: Option<StrategyChoice>,
    },
    /// Evaluate a workload over distribution bandwidths or chiplet counts
    Sweep {
        /// bandwidth or chiplets
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[arg(long, value_delimiter = ',', value_parser = parse_choice, default_value = "kp-cp,np-cp,yp-xp")]
        strategies: Vec<StrategyChoice>,
    },
    /// Compare two distribution NoP presets layer by layer
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_parser = parse_choice, default_value = "kp-cp")]
        strategy: StrategyChoice,
    },
    /// Area and power budget of the configured system
    Resources {
        /// conservative or aggressive
        #[arg(long, value_parser = parse_profile, default_value = "conservative")]
        trx_profile: TrxProfile,
    },
    /// Print the class of every layer in a workload
    Classify,
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    match commands::execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

//! Command-line front end: scenario files, the analysis subcommands and
//! their JSON/CSV outputs.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 optimizer did
//! not converge (the best point found is still printed), 5 grid over the
//! entry budget (the complexity report is printed instead).

pub mod commands;
pub mod error;
pub mod files;
pub mod report;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{Output, Status};
pub use error::CliError;
pub use scenario::Scenario;

#[derive(Debug, Parser)]
#[command(
    name = "vmgame",
    version,
    about = "Verifiable multilateration and the localization security game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the optimizer seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify distance bounds or a claim with VM.
    Classify,
    /// Rasterize the plausible falsification region as CSV.
    Region,
    /// Malicious node's best pure response to the verifier triangle.
    Maxmin,
    /// Solve the grid game (or a matrix from file) as a linear program.
    Lp {
        /// Solve this payoff matrix (CSV, one row per adversary action).
        #[arg(long)]
        matrix_in: Option<PathBuf>,
        /// Also write the grid game's payoff matrix here.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Best claim parameters against uniformly rotated verifiers.
    Mixed,
    /// Action and matrix sizes for the scenario's grid.
    Complexity,
}

/// Runs one command and writes its output. Returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let path = cli
        .common
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Scenario("--scenario is required".into()))?;
    let mut scenario = Scenario::load(path)?;
    if let Some(seed) = cli.common.seed {
        scenario.optimizer.seed = seed;
    }
    let output = match &cli.command {
        Command::Classify => commands::classify_cmd(&scenario)?,
        Command::Region => commands::region_cmd(&scenario)?,
        Command::Maxmin => commands::maxmin_cmd(&scenario)?,
        Command::Lp {
            matrix_in,
            matrix_out,
        } => commands::lp_cmd(&scenario, matrix_in.as_deref(), matrix_out.as_deref())?,
        Command::Mixed => commands::mixed_cmd(&scenario)?,
        Command::Complexity => commands::complexity_cmd(&scenario)?,
    };
    match &cli.common.out {
        Some(out) => std::fs::write(out, &output.text).map_err(|source| CliError::Io {
            path: out.clone(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?
        }
    }
    Ok(output.status.exit_code())
}

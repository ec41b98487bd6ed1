//! Command-line front end for the exact-arithmetic orbit-data engine.
//!
//! Exit codes: 0 success, 1 certificate or validation failure, 2 input
//! error. All reports are deterministic: identical inputs give byte-equal
//! output.

mod commands;
mod format;
mod registry;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use commands::Outcome;

#[derive(Parser)]
#[command(
    name = "gysin",
    about = "Filtered Morse-Bott complexes, spectral sequences, and the contact/symplectic long exact sequence over exact rationals",
    version
)]
struct Cli {
    /// Emit machine-readable JSON reports.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    json: bool,
    /// Emit human-readable text reports (the default).
    #[arg(long, global = true, action = ArgAction::SetTrue, conflicts_with = "json")]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schema-check a complex file and validate the differential.
    Validate { path: PathBuf },
    /// Homology dimensions and representatives.
    Homology {
        path: PathBuf,
        /// Inclusive degree window, as `a:b`.
        #[arg(long)]
        window: Option<String>,
        /// Cross-check against the dense brute-force oracle.
        #[arg(long, action = ArgAction::SetTrue)]
        oracle: bool,
    },
    /// Spectral sequence pages E^0..E^3 of the filtered complex.
    Pages {
        path: PathBuf,
        /// Restrict the displayed slots to total degrees in `a:b`.
        #[arg(long)]
        window: Option<String>,
    },
    /// Extract the long exact sequence with its connecting map and
    /// exactness certificate.
    Gysin {
        path: Option<PathBuf>,
        /// Run a named built-in scenario instead of a file.
        #[arg(long)]
        scenario: Option<String>,
        /// Total-degree window for the spliced sequence, as `a:b`.
        #[arg(long)]
        window: Option<String>,
    },
    /// Run the whole scenario corpus; nonzero exit on any failure.
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let outcome = match &cli.command {
        Command::Validate { path } => commands::cmd_validate(path, json),
        Command::Homology { path, window, oracle } => {
            commands::cmd_homology(path, window.as_deref(), *oracle, json)
        }
        Command::Pages { path, window } => commands::cmd_pages(path, window.as_deref(), json),
        Command::Gysin { path, scenario, window } => {
            commands::cmd_gysin(path.as_deref(), scenario.as_deref(), window.as_deref(), json)
        }
        Command::VerifyAll => commands::cmd_verify_all(json),
    };
    match outcome {
        Ok(Outcome::Pass(rendered)) => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Fail(rendered)) => {
            print!("{rendered}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

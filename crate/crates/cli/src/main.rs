//! `sharpext`: series bounds, oracle checks and odd-curve probes from the
//! command line.
//!
//! Exit status is 0 on success, 2 when parameters are rejected and 3 when a
//! computation fails or misses its tolerance; errors go to stderr as JSON.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::OracleCheck;
use crate::error::{CliError, CliResult};
use crate::output::{emit, Format};

#[derive(Debug, Parser)]
#[command(name = "sharpext", version, about = "Sharp extension constants on power curves")]
struct Cli {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partial sum of the Legendre series bound.
    Bound {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "N", default_value_t = 15)]
        order: usize,
    },
    /// Exponent where the series bound meets the even threshold.
    Critical {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "N", default_value_t = 15)]
        order: usize,
        #[arg(long, default_value_t = 4.0)]
        lo: f64,
        #[arg(long, default_value_t = 5.5)]
        hi: f64,
    },
    /// Normalized profile of the 3-fold slice as CSV.
    Profile {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "N", default_value_t = 15)]
        order: usize,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Cross-checks of the convolution oracle.
    Oracle {
        #[arg(long)]
        p: f64,
        /// Run only these checks (repeatable); all of them by default.
        #[arg(long, value_enum)]
        check: Vec<OracleCheck>,
    },
    /// Odd-curve lower bound, or a scan over the weight exponent.
    Odd {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        scan: bool,
        /// Weight exponents for --scan, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a_values: Vec<f64>,
        #[arg(long, default_value_t = sharpext_core::oracle::DEFAULT_GRID_SIZE)]
        grid_size: usize,
    },
    /// Headline numbers with pass/fail flags.
    Report,
}

fn run(cli: Cli) -> CliResult<()> {
    let out = cli.output.as_deref();
    let json = cli.format.unwrap_or(Format::Json);
    match cli.command {
        Command::Bound { p, a, order } => {
            let text = commands::bound(p, a, order, json)?;
            emit(&text, out, "bound", json)?;
        }
        Command::Critical { a, order, lo, hi } => {
            let text = commands::critical(a, order, lo, hi, json)?;
            emit(&text, out, "critical", json)?;
        }
        Command::Profile { p, a, order, points } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let text = commands::profile_table(p, a, order, points, format)?;
            emit(&text, out, "profile", format)?;
        }
        Command::Oracle { p, check } => {
            let (text, pass) = commands::oracle(p, &check, json)?;
            emit(&text, out, "oracle", json)?;
            if !pass {
                return Err(commands::tolerance_failure("oracle"));
            }
        }
        Command::Odd { p, lambda, scan, a_values, grid_size } => {
            let format = cli.format.unwrap_or(if scan { Format::Csv } else { Format::Json });
            let text = commands::odd(p, lambda, scan, &a_values, grid_size, format)?;
            emit(&text, out, if scan { "odd_scan" } else { "odd" }, format)?;
        }
        Command::Report => {
            let (text, pass) = commands::report(json)?;
            emit(&text, out, "report", json)?;
            if !pass {
                return Err(commands::tolerance_failure("report"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Validation(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

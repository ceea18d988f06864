#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::{Cli, Command, Format};
use error::CliError;
use output::{envelope, Report};

const THREADS_VAR: &str = "FREEBETA_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn dispatch(command: &Command) -> Result<(&'static str, Value, Report), CliError> {
    fn params<T: serde::Serialize>(t: &T) -> Value {
        serde_json::to_value(t).expect("arguments serialize")
    }
    Ok(match command {
        Command::Moments(a) => ("moments", params(a), commands::moments(a)?),
        Command::Density(a) => ("density", params(a), commands::density(a)?),
        Command::Support(a) => ("support", params(a), commands::support(a)?),
        Command::EnumerateNcl(a) => ("enumerate-ncl", params(a), commands::enumerate(a)?),
        Command::NclStats(a) => ("ncl-stats", params(a), commands::ncl_stats(a)?),
        Command::GammaGf(a) => ("gamma-gf", params(a), commands::gamma_gf(a)?),
        Command::TCoeffs(a) => ("t-coeffs", params(a), commands::t_coeffs(a)?),
        Command::Meixner(a) => ("meixner", params(a), commands::meixner(a)?),
        Command::ScoreCheck(a) => ("score-check", params(a), commands::score_check(a)?),
        Command::McFisher(a) => ("mc-fisher", params(a), commands::mc_fisher(a)?),
        Command::Verify(a) => ("verify", params(a), commands::run_verify(a)?),
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (name, params, report) = dispatch(&cli.command)?;
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope(name, params, &report)).expect("json output");
            s.push('\n');
            s
        }
        Format::Csv => match &report.table {
            Some(t) => t.to_csv()?,
            None => return Err(CliError::Usage(format!("{name} has no tabular output; use --format json"))),
        },
    };
    std::io::stdout().lock().write_all(text.as_bytes())?;
    match report.failure {
        Some(msg) => Err(CliError::VerifyFailed(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

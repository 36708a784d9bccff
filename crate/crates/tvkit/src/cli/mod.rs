//! Command-line front end: parse function and measure specs, run the
//! computations and experiment suites, persist CSV/JSON reports.

mod parse;
mod report;
mod suites;

pub use parse::{parse_density, parse_grid, parse_multipoly, parse_polynomial, parse_trig};
pub use suites::experiment_suites;
pub use report::{round_sig, ExperimentReport, ReportRow};

use clap::Parser;

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "tvkit",
    version,
    about = "total variation distances between pushforward measures"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Tabulate a pushforward density over its value range.
    Pushforward(suites::PushforwardArgs),
    /// TV distance between two pushforwards (quadrature + optional MC).
    Tv(suites::TvArgs),
    /// Shift-modulus curve delta(u) with a fitted power law.
    Modulus(suites::ModulusArgs),
    /// Certified partition constant for a polynomial under a Gaussian.
    Certify(suites::CertifyArgs),
    /// Smoothing bound with certified constants and diagnostics.
    Bound(suites::BoundArgs),
    /// Named experiment suites producing report files.
    Experiment(suites::ExperimentArgs),
}

/// Run the CLI on an argv (excluding the program name is fine; clap
/// handles both). Returns the process exit code: 0 success, 2 input
/// error, 3 numeric failure.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            // clap handles --help/--version with success exits
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome: Result<()> = match args.command {
        Command::Pushforward(a) => suites::run_pushforward(a),
        Command::Tv(a) => suites::run_tv(a),
        Command::Modulus(a) => suites::run_modulus(a),
        Command::Certify(a) => suites::run_certify(a),
        Command::Bound(a) => suites::run_bound(a),
        Command::Experiment(a) => suites::run_experiment(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

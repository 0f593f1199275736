//! Command-line driver: computes summing norms, mixed norms and mixing
//! constants on instance files, runs the adapters, and executes the
//! verification suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mixnorm::cli::{run, Command, ReportFormat, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "mixnorm",
    about = "Summing norms, mixed (s;q)-norms and mixing constants on finite instances",
    after_help = "Exit codes: 0 ok, 1 property failure, 2 usage/parse, 3 schema, \
                  4 invariant, 5 solver failure."
)]
struct Args {
    /// summing-norm | mixed-norm | mixing-constant | verify-suite |
    /// adapt-linear | adapt-lipschitz
    #[arg(long)]
    command: String,

    /// Instance file (JSON, see the README for the format).
    #[arg(long)]
    instance: Option<PathBuf>,

    /// Summing exponent, also the test-side exponent of mixing bounds.
    #[arg(long)]
    p: Option<f64>,

    /// Inner mixed-norm exponent.
    #[arg(long)]
    q: Option<f64>,

    /// Outer mixed-norm exponent.
    #[arg(long)]
    s: Option<f64>,

    /// Third exponent of layered compositions.
    #[arg(long)]
    t: Option<f64>,

    /// Seed for every randomized search in the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Number of sampled families per lower bound.
    #[arg(long, default_value_t = 50)]
    samples: usize,

    /// Refinement rounds of the measure sweep.
    #[arg(long = "grid-depth", default_value_t = 10)]
    grid_depth: usize,

    /// Agreement tolerance for adapter route comparisons.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    /// Report format.
    #[arg(long, value_parser = ["text", "csv"], default_value = "text")]
    report: String,

    /// Write the report (and adapter instances) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match Command::parse(&args.command) {
        Ok(command) => command,
        Err(err) => {
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    let config = RunConfig {
        command,
        instance: args.instance,
        p: args.p,
        q: args.q,
        s: args.s,
        t: args.t,
        seed: args.seed,
        samples: args.samples,
        grid_depth: args.grid_depth,
        tol: args.tol,
        format: if args.report == "csv" { ReportFormat::Csv } else { ReportFormat::Text },
        out: args.out.clone(),
    };
    match run(&config) {
        Ok(outcome) => {
            match &args.out {
                // Adapter runs may have already written an instance to
                // --out; reports always go to stdout in that case.
                Some(path)
                    if !matches!(command, Command::AdaptLinear | Command::AdaptLipschitz) =>
                {
                    if let Err(err) = std::fs::write(path, &outcome.rendered) {
                        eprintln!("cannot write report: {err}");
                        return ExitCode::from(2);
                    }
                }
                _ => print!("{}", outcome.rendered),
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

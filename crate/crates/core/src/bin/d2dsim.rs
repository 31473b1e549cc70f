//! Batch front-end: `d2dsim CONFIG [--seed N] [--out DIR] [--quiet]`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use d2dsim::config::{parse_config, ConfigError};
use d2dsim::engine::{run_sinr_experiment, run_throughput_experiment, ExperimentKind};
use d2dsim::report::{emit_reports, summary_text, Report};

#[derive(Debug, Parser)]
#[command(name = "d2dsim", version, about = "D2D underlay system-level simulator")]
struct Args {
    /// Run configuration (`key = value` lines).
    config: PathBuf,
    /// Overrides the seed from the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out_dir` from the file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn fail(kind: &str, message: impl std::fmt::Display) -> ExitCode {
    let line = message.to_string().replace('\n', " ");
    eprintln!("error: {kind}: {line}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut run = match parse_config(&args.config) {
        Ok(r) => r,
        Err(ConfigError::Line { line, message }) => {
            return fail("config", format!("{}:{line}: {message}", args.config.display()))
        }
        Err(e) => return fail("config", e),
    };
    if let Some(seed) = args.seed {
        run.experiment.seed = seed;
    }
    if let Some(out) = args.out {
        run.out_dir = out;
    }

    let started = Instant::now();
    let result = match run.experiment.experiment {
        ExperimentKind::Sinr => run_sinr_experiment(&run.experiment).map(Report::Sinr),
        ExperimentKind::Throughput => {
            run_throughput_experiment(&run.experiment, run.experiment.k_d2d).map(Report::Throughput)
        }
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail("simulation", e),
    };
    if let Err(e) = emit_reports(&report, &run, &run.out_dir, started.elapsed()) {
        return fail("output", format!("{}: {e}", run.out_dir.display()));
    }
    if !args.quiet {
        print!("{}", summary_text(&report));
    }
    ExitCode::SUCCESS
}

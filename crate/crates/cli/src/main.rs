//! `vispar`: solve and verify degenerate/singular fully nonlinear
//! parabolic problems from a run configuration.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 solve abort, 3 config
//! error.

// `!(x > y)` rejects NaN where `x <= y` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vispar", version, about = "degenerate fully nonlinear parabolic solver lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// March the configured Dirichlet problem and write the run report.
    Solve(RunArgs),
    /// Run the ε-cascade configured under [equation] cascade.
    Cascade(RunArgs),
    /// Solve and assert the checks enabled in the config.
    Verify(RunArgs),
    /// Solve and measure regularity (exponent fits, dichotomy trace).
    Regularity(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output] dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to VISPAR_THREADS, then to one thread.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized verification probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, runner): (&RunArgs, fn(&config::RunConfig, u64) -> run::RunOutcome) =
        match &cli.command {
            Command::Solve(a) => (a, |cfg, _| run::run_solve(cfg)),
            Command::Cascade(a) => (a, |cfg, _| run::run_cascade(cfg)),
            Command::Verify(a) => (a, run::run_verify),
            Command::Regularity(a) => (a, |cfg, _| run::run_regularity(cfg)),
        };

    let threads = args
        .threads
        .or_else(|| std::env::var("VISPAR_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1);
    // A second build attempt (e.g. in tests) is fine to ignore.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(3);
        }
    };
    let cfg = match config::parse_config(&text) {
        Ok(mut cfg) => {
            if let Some(out) = &args.out {
                cfg.output.dir = out.display().to_string();
            }
            cfg
        }
        Err(errors) => {
            eprintln!("config error: {} violation(s):", errors.len());
            for e in errors {
                eprintln!("  - {e}");
            }
            return ExitCode::from(3);
        }
    };

    let started = std::time::Instant::now();
    let outcome = runner(&cfg, args.seed);
    let out_dir = PathBuf::from(&cfg.output.dir);
    match run::write_artifacts(&out_dir, &outcome.artifacts) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("i/o error while writing artifacts: {e}");
            return ExitCode::from(2);
        }
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    println!(
        "status: {:?} ({:.2}s)",
        outcome.status,
        started.elapsed().as_secs_f64()
    );
    ExitCode::from(outcome.status.exit_code() as u8)
}

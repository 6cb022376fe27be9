use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpa_bench::bench::{load_config, run_experiment, run_sweep, verify, SWEEP_HEADER};
use fpa_bench::Error;

#[derive(Parser)]
#[command(name = "fpa-bench", version, about = "Learning-to-bid experiments for repeated first-price auctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Run the property suites: projection, mirror, gradient, concavity, transforms, inequalities (default all).
    Verify { suite: Option<String> },
    /// Rerun a config once per value of one key, e.g. `--param T=1000,10000,100000`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        Error::Config(_) => 2,
        _ => 1,
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, seed, reps } => {
            let mut cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(reps) = reps {
                if reps == 0 {
                    eprintln!("error: --reps must be at least 1");
                    return ExitCode::from(2);
                }
                cfg.reps = reps;
            }
            let out = out.or_else(|| cfg.out.clone());
            match run_experiment(&cfg, out.as_deref()) {
                Ok(summary) => {
                    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
                    if summary.passed() {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("error: {} per-step inequality violation(s)", summary.violations);
                        ExitCode::FAILURE
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { suite } => match verify::verify(suite.as_deref()) {
            Ok(reports) => {
                for r in &reports {
                    println!("{r}");
                }
                if reports.iter().all(|r| r.passed) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => fail(&e),
        },
        Command::Sweep { config, param, out } => {
            let Some((key, values)) = param.split_once('=') else {
                eprintln!("error: --param takes KEY=v1,v2,...");
                return ExitCode::from(2);
            };
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(&e.into()),
            };
            let out = match out {
                Some(o) => Some(o),
                None => match load_config(&config) {
                    Ok(c) => c.out,
                    Err(e) => return fail(&e),
                },
            };
            match run_sweep(&text, config.parent(), key.trim(), &values, out.as_deref()) {
                Ok(rows) => {
                    println!("{SWEEP_HEADER}");
                    for r in &rows {
                        println!("{}", r.csv());
                    }
                    if rows.iter().all(|r| r.violations == 0) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => fail(&e),
            }
        }
    }
}

//! Config parsing, experiment orchestration and the verification suites
//! behind the `fpa-bench` command.

pub mod config;
mod experiment;
pub mod grammar;
pub mod verify;

pub use config::{load_config, parse_config, parse_config_in, Checks, Environment, ExperimentConfig};
pub use experiment::{run_experiment, run_sweep, Bounds, ReplicationSummary, Summary, SweepRow, SWEEP_HEADER};

//! Benchmarks, regret, Myerson revenue, potential functions and per-step
//! inequality checks.

mod benchmark;
mod concavity;
mod incentive;
mod myerson;
mod potentials;
mod report;

pub use benchmark::{best_fixed_utility, pseudo_regret, stochastic_regret, utility_table, BenchmarkReport};
pub use concavity::{empirical_strong_concavity, midpoint_excess, strong_concavity_modulus};
pub use incentive::ic_gap;
pub use myerson::{monopoly_reserve_index, myerson_revenue, optimal_multi_buyer_revenue};
pub use potentials::{
    check_regret_step, check_robustness_step, potential_euclidean, potential_threshold_revenue, Comparator,
    RobustnessCheck, RobustnessKind, SLACK_TOL,
};
pub use report::{robustness_report, to_key_values, RobustnessReport};

pub(crate) use benchmark::benchmark_columns;

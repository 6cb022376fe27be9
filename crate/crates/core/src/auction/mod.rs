//! Bid grids, value distributions, the probability/threshold transforms and the
//! concave expected-utility function.

mod distribution;
mod grid;
mod strategy;
mod utility;
mod vectors;

pub use distribution::{ValueDistribution, INVERSE_TOL};
pub use grid::BidGrid;
pub use strategy::{
    bid_for_value, probabilities_from_strategy, strategy_from_probabilities, StepStrategy,
};
pub use utility::{
    expected_revenue, expected_utility, single_shot_best_response, utility_against,
    utility_gradient,
};
pub use vectors::{
    BidProbabilityVector, CompetingBidDistribution, ThresholdVector, FEASIBILITY_TOL,
};

pub(crate) use strategy::{bid_index, probabilities_of, thresholds_of};
pub(crate) use utility::{gradient_unchecked, revenue_unchecked};

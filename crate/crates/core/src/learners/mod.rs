//! Online bidding algorithms behind one interface.
//!
//! Every learner exposes its round-t strategy as a [`StrategySnapshot`], bids for
//! a value, and advances one round per observed competing bid.

mod gradient_ascent;
mod lazy;
mod mean_based;
mod misreport;
mod spec;
mod threshold;

use std::sync::Arc;

use serde::Serialize;

use crate::auction::{
    bid_index, probabilities_of, revenue_unchecked, utility_against, BidGrid, BidProbabilityVector,
    StepStrategy, ThresholdVector, ValueDistribution,
};
use crate::error::{domain, Result};

pub use gradient_ascent::{new_alg1, GradientAscent};
pub use lazy::{new_lazy_ftrl, LazyFtrl};
pub use mean_based::{new_mean_based_ftl, MeanBasedFtl, DEFAULT_BUCKETS};
pub use misreport::{wrap_misreport, MisreportMap, Misreporting};
pub use spec::LearnerSpec;
pub use threshold::{new_alg2, ThresholdLearner};

/// Which algorithm a learner runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// Gradient ascent on bidding probabilities with F known.
    GradientAscent,
    /// Gradient ascent on value thresholds.
    ThresholdGradient,
    /// Per-bucket follow-the-leader.
    MeanBasedFtl,
    /// Follow-the-regularized-leader with lazy projection.
    LazyFtrl,
    /// Misreporting wrapper around another learner.
    Misreport,
}

/// η_t as a function of the round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StepSizePolicy {
    Fixed(f64),
    /// η_t = f̄ / (d_min · t).
    Harmonic { fbar: f64, dmin: f64 },
}

impl StepSizePolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Fixed(eta) if eta > 0.0 && eta.is_finite() => Ok(()),
            Self::Harmonic { fbar, dmin } if fbar > 0.0 && dmin > 0.0 && (fbar / dmin).is_finite() => Ok(()),
            _ => Err(domain(format!("invalid step-size policy {self:?}"))),
        }
    }

    /// η_t for round t ≥ 1.
    pub fn eta(&self, t: u64) -> f64 {
        match *self {
            Self::Fixed(eta) => eta,
            Self::Harmonic { fbar, dmin } => fbar / (dmin * t as f64),
        }
    }
}

/// η = √(K / 2T), the fixed step for gradient ascent with F known.
pub fn default_eta_alg1(k: usize, horizon: u64) -> f64 {
    (k as f64 / (2.0 * horizon as f64)).sqrt()
}

/// η = 1 / √(f̄ T), the fixed step for threshold gradient ascent.
pub fn default_eta_alg2(fbar: f64, horizon: u64) -> f64 {
    1.0 / (fbar * horizon as f64).sqrt()
}

/// A learner's strategy at the start of a round.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategySnapshot {
    Probabilities(BidProbabilityVector),
    Thresholds(ThresholdVector),
    /// Bucket b covers [b/B, (b+1)/B); `thresholds` is set when the table is
    /// monotone and never overbids.
    Buckets { bids: Arc<Vec<usize>>, thresholds: Option<ThresholdVector> },
    Misreported { inner: Box<StrategySnapshot>, map: Arc<MisreportMap> },
}

impl StrategySnapshot {
    /// The bid this strategy places for `value`.
    pub fn bid_at(&self, grid: &BidGrid, dist: &ValueDistribution, value: f64) -> usize {
        match self {
            Self::Probabilities(p) => bid_index(&crate::auction::thresholds_of(grid, dist, p), value),
            Self::Thresholds(v) => bid_index(v, value),
            Self::Buckets { bids, .. } => bids[mean_based::bucket_of(bids.len(), value)],
            Self::Misreported { inner, map } => inner.bid_at(grid, dist, map.eval(value)),
        }
    }

    /// Threshold form, when the strategy has one.
    pub fn thresholds(&self, grid: &BidGrid, dist: &ValueDistribution) -> Option<ThresholdVector> {
        match self {
            Self::Probabilities(p) => Some(crate::auction::thresholds_of(grid, dist, p)),
            Self::Thresholds(v) => Some(v.clone()),
            Self::Buckets { thresholds, .. } => thresholds.clone(),
            Self::Misreported { .. } => self.step_strategy(grid, dist).to_thresholds(grid),
        }
    }

    /// Bidding-probability form for strategies in 𝒱.
    pub fn probabilities(&self, grid: &BidGrid, dist: &ValueDistribution) -> Option<BidProbabilityVector> {
        match self {
            Self::Probabilities(p) => Some(p.clone()),
            Self::Thresholds(v) => Some(probabilities_of(dist, v)),
            _ => self.thresholds(grid, dist).map(|v| probabilities_of(dist, &v)),
        }
    }

    pub fn step_strategy(&self, grid: &BidGrid, dist: &ValueDistribution) -> StepStrategy {
        match self {
            Self::Probabilities(p) => StepStrategy::from_thresholds(&crate::auction::thresholds_of(grid, dist, p)),
            Self::Thresholds(v) => StepStrategy::from_thresholds(v),
            Self::Buckets { bids, .. } => StepStrategy::from_buckets(bids),
            Self::Misreported { inner, map } => {
                let base = inner.step_strategy(grid, dist);
                map.compose(&base, |y| inner.bid_at(grid, dist, y))
            }
        }
    }

    /// Exact expected utility u(s | F, h).
    pub fn utility(&self, grid: &BidGrid, dist: &ValueDistribution, h: usize) -> f64 {
        match self {
            Self::Misreported { inner, map } if map.is_identity() => inner.utility(grid, dist, h),
            Self::Probabilities(p) => utility_against(grid, dist, p, h).unwrap_or(f64::NAN),
            Self::Thresholds(v) => utility_against(grid, dist, &probabilities_of(dist, v), h).unwrap_or(f64::NAN),
            _ => self.step_strategy(grid, dist).utility(grid, dist, h),
        }
    }

    /// Exact expected payment E[s(v)·1(s(v) ≥ h)].
    pub fn revenue(&self, grid: &BidGrid, dist: &ValueDistribution, h: usize) -> f64 {
        match self {
            Self::Misreported { inner, map } if map.is_identity() => inner.revenue(grid, dist, h),
            Self::Probabilities(p) => revenue_unchecked(grid, p, h),
            Self::Thresholds(v) => revenue_unchecked(grid, &probabilities_of(dist, v), h),
            _ => self.step_strategy(grid, dist).revenue(grid, dist, h),
        }
    }
}

/// The uniform learner interface.
pub trait Learner: Send {
    fn kind(&self) -> LearnerKind;

    /// The current round t (1 before any observation).
    fn round(&self) -> u64;

    /// η_t for the current round, for learners with a step size.
    fn step_size(&self) -> Option<f64>;

    fn snapshot(&self) -> StrategySnapshot;

    /// The bid index placed for `value` this round.
    fn bid_index(&self, value: f64) -> Result<usize>;

    /// Advances one round after seeing competing bid index `h`.
    fn observe(&mut self, h: usize) -> Result<()>;
}

pub(crate) fn check_value(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(domain(format!("value {value} outside [0,1]")))
    }
}

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::auction::{BidGrid, CompetingBidDistribution};
use crate::error::{domain, Error, Result};
use crate::learners::StrategySnapshot;

/// What an adaptive adversary may look at before choosing h_t. The value of
/// the current round is drawn only after the adversary returns.
pub struct History<'a> {
    pub t: u64,
    pub strategy: &'a StrategySnapshot,
    pub past_h: &'a [usize],
    /// Realized values of earlier rounds; empty in exact mode.
    pub past_values: &'a [f64],
}

pub type AdaptiveFn = Arc<dyn Fn(&History<'_>) -> usize + Send + Sync>;

/// How the highest competing bid (or the seller's reserve) is generated.
#[derive(Clone)]
pub enum AdversarySpec {
    /// h_t drawn iid from d.
    Stochastic(CompetingBidDistribution),
    /// Replays a list of indices.
    FixedSequence(Arc<Vec<usize>>),
    /// `high` for t ≤ `switch`, `low` afterwards.
    DecreasingReserve { switch: u64, high: usize, low: usize },
    /// h_t uniform on {b_0, b_1}.
    LowerBoundConstruction,
    Adaptive(AdaptiveFn),
}

impl AdversarySpec {
    /// Checks every index the adversary can emit against the grid.
    pub fn validate(&self, grid: &BidGrid) -> Result<()> {
        match self {
            Self::Stochastic(d) if d.k() != grid.k() => {
                Err(domain(format!("competing-bid distribution has {} entries, grid has {}", d.k() + 1, grid.k() + 1)))
            }
            Self::FixedSequence(seq) => seq.iter().try_for_each(|&i| grid.check_index(i)),
            Self::DecreasingReserve { high, low, .. } => {
                grid.check_index(*high)?;
                grid.check_index(*low)
            }
            _ => Ok(()),
        }
    }

    pub fn next_competing_bid<R: Rng + ?Sized>(&self, history: &History<'_>, grid: &BidGrid, rng: &mut R) -> Result<usize> {
        let h = match self {
            Self::Stochastic(d) => {
                let u: f64 = rng.random();
                d.cumulative().partition_point(|&c| c <= u).min(d.k())
            }
            Self::FixedSequence(seq) => {
                let round = history.t;
                *seq.get((round - 1) as usize).ok_or(Error::SequenceExhausted { round, len: seq.len() })?
            }
            Self::DecreasingReserve { switch, high, low } => {
                if history.t <= *switch {
                    *high
                } else {
                    *low
                }
            }
            Self::LowerBoundConstruction => usize::from(rng.random::<bool>()),
            Self::Adaptive(f) => f(history),
        };
        grid.check_index(h)?;
        Ok(h)
    }
}

impl fmt::Debug for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Stochastic(d) => {
                write!(f, "stochastic(")?;
                for (i, x) in d.d().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Self::FixedSequence(seq) => write!(f, "seq(<{} rounds>)", seq.len()),
            Self::DecreasingReserve { switch, high, low } => write!(f, "decreasing({switch},{high},{low})"),
            Self::LowerBoundConstruction => write!(f, "lowerbound"),
            Self::Adaptive(_) => write!(f, "adaptive"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::ThresholdVector;
    use crate::environments::rng::{stream, Purpose};

    fn history<'a>(t: u64, s: &'a StrategySnapshot) -> History<'a> {
        History { t, strategy: s, past_h: &[], past_values: &[] }
    }

    #[test]
    fn decreasing_reserve_switches_after_the_switch_round() {
        let g = BidGrid::uniform(2, 0.125).unwrap();
        let s = StrategySnapshot::Thresholds(ThresholdVector::ones(2));
        let adv = AdversarySpec::DecreasingReserve { switch: 500, high: 2, low: 1 };
        let mut rng = stream(0, 0, 0, Purpose::Adversary);
        assert_eq!(adv.next_competing_bid(&history(500, &s), &g, &mut rng).unwrap(), 2);
        assert_eq!(adv.next_competing_bid(&history(501, &s), &g, &mut rng).unwrap(), 1);
    }

    #[test]
    fn point_mass_and_exhausted_sequence() {
        let g = BidGrid::uniform(2, 0.125).unwrap();
        let s = StrategySnapshot::Thresholds(ThresholdVector::ones(2));
        let mut rng = stream(1, 0, 0, Purpose::Adversary);
        let adv = AdversarySpec::Stochastic(CompetingBidDistribution::point_mass(2, 0).unwrap());
        for t in 1..100 {
            assert_eq!(adv.next_competing_bid(&history(t, &s), &g, &mut rng).unwrap(), 0);
        }
        let seq = AdversarySpec::FixedSequence(Arc::new(vec![1, 2]));
        assert_eq!(seq.next_competing_bid(&history(2, &s), &g, &mut rng).unwrap(), 2);
        assert!(matches!(
            seq.next_competing_bid(&history(3, &s), &g, &mut rng),
            Err(Error::SequenceExhausted { round: 3, len: 2 })
        ));
        let bad = AdversarySpec::DecreasingReserve { switch: 1, high: 3, low: 0 };
        assert!(bad.validate(&g).is_err());
    }

    #[test]
    fn lower_bound_construction_is_fair() {
        let g = BidGrid::uniform(1, 0.25).unwrap();
        let s = StrategySnapshot::Thresholds(ThresholdVector::ones(1));
        let mut rng = stream(3, 0, 0, Purpose::Adversary);
        let n = 100_000;
        let zeros = (1..=n)
            .filter(|&t| AdversarySpec::LowerBoundConstruction.next_competing_bid(&history(t, &s), &g, &mut rng).unwrap() == 0)
            .count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((zeros - n as f64 / 2.0).abs() <= 3.0 * sigma, "{zeros}");
    }
}

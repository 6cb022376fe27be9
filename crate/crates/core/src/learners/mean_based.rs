use std::sync::Arc;

use crate::auction::{BidGrid, StepStrategy, ThresholdVector};
use crate::error::{domain, Result};
use crate::learners::{check_value, Learner, LearnerKind, StrategySnapshot};

pub const DEFAULT_BUCKETS: usize = 64;

/// Follow-the-leader per value bucket.
///
/// Bucket b covers [b/B, (b+1)/B) and is represented by its midpoint w. The
/// cumulative payoff of bid b_j for that bucket is Σ_t (w − b_j)·1(b_j ≥ h_t),
/// which equals (w − b_j)·N_j with N_j = #{t : h_t ≤ j}; the learner keeps the
/// counts and bids the leading index (ties to the smaller bid).
#[derive(Debug, Clone)]
pub struct MeanBasedFtl {
    grid: BidGrid,
    buckets: usize,
    at_most: Vec<u64>,
    bids: Arc<Vec<usize>>,
    thresholds: Option<ThresholdVector>,
    t: u64,
}

pub fn new_mean_based_ftl(grid: &BidGrid, buckets: usize) -> Result<MeanBasedFtl> {
    if buckets == 0 {
        return Err(domain("mean-based learner needs at least one bucket"));
    }
    let mut ftl = MeanBasedFtl {
        grid: grid.clone(),
        buckets,
        at_most: vec![0; grid.k() + 1],
        bids: Arc::new(vec![0; buckets]),
        thresholds: None,
        t: 1,
    };
    ftl.refresh_thresholds();
    Ok(ftl)
}

pub(crate) fn bucket_of(buckets: usize, value: f64) -> usize {
    ((value * buckets as f64).floor() as usize).min(buckets - 1)
}

impl MeanBasedFtl {
    pub fn midpoint(&self, b: usize) -> f64 {
        (b as f64 + 0.5) / self.buckets as f64
    }

    /// The current bid of every bucket.
    pub fn bucket_bids(&self) -> &[usize] {
        &self.bids
    }

    /// Cumulative payoff table, one row per bucket and one column per bid.
    pub fn cumulative_payoffs(&self) -> Vec<Vec<f64>> {
        (0..self.buckets)
            .map(|b| {
                let w = self.midpoint(b);
                (0..=self.grid.k()).map(|j| (w - self.grid.bid(j)) * self.at_most[j] as f64).collect()
            })
            .collect()
    }

    fn leader(&self, b: usize) -> usize {
        let w = self.midpoint(b);
        let mut best = 0;
        let mut best_payoff = w * self.at_most[0] as f64;
        for j in 1..=self.grid.k() {
            let payoff = (w - self.grid.bid(j)) * self.at_most[j] as f64;
            if payoff > best_payoff {
                best = j;
                best_payoff = payoff;
            }
        }
        best
    }

    fn refresh_thresholds(&mut self) {
        self.thresholds = StepStrategy::from_buckets(&self.bids).to_thresholds(&self.grid);
    }
}

impl Learner for MeanBasedFtl {
    fn kind(&self) -> LearnerKind {
        LearnerKind::MeanBasedFtl
    }

    fn round(&self) -> u64 {
        self.t
    }

    fn step_size(&self) -> Option<f64> {
        None
    }

    fn snapshot(&self) -> StrategySnapshot {
        StrategySnapshot::Buckets { bids: Arc::clone(&self.bids), thresholds: self.thresholds.clone() }
    }

    fn bid_index(&self, value: f64) -> Result<usize> {
        check_value(value)?;
        Ok(self.bids[bucket_of(self.buckets, value)])
    }

    fn observe(&mut self, h: usize) -> Result<()> {
        self.grid.check_index(h)?;
        for count in &mut self.at_most[h..] {
            *count += 1;
        }
        let next: Vec<usize> = (0..self.buckets).map(|b| self.leader(b)).collect();
        if next != *self.bids {
            self.bids = Arc::new(next);
            self.refresh_thresholds();
        }
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_grid() -> BidGrid {
        BidGrid::uniform(2, 0.125).unwrap()
    }

    #[test]
    fn empty_history_bids_zero() {
        let f = new_mean_based_ftl(&example_grid(), 64).unwrap();
        assert!(f.bucket_bids().iter().all(|&b| b == 0));
        assert!(new_mean_based_ftl(&example_grid(), 0).is_err());
    }

    #[test]
    fn one_observation_adds_one_payoff_row() {
        let mut f = new_mean_based_ftl(&example_grid(), 8).unwrap();
        let before = f.cumulative_payoffs();
        f.observe(1).unwrap();
        let after = f.cumulative_payoffs();
        for b in 0..8 {
            let w = f.midpoint(b);
            for j in 0..=2 {
                let row = if j >= 1 { w - 0.125 * j as f64 } else { 0.0 };
                assert!((after[b][j] - before[b][j] - row).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn decreasing_reserve_thresholds() {
        let t = 1000u64;
        let mut f = new_mean_based_ftl(&example_grid(), 64).unwrap();
        for _ in 0..t / 2 {
            f.observe(2).unwrap();
        }
        for b in 0..64 {
            let expect = if f.midpoint(b) >= 0.25 { 2 } else { 0 };
            assert_eq!(f.bucket_bids()[b], expect, "bucket {b}");
        }
        for _ in 0..t / 2 {
            f.observe(1).unwrap();
        }
        for b in 32..64 {
            assert_eq!(f.bucket_bids()[b], 2, "bucket {b} should still bid 1/4");
        }
        assert_eq!(f.bid_index(0.25).unwrap(), 1);
        assert_eq!(f.bid_index(0.5).unwrap(), 2);
    }
}

use serde::Serialize;

use crate::auction::{BidGrid, BidProbabilityVector, ThresholdVector, ValueDistribution};
use crate::error::{domain, Result};
use crate::numeric::Accumulator;

/// v_i = F⁻(1 − p_i), floored at b_i.
///
/// Where F is flat at b_i every point of [F⁻(1 − p_i), b_i] induces the same
/// strategy up to a null set, so the floor keeps the result in 𝒱 without
/// changing utility or revenue.
pub fn strategy_from_probabilities(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p: &BidProbabilityVector,
) -> Result<ThresholdVector> {
    let p = BidProbabilityVector::new(p.as_slice().to_vec(), grid, dist)?;
    Ok(thresholds_of(grid, dist, &p))
}

pub(crate) fn thresholds_of(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p: &BidProbabilityVector,
) -> ThresholdVector {
    let mut prev = 0.0f64;
    let v = p
        .as_slice()
        .iter()
        .enumerate()
        .map(|(j, &pj)| {
            let x = dist.inverse(1.0 - pj).max(grid.bid(j + 1)).max(prev).min(1.0);
            prev = x;
            x
        })
        .collect();
    ThresholdVector::trusted(v)
}

/// p_j = 1 − F(v_j).
pub fn probabilities_from_strategy(
    grid: &BidGrid,
    dist: &ValueDistribution,
    v: &ThresholdVector,
) -> Result<BidProbabilityVector> {
    let v = ThresholdVector::new(v.as_slice().to_vec(), grid)?;
    Ok(probabilities_of(dist, &v))
}

pub(crate) fn probabilities_of(dist: &ValueDistribution, v: &ThresholdVector) -> BidProbabilityVector {
    BidProbabilityVector::trusted(v.as_slice().iter().map(|&x| 1.0 - dist.cdf(x)).collect())
}

/// The bid index i with value ∈ (v_i, v_{i+1}]; value 0 bids 0.
pub fn bid_for_value(v: &ThresholdVector, value: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&value) {
        return Err(domain(format!("value {value} outside [0,1]")));
    }
    Ok(bid_index(v, value))
}

pub(crate) fn bid_index(v: &ThresholdVector, value: f64) -> usize {
    v.as_slice().partition_point(|&x| x < value)
}

/// A piecewise-constant bidding map on (0, 1].
///
/// Segment k covers (upper_{k−1}, upper_k] with upper_{−1} = 0 and the last
/// upper equal to 1. Used for strategies that are not threshold vectors (bucket
/// tables, misreport compositions) and as a direct route for exact evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepStrategy {
    segments: Vec<(f64, usize)>,
}

impl StepStrategy {
    /// Builds from (upper, bid) pairs; drops empty segments and merges equal neighbours.
    pub fn new(pairs: impl IntoIterator<Item = (f64, usize)>) -> Result<Self> {
        let mut segments: Vec<(f64, usize)> = Vec::new();
        let mut lo = 0.0;
        for (upper, bid) in pairs {
            if !(upper >= lo) {
                return Err(domain("step strategy breakpoints must be non-decreasing"));
            }
            if upper == lo {
                continue;
            }
            match segments.last_mut() {
                Some(last) if last.1 == bid => last.0 = upper,
                _ => segments.push((upper, bid)),
            }
            lo = upper;
        }
        if segments.last().map(|s| s.0) != Some(1.0) {
            return Err(domain("step strategy must cover (0, 1]"));
        }
        Ok(Self { segments })
    }

    pub fn from_thresholds(v: &ThresholdVector) -> Self {
        let k = v.k();
        let pairs = (0..=k).map(|i| (v.get(i + 1), i));
        Self::new(pairs).expect("thresholds are monotone and end at 1")
    }

    /// Equal-width buckets over [0, 1], bucket b bidding `bids[b]`.
    pub fn from_buckets(bids: &[usize]) -> Self {
        let n = bids.len() as f64;
        let pairs = bids.iter().enumerate().map(|(b, &bid)| {
            let upper = if b + 1 == bids.len() { 1.0 } else { (b + 1) as f64 / n };
            (upper, bid)
        });
        Self::new(pairs).expect("buckets cover [0, 1]")
    }

    pub fn segments(&self) -> &[(f64, usize)] {
        &self.segments
    }

    /// Iterates (lo, hi, bid) triples.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        let mut lo = 0.0;
        self.segments.iter().map(move |&(hi, bid)| {
            let piece = (lo, hi, bid);
            lo = hi;
            piece
        })
    }

    pub fn bid_at(&self, value: f64) -> usize {
        let k = self.segments.partition_point(|&(hi, _)| hi < value);
        self.segments[k.min(self.segments.len() - 1)].1
    }

    pub fn is_monotone(&self) -> bool {
        self.segments.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    /// True when no value is mapped to a bid above itself.
    pub fn never_overbids(&self, grid: &BidGrid) -> bool {
        self.pieces().all(|(lo, _, bid)| grid.bid(bid) <= lo + 1e-15)
    }

    /// Thresholds for a monotone, non-overbidding strategy.
    pub fn to_thresholds(&self, grid: &BidGrid) -> Option<ThresholdVector> {
        if !self.is_monotone() || !self.never_overbids(grid) {
            return None;
        }
        let k = grid.k();
        let mut first: Vec<Option<f64>> = vec![None; k];
        for (lo, _, bid) in self.pieces() {
            for slot in first.iter_mut().take(bid) {
                slot.get_or_insert(lo);
            }
        }
        let mut prev = 0.0f64;
        let v = first
            .into_iter()
            .enumerate()
            .map(|(j, x)| {
                let x = x.unwrap_or(1.0).max(prev).max(grid.bid(j + 1));
                prev = x;
                x
            })
            .collect();
        ThresholdVector::new(v, grid).ok()
    }

    /// E[(v − s(v))·1(s(v) ≥ h)] integrated piece by piece.
    pub fn utility(&self, grid: &BidGrid, dist: &ValueDistribution, h: usize) -> f64 {
        let mut acc = Accumulator::default();
        for (lo, hi, bid) in self.pieces() {
            if bid >= h {
                let mass = dist.cdf(hi) - dist.cdf(lo);
                acc.add(dist.partial_mean(lo, hi) - grid.bid(bid) * mass);
            }
        }
        acc.value()
    }

    /// E[s(v)·1(s(v) ≥ h)].
    pub fn revenue(&self, grid: &BidGrid, dist: &ValueDistribution, h: usize) -> f64 {
        let mut acc = Accumulator::default();
        for (lo, hi, bid) in self.pieces() {
            if bid >= h {
                acc.add(grid.bid(bid) * (dist.cdf(hi) - dist.cdf(lo)));
            }
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> BidGrid {
        BidGrid::uniform(2, 0.25).unwrap()
    }

    #[test]
    fn transform_examples() {
        let g = grid3();
        let u = ValueDistribution::Uniform;
        let p = BidProbabilityVector::new(vec![0.5, 0.25], &g, &u).unwrap();
        let v = strategy_from_probabilities(&g, &u, &p).unwrap();
        assert_eq!(v.as_slice(), &[0.5, 0.75]);
        let back = probabilities_from_strategy(&g, &u, &v).unwrap();
        assert_eq!(back.as_slice(), &[0.5, 0.25]);

        let zeros = strategy_from_probabilities(&g, &u, &BidProbabilityVector::zeros(2)).unwrap();
        assert_eq!(zeros.as_slice(), &[1.0, 1.0]);
        let ones = probabilities_from_strategy(&g, &u, &ThresholdVector::ones(2)).unwrap();
        assert_eq!(ones.as_slice(), &[0.0, 0.0]);

        let e = ValueDistribution::equi_revenue(0.1).unwrap();
        let g52 = BidGrid::uniform(2, 0.125).unwrap();
        let p = BidProbabilityVector::new(vec![0.5, 0.5], &g52, &e).unwrap();
        let v = strategy_from_probabilities(&g52, &e, &p).unwrap();
        assert!((v.get(1) - 0.25).abs() < 1e-15 && (v.get(2) - 0.25).abs() < 1e-15);
        let back = probabilities_from_strategy(&g52, &e, &v).unwrap();
        assert!((back.get(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_cdf_region_is_floored_at_the_bid() {
        let e = ValueDistribution::equi_revenue(0.1).unwrap();
        let g = BidGrid::uniform(2, 0.0625).unwrap();
        let p = BidProbabilityVector::new(vec![1.0, 1.0], &g, &e).unwrap();
        let v = strategy_from_probabilities(&g, &e, &p).unwrap();
        assert_eq!(v.as_slice(), &[0.0625, 0.125]);
    }

    #[test]
    fn bid_for_value_examples() {
        let g = grid3();
        let v = ThresholdVector::new(vec![0.5, 0.75], &g).unwrap();
        assert_eq!(bid_for_value(&v, 0.8).unwrap(), 2);
        assert_eq!(bid_for_value(&v, 0.5).unwrap(), 0);
        assert_eq!(bid_for_value(&v, 0.6).unwrap(), 1);
        assert_eq!(bid_for_value(&v, 0.0).unwrap(), 0);
        assert!(bid_for_value(&v, 1.1).is_err());
    }

    #[test]
    fn step_strategy_from_buckets_and_back() {
        let g = BidGrid::uniform(2, 0.125).unwrap();
        let mut bids = vec![0; 64];
        for (b, slot) in bids.iter_mut().enumerate() {
            if b >= 16 {
                *slot = 2;
            } else if b >= 8 {
                *slot = 1;
            }
        }
        let s = StepStrategy::from_buckets(&bids);
        assert_eq!(s.segments(), &[(0.125, 0), (0.25, 1), (1.0, 2)]);
        let v = s.to_thresholds(&g).unwrap();
        assert_eq!(v.as_slice(), &[0.125, 0.25]);
        assert_eq!(StepStrategy::from_thresholds(&v), s);
    }

    #[test]
    fn overbidding_buckets_have_no_threshold_form() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let s = StepStrategy::new([(0.2, 0), (1.0, 1)]).unwrap();
        assert!(s.to_thresholds(&g).is_none());
        let s = StepStrategy::new([(0.5, 2), (1.0, 1)]).unwrap();
        assert!(!s.is_monotone());
    }
}

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::auction::StepStrategy;
use crate::error::{domain, Result};
use crate::learners::{check_value, Learner, LearnerKind, StrategySnapshot};

/// A map M: [0,1] → [0,1] given by knots (x, y), linear between consecutive
/// knots. A repeated x encodes a jump: the first knot is the left limit and the
/// second the value from that point on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisreportMap {
    knots: Vec<(f64, f64)>,
}

impl MisreportMap {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(domain("a misreport map needs at least two knots"));
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(domain("misreport map knots must start at x = 0 and end at x = 1"));
        }
        if knots.iter().any(|&(_, y)| !(0.0..=1.0).contains(&y)) {
            return Err(domain("misreport map values must lie in [0,1]"));
        }
        if knots.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(domain("misreport map knots must be non-decreasing in x"));
        }
        if knots.windows(3).any(|w| w[0].0 == w[1].0 && w[1].0 == w[2].0) {
            return Err(domain("at most two knots may share an x"));
        }
        Ok(Self { knots })
    }

    pub fn identity() -> Self {
        Self { knots: vec![(0.0, 0.0), (1.0, 1.0)] }
    }

    /// M(v) = `to` for v ≥ `from`, identity below.
    pub fn shade_above(from: f64, to: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (from, from), (from, to), (1.0, to)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn is_identity(&self) -> bool {
        self.knots == [(0.0, 0.0), (1.0, 1.0)]
    }

    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.knots.windows(2).filter(|w| w[1].0 > w[0].0).map(|w| (w[0], w[1]))
    }

    pub fn eval(&self, value: f64) -> f64 {
        let mut last = self.knots[self.knots.len() - 1].1;
        for ((x0, y0), (x1, y1)) in self.segments() {
            if value < x1 {
                return if value <= x0 { y0 } else { y0 + (y1 - y0) * (value - x0) / (x1 - x0) };
            }
            last = y1;
        }
        last
    }

    /// The step strategy v ↦ s(M(v)) for an inner step strategy s.
    ///
    /// `point` evaluates the inner strategy at one report; it decides the bid on
    /// pieces where M is constant, so boundary conventions of the inner learner
    /// carry over exactly.
    pub fn compose<F: Fn(f64) -> usize>(&self, inner: &StepStrategy, point: F) -> StepStrategy {
        if self.is_identity() {
            return inner.clone();
        }
        let mut pairs = Vec::new();
        for ((x0, y0), (x1, y1)) in self.segments() {
            if y0 == y1 {
                pairs.push((x1, point(y0)));
                continue;
            }
            let (lo, hi) = (y0.min(y1), y0.max(y1));
            let mut cuts: Vec<f64> = inner
                .segments()
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| u > lo && u < hi)
                .map(|u| x0 + (u - y0) * (x1 - x0) / (y1 - y0))
                .collect();
            cuts.sort_by(f64::total_cmp);
            cuts.push(x1);
            let mut left = x0;
            for c in cuts {
                if c > left {
                    let mid = 0.5 * (left + c);
                    let report = y0 + (y1 - y0) * (mid - x0) / (x1 - x0);
                    pairs.push((c, point(report)));
                    left = c;
                }
            }
        }
        StepStrategy::new(pairs).expect("segments of M cover [0,1]")
    }
}

impl fmt::Display for MisreportMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, y)) in self.knots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}:{y}")?;
        }
        write!(f, "]")
    }
}

/// Bids the inner strategy at M(value); updates pass through untouched.
pub struct Misreporting {
    inner: Box<dyn Learner>,
    map: Arc<MisreportMap>,
}

pub fn wrap_misreport(inner: Box<dyn Learner>, map: MisreportMap) -> Misreporting {
    Misreporting { inner, map: Arc::new(map) }
}

impl Misreporting {
    pub fn inner(&self) -> &dyn Learner {
        self.inner.as_ref()
    }

    pub fn map(&self) -> &MisreportMap {
        &self.map
    }
}

impl Learner for Misreporting {
    fn kind(&self) -> LearnerKind {
        LearnerKind::Misreport
    }

    fn round(&self) -> u64 {
        self.inner.round()
    }

    fn step_size(&self) -> Option<f64> {
        self.inner.step_size()
    }

    fn snapshot(&self) -> StrategySnapshot {
        StrategySnapshot::Misreported { inner: Box::new(self.inner.snapshot()), map: Arc::clone(&self.map) }
    }

    fn bid_index(&self, value: f64) -> Result<usize> {
        check_value(value)?;
        self.inner.bid_index(self.map.eval(value))
    }

    fn observe(&mut self, h: usize) -> Result<()> {
        self.inner.observe(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{BidGrid, ThresholdVector, ValueDistribution};
    use crate::learners::new_alg2;

    #[test]
    fn map_evaluation_and_validation() {
        let m = MisreportMap::shade_above(0.5, 0.25).unwrap();
        assert_eq!(m.eval(0.3), 0.3);
        assert_eq!(m.eval(0.5), 0.25);
        assert_eq!(m.eval(1.0), 0.25);
        assert!(MisreportMap::new(vec![(0.0, 0.0), (0.5, 1.2), (1.0, 1.0)]).is_err());
        assert!(MisreportMap::new(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn identity_wrapper_is_transparent() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let inner = new_alg2(&g, &ThresholdVector::new(vec![0.4, 0.8], &g).unwrap(), 0.1).unwrap();
        let mut plain = inner.clone();
        let mut wrapped = wrap_misreport(Box::new(inner), MisreportMap::identity());
        for h in [1, 2, 0, 2, 1] {
            for s in 0..=20 {
                let v = s as f64 / 20.0;
                assert_eq!(plain.bid_index(v).unwrap(), wrapped.bid_index(v).unwrap());
            }
            plain.observe(h).unwrap();
            wrapped.observe(h).unwrap();
            assert_eq!(plain.snapshot(), wrapped.inner().snapshot());
        }
    }

    #[test]
    fn composition_matches_pointwise_bids() {
        let g = BidGrid::uniform(3, 0.2).unwrap();
        let u = ValueDistribution::Uniform;
        let v = ThresholdVector::new(vec![0.3, 0.45, 0.9], &g).unwrap();
        let base = StepStrategy::from_thresholds(&v);
        let m = MisreportMap::new(vec![(0.0, 0.0), (0.4, 0.8), (0.6, 0.8), (0.6, 0.2), (1.0, 0.5)]).unwrap();
        let composed = m.compose(&base, |y| crate::auction::bid_for_value(&v, y).unwrap());
        for s in 1..1000 {
            let x = s as f64 / 1000.0 + 1e-7;
            let expect = crate::auction::bid_for_value(&v, m.eval(x)).unwrap();
            assert_eq!(composed.bid_at(x), expect, "value {x}");
        }
        let id = MisreportMap::identity().compose(&base, |_| 0);
        assert_eq!(id.utility(&g, &u, 1), base.utility(&g, &u, 1));
    }
}

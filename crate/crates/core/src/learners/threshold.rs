use crate::auction::{bid_index, BidGrid, ThresholdVector};
use crate::error::{domain, Result};
use crate::learners::{check_value, Learner, LearnerKind, StrategySnapshot};
use crate::projection::step_thresholds;

/// Gradient ascent on value thresholds; needs no knowledge of F beyond its step size.
#[derive(Debug, Clone)]
pub struct ThresholdLearner {
    grid: BidGrid,
    eps: f64,
    v: ThresholdVector,
    eta: f64,
    t: u64,
}

pub fn new_alg2(grid: &BidGrid, v1: &ThresholdVector, eta: f64) -> Result<ThresholdLearner> {
    let eps = grid.epsilon()?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(domain(format!("step size must be positive, got {eta}")));
    }
    let v = ThresholdVector::new(v1.as_slice().to_vec(), grid)?;
    Ok(ThresholdLearner { grid: grid.clone(), eps, v, eta, t: 1 })
}

impl ThresholdLearner {
    pub fn thresholds(&self) -> &ThresholdVector {
        &self.v
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Learner for ThresholdLearner {
    fn kind(&self) -> LearnerKind {
        LearnerKind::ThresholdGradient
    }

    fn round(&self) -> u64 {
        self.t
    }

    fn step_size(&self) -> Option<f64> {
        Some(self.eta)
    }

    fn snapshot(&self) -> StrategySnapshot {
        StrategySnapshot::Thresholds(self.v.clone())
    }

    fn bid_index(&self, value: f64) -> Result<usize> {
        check_value(value)?;
        Ok(bid_index(&self.v, value))
    }

    fn observe(&mut self, h: usize) -> Result<()> {
        self.grid.check_index(h)?;
        self.v = step_thresholds(&self.grid, self.eps, &self.v, h, self.eta).0;
        self.t += 1;
        Ok(())
    }
}

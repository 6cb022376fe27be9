use crate::auction::{
    bid_index, gradient_unchecked, thresholds_of, BidGrid, BidProbabilityVector, ThresholdVector,
    ValueDistribution,
};
use crate::error::{domain, Result};
use crate::learners::{check_value, Learner, LearnerKind, StrategySnapshot};
use crate::numeric::Accumulator;
use crate::projection::{project_oracle, ChainPolytope};

/// Follow-the-regularized-leader with a Euclidean regularizer: the iterate is the
/// projection of p_1 + η·Σ_s ∇u(p_s | F, h_s) onto 𝒫.
#[derive(Debug, Clone)]
pub struct LazyFtrl {
    grid: BidGrid,
    dist: ValueDistribution,
    polytope: ChainPolytope,
    p1: Vec<f64>,
    gradient_sum: Vec<Accumulator>,
    p: BidProbabilityVector,
    v: ThresholdVector,
    eta: f64,
    t: u64,
}

pub fn new_lazy_ftrl(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p1: &BidProbabilityVector,
    eta: f64,
) -> Result<LazyFtrl> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(domain(format!("step size must be positive, got {eta}")));
    }
    let p = BidProbabilityVector::new(p1.as_slice().to_vec(), grid, dist)?;
    let v = thresholds_of(grid, dist, &p);
    Ok(LazyFtrl {
        grid: grid.clone(),
        dist: dist.clone(),
        polytope: ChainPolytope::probabilities(grid, dist),
        p1: p.as_slice().to_vec(),
        gradient_sum: vec![Accumulator::default(); grid.k()],
        p,
        v,
        eta,
        t: 1,
    })
}

impl LazyFtrl {
    pub fn probabilities(&self) -> &BidProbabilityVector {
        &self.p
    }

    /// The unprojected point p_1 + η·Σ∇u.
    pub fn accumulated_point(&self) -> Vec<f64> {
        self.p1.iter().zip(&self.gradient_sum).map(|(p, g)| p + self.eta * g.value()).collect()
    }
}

impl Learner for LazyFtrl {
    fn kind(&self) -> LearnerKind {
        LearnerKind::LazyFtrl
    }

    fn round(&self) -> u64 {
        self.t
    }

    fn step_size(&self) -> Option<f64> {
        Some(self.eta)
    }

    fn snapshot(&self) -> StrategySnapshot {
        StrategySnapshot::Probabilities(self.p.clone())
    }

    fn bid_index(&self, value: f64) -> Result<usize> {
        check_value(value)?;
        Ok(bid_index(&self.v, value))
    }

    fn observe(&mut self, h: usize) -> Result<()> {
        self.grid.check_index(h)?;
        let grad = gradient_unchecked(&self.grid, &self.dist, &self.p, h);
        for (acc, g) in self.gradient_sum.iter_mut().zip(grad) {
            acc.add(g);
        }
        let q = self.accumulated_point();
        self.p = BidProbabilityVector::new(project_oracle(&self.polytope, &q)?, &self.grid, &self.dist)?;
        self.v = thresholds_of(&self.grid, &self.dist, &self.p);
        self.t += 1;
        Ok(())
    }
}

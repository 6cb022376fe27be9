use crate::auction::{
    bid_index, gradient_unchecked, thresholds_of, BidGrid, BidProbabilityVector, ThresholdVector,
    ValueDistribution,
};
use crate::error::{Error, Result};
use crate::learners::{check_value, Learner, LearnerKind, StepSizePolicy, StrategySnapshot};
use crate::projection::{probability_caps, project_oracle, step_probabilities, ChainPolytope};

/// Gradient ascent on the bidding-probability vector with F known.
#[derive(Debug, Clone)]
pub struct GradientAscent {
    grid: BidGrid,
    dist: ValueDistribution,
    caps: Vec<f64>,
    p: BidProbabilityVector,
    v: ThresholdVector,
    policy: StepSizePolicy,
    t: u64,
    /// Present on irregular grids, where the closed-form step does not apply.
    polytope: Option<ChainPolytope>,
}

/// Builds the learner. Irregular grids are accepted only with harmonic steps.
pub fn new_alg1(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p1: &BidProbabilityVector,
    policy: StepSizePolicy,
) -> Result<GradientAscent> {
    policy.validate()?;
    let p = BidProbabilityVector::new(p1.as_slice().to_vec(), grid, dist)?;
    let polytope = if grid.is_uniform() {
        None
    } else if matches!(policy, StepSizePolicy::Harmonic { .. }) {
        Some(ChainPolytope::probabilities(grid, dist))
    } else {
        return Err(Error::Unsupported("fixed-step gradient ascent needs a uniform bid grid".into()));
    };
    let v = thresholds_of(grid, dist, &p);
    Ok(GradientAscent {
        grid: grid.clone(),
        dist: dist.clone(),
        caps: probability_caps(grid, dist),
        p,
        v,
        policy,
        t: 1,
        polytope,
    })
}

impl GradientAscent {
    pub fn probabilities(&self) -> &BidProbabilityVector {
        &self.p
    }

    pub fn policy(&self) -> StepSizePolicy {
        self.policy
    }
}

impl Learner for GradientAscent {
    fn kind(&self) -> LearnerKind {
        LearnerKind::GradientAscent
    }

    fn round(&self) -> u64 {
        self.t
    }

    fn step_size(&self) -> Option<f64> {
        Some(self.policy.eta(self.t))
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
        let eta = self.policy.eta(self.t);
        self.p = match &self.polytope {
            None => {
                let eps = self.grid.gap(1);
                step_probabilities(&self.grid, &self.dist, &self.caps, eps, &self.p, h, eta).0
            }
            Some(poly) => {
                let grad = gradient_unchecked(&self.grid, &self.dist, &self.p, h);
                let q: Vec<f64> = self.p.as_slice().iter().zip(&grad).map(|(p, g)| p + eta * g).collect();
                BidProbabilityVector::new(project_oracle(poly, &q)?, &self.grid, &self.dist)?
            }
        };
        self.v = thresholds_of(&self.grid, &self.dist, &self.p);
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::default_eta_alg1;

    #[test]
    fn default_step_and_harmonic_schedule() {
        assert!((default_eta_alg1(2, 10_000) - 0.01).abs() < 1e-15);
        let h = StepSizePolicy::Harmonic { fbar: 1.0, dmin: 0.1 };
        assert!((h.eta(3) - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn observe_applies_the_projected_step() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let u = ValueDistribution::Uniform;
        let p1 = BidProbabilityVector::new(vec![0.40, 0.35], &g, &u).unwrap();
        let mut a = new_alg1(&g, &u, &p1, StepSizePolicy::Fixed(1.0)).unwrap();
        assert_eq!(a.round(), 1);
        a.observe(2).unwrap();
        assert!((a.probabilities().get(1) - 0.45).abs() < 1e-15);
        assert!((a.probabilities().get(2) - 0.45).abs() < 1e-15);
        assert_eq!(a.round(), 2);
        assert!(a.observe(3).is_err());
    }

    #[test]
    fn irregular_grid_needs_harmonic_steps() {
        let g = BidGrid::irregular(vec![0.0, 0.1, 0.4]).unwrap();
        let u = ValueDistribution::Uniform;
        let p1 = BidProbabilityVector::zeros(2);
        assert!(new_alg1(&g, &u, &p1, StepSizePolicy::Fixed(0.1)).is_err());
        let mut a = new_alg1(&g, &u, &p1, StepSizePolicy::Harmonic { fbar: 1.0, dmin: 0.2 }).unwrap();
        for h in [2, 1, 0, 2] {
            a.observe(h).unwrap();
        }
        assert!(a.probabilities().get(1) >= a.probabilities().get(2));
    }
}

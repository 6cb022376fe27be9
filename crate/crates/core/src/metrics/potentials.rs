use serde::Serialize;

use crate::auction::{
    bid_index, probabilities_of, revenue_unchecked, BidGrid, BidProbabilityVector, StepStrategy, ThresholdVector,
    ValueDistribution,
};
use crate::error::{domain, Error, Result};
use crate::learners::{MisreportMap, StrategySnapshot};
use crate::metrics::myerson_revenue;

/// Slack below this counts as a violated per-step inequality.
pub const SLACK_TOL: f64 = 1e-8;

/// ‖p‖² / (2η).
pub fn potential_euclidean(p: &BidProbabilityVector, eta: f64) -> f64 {
    p.as_slice().iter().map(|x| x * x).sum::<f64>() / (2.0 * eta)
}

/// (1/η)·Σ_j ∫_{v_j}^1 (1 − F).
pub fn potential_threshold_revenue(v: &ThresholdVector, dist: &ValueDistribution, eta: f64) -> f64 {
    v.as_slice().iter().map(|&x| dist.survival_integral(x)).sum::<f64>() / eta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessKind {
    /// Probability-space gradient ascent; bound term η.
    Alg1,
    /// Threshold gradient ascent; bound term η·f̄.
    Alg2,
}

/// The per-step revenue inequality ΔΦ + rev ≤ Mye(F) + bound term, with Mye
/// and f̄ computed once.
#[derive(Debug, Clone)]
pub struct RobustnessCheck {
    pub kind: RobustnessKind,
    pub dist: ValueDistribution,
    pub mye: f64,
    pub fbar: f64,
}

impl RobustnessCheck {
    pub fn new(kind: RobustnessKind, dist: &ValueDistribution) -> Self {
        Self { kind, dist: dist.clone(), mye: myerson_revenue(dist).0, fbar: dist.density_bound() }
    }

    /// Potential of a strategy in this check's coordinates.
    pub fn potential(&self, s: &StrategySnapshot, eta: f64) -> Result<f64> {
        match (self.kind, s) {
            (RobustnessKind::Alg1, StrategySnapshot::Probabilities(p)) => Ok(potential_euclidean(p, eta)),
            (RobustnessKind::Alg2, StrategySnapshot::Thresholds(v)) => Ok(potential_threshold_revenue(v, &self.dist, eta)),
            _ => Err(domain(format!("{:?} check applied to a mismatched strategy", self.kind))),
        }
    }

    /// (Mye + bound term) − (Φ(after) − Φ(before) + rev(before, h)).
    pub fn step_slack(
        &self,
        grid: &BidGrid,
        before: &StrategySnapshot,
        after: &StrategySnapshot,
        h: usize,
        eta: f64,
    ) -> Result<f64> {
        grid.check_index(h)?;
        let delta = self.potential(after, eta)? - self.potential(before, eta)?;
        let (rev, term) = match (self.kind, before) {
            (RobustnessKind::Alg1, StrategySnapshot::Probabilities(p)) => (revenue_unchecked(grid, p, h), eta),
            (RobustnessKind::Alg2, StrategySnapshot::Thresholds(v)) => {
                (revenue_unchecked(grid, &probabilities_of(&self.dist, v), h), eta * self.fbar)
            }
            _ => unreachable!("potential() rejects mismatched strategies"),
        };
        Ok(self.mye + term - (delta + rev))
    }
}

/// One-shot form of [`RobustnessCheck::step_slack`].
pub fn check_robustness_step(
    grid: &BidGrid,
    dist: &ValueDistribution,
    before: &StrategySnapshot,
    after: &StrategySnapshot,
    h: usize,
    eta: f64,
    kind: RobustnessKind,
) -> Result<f64> {
    RobustnessCheck::new(kind, dist).step_slack(grid, before, after, h, eta)
}

/// What the threshold learner is compared against in the regret potential.
#[derive(Debug, Clone, Copy)]
pub enum Comparator<'a> {
    /// A fixed strategy that never overbids.
    Benchmark(&'a StepStrategy),
    /// The learner's own strategy evaluated at a misreported value.
    Misreport(&'a MisreportMap),
}

fn positive_part_sum(v: &ThresholdVector, x: f64) -> f64 {
    v.as_slice().iter().map(|&vj| (x - vj).max(0.0)).sum()
}

fn potential_against(comparator: Comparator<'_>, v: &ThresholdVector, vstar: f64, istar: usize, eta: f64) -> f64 {
    let own = positive_part_sum(v, vstar);
    match comparator {
        Comparator::Benchmark(_) => (own + v.as_slice()[..istar].iter().sum::<f64>()) / eta,
        Comparator::Misreport(m) => (own - positive_part_sum(v, m.eval(vstar))) / eta,
    }
}

/// 3·1(min_j |v_j − v*| ≤ η) − (ΔΦ(·|v*) + R), where R is the utility of the
/// comparator minus that of the thresholds `before` for a buyer with value v*
/// facing h.
pub fn check_regret_step(
    grid: &BidGrid,
    before: &ThresholdVector,
    after: &ThresholdVector,
    comparator: Comparator<'_>,
    vstar: f64,
    h: usize,
    eta: f64,
) -> Result<f64> {
    grid.check_index(h)?;
    if !(0.0..=1.0).contains(&vstar) {
        return Err(domain(format!("value {vstar} outside [0,1]")));
    }
    let istar = match comparator {
        Comparator::Benchmark(s) => {
            if !s.never_overbids(grid) {
                return Err(Error::Domain("benchmark strategy overbids".into()));
            }
            s.bid_at(vstar)
        }
        Comparator::Misreport(m) => bid_index(before, m.eval(vstar)),
    };
    let own = bid_index(before, vstar);
    let payoff = |j: usize| if h <= j { vstar - grid.bid(j) } else { 0.0 };
    let r = payoff(istar) - payoff(own);
    let delta = potential_against(comparator, after, vstar, istar, eta)
        - potential_against(comparator, before, vstar, istar, eta);
    let near = before.as_slice().iter().any(|&vj| (vj - vstar).abs() <= eta);
    Ok(if near { 3.0 } else { 0.0 } - (delta + r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::ga_step_thresholds;

    #[test]
    fn potential_examples() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let u = ValueDistribution::Uniform;
        let p = BidProbabilityVector::new(vec![0.8, 0.6], &BidGrid::uniform(2, 0.1).unwrap(), &u).unwrap();
        assert!((potential_euclidean(&p, 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(potential_euclidean(&BidProbabilityVector::zeros(2), 0.3), 0.0);
        assert_eq!(potential_threshold_revenue(&ThresholdVector::ones(2), &u, 0.1), 0.0);
        let v = ThresholdVector::new(vec![0.5, 0.5], &g).unwrap();
        assert!((potential_threshold_revenue(&v, &u, 1.0) - 0.25).abs() < 1e-15);
        let g0 = BidGrid::uniform(2, 0.0001).unwrap();
        let v0 = ThresholdVector::new(vec![0.0001, 0.0002], &g0).unwrap();
        let two = potential_threshold_revenue(&v0, &u, 0.5);
        assert!((two - 2.0).abs() < 1e-3, "{two}");
    }

    #[test]
    fn robustness_slack_example() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let u = ValueDistribution::Uniform;
        let before = StrategySnapshot::Probabilities(BidProbabilityVector::new(vec![0.40, 0.35], &g, &u).unwrap());
        let after = StrategySnapshot::Probabilities(BidProbabilityVector::new(vec![0.45, 0.45], &g, &u).unwrap());
        let slack = check_robustness_step(&g, &u, &before, &after, 2, 1.0, RobustnessKind::Alg1).unwrap();
        assert!((slack - 1.01375).abs() < 1e-12, "{slack}");
        let still = StrategySnapshot::Probabilities(BidProbabilityVector::new(vec![0.3, 0.0], &g, &u).unwrap());
        let slack = check_robustness_step(&g, &u, &still, &still, 2, 0.1, RobustnessKind::Alg1).unwrap();
        assert!((slack - 0.35).abs() < 1e-15);
        let wrong = StrategySnapshot::Thresholds(ThresholdVector::ones(2));
        assert!(check_robustness_step(&g, &u, &wrong, &wrong, 0, 0.1, RobustnessKind::Alg1).is_err());
    }

    #[test]
    fn regret_step_losing_case_and_overbidding_benchmark() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let v = ThresholdVector::new(vec![0.6, 0.8], &g).unwrap();
        let after = ga_step_thresholds(&g, &v, 2, 0.01).unwrap().0;
        let s = StepStrategy::from_thresholds(&ThresholdVector::new(vec![0.7, 0.9], &g).unwrap());
        let slack = check_regret_step(&g, &v, &after, Comparator::Benchmark(&s), 0.2, 2, 0.01).unwrap();
        assert!(slack >= 0.0);
        let over = StepStrategy::new(vec![(1.0, 2)]).unwrap();
        assert!(check_regret_step(&g, &v, &after, Comparator::Benchmark(&over), 0.2, 2, 0.01).is_err());
    }

    #[test]
    fn identity_misreport_has_zero_terms() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let v = ThresholdVector::new(vec![0.3, 0.7], &g).unwrap();
        let after = ga_step_thresholds(&g, &v, 1, 0.05).unwrap().0;
        let id = MisreportMap::identity();
        let slack = check_regret_step(&g, &v, &after, Comparator::Misreport(&id), 0.5, 1, 0.05).unwrap();
        assert_eq!(slack, 0.0);
    }
}

use crate::auction::{BidGrid, ValueDistribution};
use crate::environments::adversary::{AdversarySpec, History};
use crate::environments::rng::{stream, Purpose};
use crate::environments::trace::{RoundTrace, RunMode, SampledRound, Trace};
use crate::error::{Error, Result};
use crate::learners::{Learner, LearnerKind, StrategySnapshot};
use crate::metrics::{benchmark_columns, RobustnessCheck, RobustnessKind, SLACK_TOL};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Store each round's strategy in the trace.
    pub keep_snapshots: bool,
    /// Record the robustness potential and per-step slack for the
    /// gradient-ascent learners.
    pub check_inequalities: bool,
    /// Fail the run on the first slack below −1e−8.
    pub abort_on_violation: bool,
    /// Replication index, selecting independent random streams.
    pub replication: u32,
}

impl RunOptions {
    pub fn checked() -> Self {
        Self { check_inequalities: true, abort_on_violation: true, ..Self::default() }
    }

    pub fn with_snapshots(mut self) -> Self {
        self.keep_snapshots = true;
        self
    }
}

fn robustness_kind(kind: LearnerKind) -> Option<RobustnessKind> {
    match kind {
        LearnerKind::GradientAscent => Some(RobustnessKind::Alg1),
        LearnerKind::ThresholdGradient => Some(RobustnessKind::Alg2),
        _ => None,
    }
}

/// p_h · F⁻(1 − p_h) for probability-space strategies.
fn instance_revenue(dist: &ValueDistribution, s: &StrategySnapshot, h: usize) -> Option<f64> {
    match s {
        StrategySnapshot::Probabilities(p) if h > 0 => {
            let ph = p.get(h);
            Some(ph * dist.inverse(1.0 - ph))
        }
        StrategySnapshot::Probabilities(_) => Some(0.0),
        _ => None,
    }
}

/// Plays `horizon` rounds of the single-buyer protocol: the adversary picks
/// h_t after seeing the current strategy, exact expected utility and revenue
/// are recorded, a value is drawn in sampled mode, and the learner observes
/// h_t.
#[allow(clippy::too_many_arguments)]
pub fn run_single_buyer(
    grid: &BidGrid,
    dist: &ValueDistribution,
    learner: &mut dyn Learner,
    adversary: &AdversarySpec,
    horizon: u64,
    mode: RunMode,
    seed: u64,
    options: &RunOptions,
) -> Result<Trace> {
    adversary.validate(grid)?;
    let mut adv_rng = stream(seed, options.replication, 0, Purpose::Adversary);
    let mut value_rng = stream(seed, options.replication, 0, Purpose::Values);
    let check = if options.check_inequalities {
        robustness_kind(learner.kind()).map(|k| RobustnessCheck::new(k, dist))
    } else {
        None
    };

    let mut rows = Vec::with_capacity(horizon as usize);
    let mut hs = Vec::with_capacity(horizon as usize);
    let mut values = Vec::new();
    let mut current = learner.snapshot();
    for t in 1..=horizon {
        let history = History { t, strategy: &current, past_h: &hs, past_values: &values };
        let h = adversary.next_competing_bid(&history, grid, &mut adv_rng)?;
        let exp_utility = current.utility(grid, dist, h);
        let exp_revenue = current.revenue(grid, dist, h);
        let sample = match mode {
            RunMode::Exact => None,
            RunMode::Sampled => {
                let value = dist.sample(&mut value_rng);
                let bid_index = learner.bid_index(value)?;
                let win = bid_index >= h;
                values.push(value);
                Some(SampledRound { value, bid_index, win, payment: if win { grid.bid(bid_index) } else { 0.0 } })
            }
        };
        let eta_t = learner.step_size();
        learner.observe(h)?;
        let next = learner.snapshot();

        let (potential, slack) = match (&check, eta_t) {
            (Some(c), Some(eta)) => {
                let slack = c.step_slack(grid, &current, &next, h, eta)?;
                if slack < -SLACK_TOL && options.abort_on_violation {
                    return Err(Error::Violation(format!(
                        "round {t}: slack {slack} with h = {h}, eta = {eta}, before = {current:?}, after = {next:?}"
                    )));
                }
                (Some(c.potential(&current, eta)?), Some(slack))
            }
            _ => (None, None),
        };

        hs.push(h);
        rows.push(RoundTrace {
            t,
            h_index: h,
            eta_t,
            instance_revenue: instance_revenue(dist, &current, h),
            snapshot: options.keep_snapshots.then_some(current),
            exp_utility,
            exp_revenue,
            potential,
            slack,
            sample,
            benchmark_cum: 0.0,
            regret_cum: 0.0,
        });
        current = next;
    }

    if !rows.is_empty() {
        let us: Vec<f64> = rows.iter().map(|r| r.exp_utility).collect();
        let (bench, regret, _, _) = benchmark_columns(grid, dist, &hs, &us)?;
        for (row, (b, r)) in rows.iter_mut().zip(bench.into_iter().zip(regret)) {
            row.benchmark_cum = b;
            row.regret_cum = r;
        }
    }
    Ok(Trace { mode, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{CompetingBidDistribution, ThresholdVector};
    use crate::learners::{new_alg1, new_alg2, StepSizePolicy};

    #[test]
    fn point_mass_at_zero_has_vanishing_regret() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let u = ValueDistribution::Uniform;
        let p1 = crate::auction::BidProbabilityVector::new(vec![0.5, 0.4], &g, &u).unwrap();
        let mut a = new_alg1(&g, &u, &p1, StepSizePolicy::Fixed(0.05)).unwrap();
        let adv = AdversarySpec::Stochastic(CompetingBidDistribution::point_mass(2, 0).unwrap());
        let trace = run_single_buyer(&g, &u, &mut a, &adv, 200, RunMode::Exact, 1, &RunOptions::checked().with_snapshots()).unwrap();
        for r in &trace.rows {
            let p = match r.snapshot.as_ref().unwrap() {
                StrategySnapshot::Probabilities(p) => p.clone(),
                _ => unreachable!(),
            };
            let expect = 0.5 - 0.25 * (p.get(1) + p.get(2));
            assert!((r.exp_utility - expect).abs() < 1e-12);
        }
        let per_round: Vec<f64> = trace.rows.windows(2).map(|w| w[1].regret_cum - w[0].regret_cum).collect();
        assert!(per_round.iter().all(|&x| x >= -1e-12));
        assert!(*per_round.last().unwrap() < 1e-12);
        assert!(trace.min_slack().unwrap() >= -SLACK_TOL);
    }

    #[test]
    fn replay_is_bit_identical() {
        let g = BidGrid::uniform(3, 0.2).unwrap();
        let u = ValueDistribution::Uniform;
        let adv = AdversarySpec::Stochastic(CompetingBidDistribution::uniform(3));
        let run = || {
            let mut l = new_alg2(&g, &ThresholdVector::ones(3), 0.05).unwrap();
            let t = run_single_buyer(&g, &u, &mut l, &adv, 500, RunMode::Sampled, 42, &RunOptions::checked()).unwrap();
            let mut buf = Vec::new();
            t.write_csv(&mut buf).unwrap();
            buf
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn sampled_average_matches_exact_utility_for_a_frozen_strategy() {
        struct Frozen(ThresholdVector);
        impl Learner for Frozen {
            fn kind(&self) -> LearnerKind {
                LearnerKind::ThresholdGradient
            }
            fn round(&self) -> u64 {
                1
            }
            fn step_size(&self) -> Option<f64> {
                None
            }
            fn snapshot(&self) -> StrategySnapshot {
                StrategySnapshot::Thresholds(self.0.clone())
            }
            fn bid_index(&self, value: f64) -> Result<usize> {
                crate::auction::bid_for_value(&self.0, value)
            }
            fn observe(&mut self, _h: usize) -> Result<()> {
                Ok(())
            }
        }
        let g = BidGrid::uniform(3, 0.2).unwrap();
        let u = ValueDistribution::equi_revenue(0.3).unwrap();
        let v = ThresholdVector::new(vec![0.3, 0.5, 0.8], &g).unwrap();
        let adv = AdversarySpec::Stochastic(CompetingBidDistribution::new(vec![0.2, 0.3, 0.3, 0.2]).unwrap());
        let n = 100_000;
        let trace = run_single_buyer(&g, &u, &mut Frozen(v.clone()), &adv, n, RunMode::Sampled, 9, &RunOptions::default()).unwrap();
        let realized: Vec<f64> = trace
            .rows
            .iter()
            .map(|r| {
                let s = r.sample.as_ref().unwrap();
                if s.win {
                    s.value - s.payment
                } else {
                    0.0
                }
            })
            .collect();
        let mean = realized.iter().sum::<f64>() / n as f64;
        let var = realized.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let exact = trace.total_utility() / n as f64;
        assert!((mean - exact).abs() <= 3.0 * (var / n as f64).sqrt(), "{mean} vs {exact}");
    }
}

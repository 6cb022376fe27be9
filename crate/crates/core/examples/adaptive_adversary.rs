//! An adversary that reads the learner's current strategy (never its value)
//! and posts one grid step above what the learner would bid at value 3/4.

use std::sync::Arc;

use fpa_bench::auction::{BidGrid, ValueDistribution};
use fpa_bench::environments::{run_single_buyer, AdversarySpec, History, RunMode, RunOptions};
use fpa_bench::learners::LearnerSpec;
use fpa_bench::metrics::myerson_revenue;

fn main() -> fpa_bench::Result<()> {
    let grid = BidGrid::uniform(8, 0.125)?;
    let dist = ValueDistribution::Uniform;
    let horizon = 20_000;
    let (g, f) = (grid.clone(), dist.clone());
    let greedy = AdversarySpec::Adaptive(Arc::new(move |h: &History<'_>| {
        (h.strategy.bid_at(&g, &f, 0.75) + 1).min(g.k())
    }));
    let (mye, _) = myerson_revenue(&dist);
    for spec in [LearnerSpec::Alg1 { eta: None }, LearnerSpec::Alg2 { eta: None }, LearnerSpec::ftl()] {
        let mut learner = spec.build(&grid, &dist, Some(horizon))?;
        let trace = run_single_buyer(&grid, &dist, learner.as_mut(), &greedy, horizon, RunMode::Exact, 0, &RunOptions::checked())?;
        println!(
            "{spec:<18} revenue/T {:.4} (Mye {mye})  regret {:.1}  min slack {:?}",
            trace.total_revenue() / horizon as f64,
            trace.regret(),
            trace.min_slack()
        );
    }
    Ok(())
}

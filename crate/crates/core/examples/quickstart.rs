//! Alg 2 against iid competing bids, compared with its regret guarantee.

use fpa_bench::auction::{BidGrid, CompetingBidDistribution, ValueDistribution};
use fpa_bench::environments::{run_single_buyer, AdversarySpec, RunMode, RunOptions};
use fpa_bench::learners::LearnerSpec;
use fpa_bench::metrics::{pseudo_regret, stochastic_regret};

fn main() -> fpa_bench::Result<()> {
    let grid = BidGrid::uniform(4, 0.125)?;
    let dist = ValueDistribution::Uniform;
    let d = CompetingBidDistribution::new(vec![0.3, 0.1, 0.2, 0.25, 0.15])?;
    let horizon = 20_000;

    let mut learner = LearnerSpec::Alg2 { eta: None }.build(&grid, &dist, Some(horizon))?;
    let options = RunOptions::checked().with_snapshots();
    let trace = run_single_buyer(
        &grid,
        &dist,
        learner.as_mut(),
        &AdversarySpec::Stochastic(d.clone()),
        horizon,
        RunMode::Exact,
        42,
        &options,
    )?;

    let report = pseudo_regret(&trace, &grid, &dist)?;
    let true_d = *stochastic_regret(&trace, &grid, &dist, &d)?.last().unwrap();
    let bound = 7.0 * dist.density_bound().sqrt() * grid.k() as f64 * (horizon as f64).sqrt();
    println!("learner utility      {:.3}", report.learner_total);
    println!("best fixed strategy  {:.3}  thresholds {:?}", report.benchmark_total, report.benchmark_thresholds);
    println!("pseudo-regret        {:.3}", report.pseudo_regret);
    println!("regret against d     {true_d:.3}");
    println!("guarantee            {bound:.1}");
    println!("min robustness slack {:.3e}", trace.min_slack().unwrap());
    Ok(())
}

//! Harmonic step sizes η_t = f̄/(d_min·t) against a competing-bid distribution
//! that puts mass ≥ d_min on every bid: regret grows like log T.

use fpa_bench::auction::{BidGrid, CompetingBidDistribution, ValueDistribution};
use fpa_bench::environments::{run_single_buyer, AdversarySpec, RunMode, RunOptions};
use fpa_bench::learners::LearnerSpec;
use fpa_bench::metrics::{stochastic_regret, strong_concavity_modulus};

fn main() -> fpa_bench::Result<()> {
    let grid = BidGrid::uniform(4, 0.125)?;
    let dist = ValueDistribution::Uniform;
    let d = CompetingBidDistribution::new(vec![0.3, 0.1, 0.2, 0.25, 0.15])?;
    let dmin = d.d_min();
    let fbar = dist.density_bound();
    println!("strong concavity modulus α = {}", strong_concavity_modulus(&dist, &d)?);

    let horizon = 100_000;
    let adversary = AdversarySpec::Stochastic(d.clone());
    let options = RunOptions::checked().with_snapshots();
    for spec in [LearnerSpec::Alg1Harmonic { fbar, dmin }, LearnerSpec::Alg1 { eta: None }] {
        let mut learner = spec.build(&grid, &dist, Some(horizon))?;
        let trace = run_single_buyer(&grid, &dist, learner.as_mut(), &adversary, horizon, RunMode::Exact, 5, &options)?;
        let regret = stochastic_regret(&trace, &grid, &dist, &d)?;
        println!("{spec}");
        for t in [100usize, 1_000, 10_000, 100_000] {
            let bound = 2.0 * fbar / dmin * (1.0 + (t as f64).ln());
            println!("  T = {t:>6}  regret {:>9.3}  log bound {bound:>7.1}", regret[t - 1]);
        }
    }
    Ok(())
}

//! Three Alg 2 buyers with uniform values; the seller posts the monopoly reserve.

use fpa_bench::auction::{BidGrid, ValueDistribution};
use fpa_bench::environments::{run_multi_buyer, BuyerConfig, MultiBuyerConfig, ReservePolicy, TieBreak};
use fpa_bench::learners::LearnerSpec;
use fpa_bench::metrics::{monopoly_reserve_index, optimal_multi_buyer_revenue};

fn main() -> fpa_bench::Result<()> {
    let grid = BidGrid::uniform(8, 0.125)?;
    let dist = ValueDistribution::Uniform;
    let buyer = BuyerConfig { dist: dist.clone(), learner: LearnerSpec::Alg2 { eta: None } };
    let config = MultiBuyerConfig {
        grid: grid.clone(),
        buyers: vec![buyer; 3],
        reserve: ReservePolicy::Monopoly,
        tie_break: TieBreak::UniformPermutation,
        record_buyers: false,
    };
    let horizon = 50_000;
    let optimal = optimal_multi_buyer_revenue(&[dist.clone(), dist.clone(), dist])?;
    println!("monopoly reserve b_{}", monopoly_reserve_index(&grid, &ValueDistribution::Uniform));
    for seed in 0..4 {
        let trace = run_multi_buyer(&config, horizon, seed, 0)?;
        let sold = trace.winners.iter().filter(|w| w.is_some()).count();
        println!(
            "seed {seed}: revenue per round {:.4} (optimal auction {optimal:.4}), sold {:.1}% of rounds",
            trace.total_revenue() / horizon as f64,
            100.0 * sold as f64 / horizon as f64
        );
    }
    Ok(())
}

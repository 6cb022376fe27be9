//! Values concentrated at 1/2 and h_t uniform on {0, 1/4}: every learner pays
//! Ω(√T) regret, so regret/√T stays bounded away from zero.

use fpa_bench::environments::{lower_bound, run_single_buyer, RunMode, RunOptions};
use fpa_bench::learners::LearnerSpec;

fn main() -> fpa_bench::Result<()> {
    for horizon in [100u64, 1_000, 10_000] {
        let p = lower_bound(horizon)?;
        let seeds = 100;
        let mut total = 0.0;
        for seed in 0..seeds {
            let mut learner = LearnerSpec::Alg1 { eta: None }.build(&p.grid, &p.dist, Some(horizon))?;
            let trace =
                run_single_buyer(&p.grid, &p.dist, learner.as_mut(), &p.adversary, horizon, RunMode::Exact, seed, &RunOptions::default())?;
            total += trace.regret();
        }
        let mean = total / seeds as f64;
        println!("T = {horizon:>6}  mean regret {mean:>8.3}  regret/√T {:.4}", mean / (horizon as f64).sqrt());
    }
    Ok(())
}

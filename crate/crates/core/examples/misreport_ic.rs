//! Utility gained by reporting 1/4 for every value at or above 1/2, in the
//! decreasing-reserve scenario. Positive and linear in T for the mean-based
//! learner; bounded by 8K·f̄^{1/2}·√T for Alg 2.

use fpa_bench::environments::{example52, run_single_buyer, RunMode, RunOptions};
use fpa_bench::learners::{LearnerSpec, MisreportMap};
use fpa_bench::metrics::ic_gap;

fn gap(truthful: &LearnerSpec, horizon: u64) -> fpa_bench::Result<f64> {
    let p = example52(0.1, horizon)?;
    let misreport = LearnerSpec::Misreport {
        inner: Box::new(truthful.clone()),
        map: MisreportMap::shade_above(0.5, 0.25)?,
    };
    let run = |spec: &LearnerSpec| {
        let mut learner = spec.build(&p.grid, &p.dist, Some(horizon))?;
        run_single_buyer(&p.grid, &p.dist, learner.as_mut(), &p.adversary, horizon, RunMode::Exact, 0, &RunOptions::default())
    };
    ic_gap(&run(truthful)?, &run(&misreport)?)
}

fn main() -> fpa_bench::Result<()> {
    println!("{:>8} {:>14} {:>14} {:>14}", "T", "ftl", "alg2", "alg2 bound");
    for horizon in [1_000u64, 10_000, 100_000] {
        let bound = 8.0 * 2.0 * 8f64.sqrt() * (horizon as f64).sqrt();
        println!(
            "{horizon:>8} {:>14.2} {:>14.2} {bound:>14.1}",
            gap(&LearnerSpec::ftl(), horizon)?,
            gap(&LearnerSpec::Alg2 { eta: None }, horizon)?
        );
    }
    Ok(())
}

//! A seller posts reserve 1/4 for the first half of the horizon and 1/8 after.
//! The mean-based learner keeps bidding 1/4 for values in [1/4, 1/2) long
//! after the drop; the gradient learners do not.

use fpa_bench::environments::{example52, run_single_buyer, RunMode, RunOptions};
use fpa_bench::learners::LearnerSpec;
use fpa_bench::metrics::myerson_revenue;

fn main() -> fpa_bench::Result<()> {
    let horizon = 100_000;
    let preset = example52(0.1, horizon)?;
    let (mye, reserve) = myerson_revenue(&preset.dist);
    println!("Mye(F) = {mye} at reserve {reserve}; Mye·T = {}", mye * horizon as f64);

    let k = preset.grid.k() as f64;
    let t = horizon as f64;
    let fbar = preset.dist.density_bound();
    for (spec, bound) in [
        (LearnerSpec::ftl(), None),
        (LearnerSpec::Alg2 { eta: None }, Some(2.0 * fbar.sqrt() * k * t.sqrt())),
        (LearnerSpec::Alg1 { eta: None }, Some((2.0 * k * t).sqrt())),
    ] {
        let mut learner = spec.build(&preset.grid, &preset.dist, Some(horizon))?;
        let trace = run_single_buyer(
            &preset.grid,
            &preset.dist,
            learner.as_mut(),
            &preset.adversary,
            horizon,
            RunMode::Exact,
            1,
            &RunOptions::checked(),
        )?;
        let excess = trace.total_revenue() - mye * t;
        match bound {
            Some(b) => println!("{spec:<18} revenue excess {excess:>10.1}   (at most {b:.1})"),
            None => println!("{spec:<18} revenue excess {excess:>10.1}   (T/64 = {:.1})", t / 64.0),
        }
    }
    Ok(())
}

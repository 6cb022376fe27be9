//! One gradient step in each coordinate system, checked against the
//! pool-adjacent-violators oracle.

use fpa_bench::auction::{strategy_from_probabilities, utility_gradient, BidGrid, BidProbabilityVector, ValueDistribution};
use fpa_bench::projection::{ga_step_probabilities, ga_step_thresholds, kkt_residual, project_oracle, ChainPolytope};

fn main() -> fpa_bench::Result<()> {
    let grid = BidGrid::uniform(4, 0.2)?;
    let dist = ValueDistribution::Uniform;
    let p = BidProbabilityVector::new(vec![0.7, 0.5, 0.3, 0.1], &grid, &dist)?;
    let (h, eta) = (3, 0.5);

    let (next, diag) = ga_step_probabilities(&grid, &dist, &p, h, eta)?;
    let g = utility_gradient(&grid, &dist, &p, h)?;
    let q: Vec<f64> = p.as_slice().iter().zip(&g).map(|(x, d)| x + eta * d).collect();
    let poly = ChainPolytope::probabilities(&grid, &dist);
    let oracle = project_oracle(&poly, &q)?;
    println!("p        {:?}", p.as_slice());
    println!("p + η∇u  {q:?}");
    println!("step     {:?}  (pooled {}..={}, level {:.4})", next.as_slice(), diag.m, h, diag.x);
    println!("oracle   {oracle:?}  KKT residual {:.1e}", kkt_residual(&poly, &q, next.as_slice()));

    let v = strategy_from_probabilities(&grid, &dist, &p)?;
    let (w, _) = ga_step_thresholds(&grid, &v, h, eta)?;
    println!("v        {:?}", v.as_slice());
    println!("v step   {:?}  (equals 1 − p step under uniform values)", w.as_slice());
    Ok(())
}

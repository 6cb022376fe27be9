use serde::Serialize;

use crate::auction::{
    expected_utility, probabilities_of, single_shot_best_response, utility_against, BidGrid, CompetingBidDistribution,
    StepStrategy, ThresholdVector, ValueDistribution,
};
use crate::environments::Trace;
use crate::error::{domain, Result};
use crate::numeric::Accumulator;

/// E_v[max_j (v − b_j)·D_j] together with the maximizing thresholds.
///
/// The envelope is integrated piece by piece: on (v_j, v_{j+1}] it equals
/// (v − b_j)·D_j, whose integral against F is D_j·(E[v; piece] − b_j·P(piece)).
pub fn best_fixed_utility(
    grid: &BidGrid,
    dist: &ValueDistribution,
    d: &CompetingBidDistribution,
) -> Result<(f64, ThresholdVector)> {
    let s = single_shot_best_response(grid, d)?;
    let mut acc = Accumulator::default();
    for (lo, hi, j) in StepStrategy::from_thresholds(&s).pieces() {
        let big_d = d.cumulative()[j];
        if big_d > 0.0 {
            let mass = dist.cdf(hi) - dist.cdf(lo);
            acc.add(big_d * (dist.partial_mean(lo, hi) - grid.bid(j) * mass));
        }
    }
    Ok((acc.value(), s))
}

/// u(s* | F, b_i) for every i, for thresholds s*.
pub fn utility_table(grid: &BidGrid, dist: &ValueDistribution, s: &ThresholdVector) -> Vec<f64> {
    let p = probabilities_of(dist, s);
    (0..=grid.k()).map(|i| utility_against(grid, dist, &p, i).expect("index on grid")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub d_hat: Vec<f64>,
    pub benchmark_thresholds: Vec<f64>,
    pub benchmark_total: f64,
    pub learner_total: f64,
    pub pseudo_regret: f64,
    /// Cumulative regret after each round.
    pub regret_series: Vec<f64>,
}

fn counts(grid: &BidGrid, hs: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut c = vec![0u64; grid.k() + 1];
    for h in hs {
        c[h] += 1;
    }
    c
}

/// Cumulative benchmark utility and cumulative regret per round, against the
/// best fixed strategy for the realized h-sequence.
pub(crate) fn benchmark_columns(
    grid: &BidGrid,
    dist: &ValueDistribution,
    hs: &[usize],
    utilities: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, CompetingBidDistribution, ThresholdVector)> {
    let d_hat = CompetingBidDistribution::from_counts(&counts(grid, hs.iter().copied()))?;
    let s = single_shot_best_response(grid, &d_hat)?;
    let table = utility_table(grid, dist, &s);
    let mut bench = Accumulator::default();
    let mut learner = Accumulator::default();
    let mut bench_cum = Vec::with_capacity(hs.len());
    let mut regret_cum = Vec::with_capacity(hs.len());
    for (&h, &u) in hs.iter().zip(utilities) {
        bench.add(table[h]);
        learner.add(u);
        bench_cum.push(bench.value());
        regret_cum.push(bench.value() - learner.value());
    }
    Ok((bench_cum, regret_cum, d_hat, s))
}

/// Pseudo-regret of an exact trace against the best fixed strategy for its
/// h-sequence.
pub fn pseudo_regret(trace: &Trace, grid: &BidGrid, dist: &ValueDistribution) -> Result<BenchmarkReport> {
    if trace.rows.is_empty() {
        return Err(domain("empty trace"));
    }
    let hs = trace.h_sequence();
    let us: Vec<f64> = trace.rows.iter().map(|r| r.exp_utility).collect();
    let (bench_cum, regret_cum, d_hat, s) = benchmark_columns(grid, dist, &hs, &us)?;
    let (per_round, _) = best_fixed_utility(grid, dist, &d_hat)?;
    let learner_total = trace.total_utility();
    let benchmark_total = *bench_cum.last().unwrap();
    debug_assert!((benchmark_total - per_round * hs.len() as f64).abs() < 1e-6 * hs.len() as f64);
    Ok(BenchmarkReport {
        d_hat: d_hat.d().to_vec(),
        benchmark_thresholds: s.into_vec(),
        benchmark_total,
        learner_total,
        pseudo_regret: benchmark_total - learner_total,
        regret_series: regret_cum,
    })
}

/// Cumulative regret against a known competing-bid distribution d:
/// Σ_t [u(s* | F, d) − u(s_t | F, d)]. Needs snapshots in the trace.
pub fn stochastic_regret(
    trace: &Trace,
    grid: &BidGrid,
    dist: &ValueDistribution,
    d: &CompetingBidDistribution,
) -> Result<Vec<f64>> {
    let (best, _) = best_fixed_utility(grid, dist, d)?;
    let mut acc = Accumulator::default();
    let mut out = Vec::with_capacity(trace.rows.len());
    for row in &trace.rows {
        let snap = row.snapshot.as_ref().ok_or_else(|| domain("trace was recorded without snapshots"))?;
        let u = match snap.probabilities(grid, dist) {
            Some(p) => expected_utility(grid, dist, d, &p)?,
            None => {
                let s = snap.step_strategy(grid, dist);
                d.d().iter().enumerate().map(|(i, &di)| di * s.utility(grid, dist, i)).sum()
            }
        };
        acc.add(best - u);
        out.push(acc.value());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn riemann(grid: &BidGrid, d: &CompetingBidDistribution) -> f64 {
        let n = 10_000;
        (0..n)
            .map(|s| {
                let v = (s as f64 + 0.5) / n as f64;
                (0..=grid.k()).map(|j| (v - grid.bid(j)) * d.cumulative()[j]).fold(f64::NEG_INFINITY, f64::max)
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn envelope_examples() {
        let u = ValueDistribution::Uniform;
        let g = BidGrid::uniform(1, 0.25).unwrap();
        let (w, _) = best_fixed_utility(&g, &u, &CompetingBidDistribution::point_mass(1, 0).unwrap()).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        let (w, _) = best_fixed_utility(&g, &u, &CompetingBidDistribution::point_mass(1, 1).unwrap()).unwrap();
        assert!((w - 9.0 / 32.0).abs() < 1e-15);
        // max(v/2, v − 1/4): 1/16 on [0, 1/2] plus 1/4 on [1/2, 1].
        let half = CompetingBidDistribution::new(vec![0.5, 0.5]).unwrap();
        let (w, _) = best_fixed_utility(&g, &u, &half).unwrap();
        assert!((w - 5.0 / 16.0).abs() < 1e-15);
        assert!((riemann(&g, &half) - 5.0 / 16.0).abs() < 1e-6);
    }

    #[test]
    fn envelope_matches_riemann_sum_and_concave_form() {
        let g = BidGrid::uniform(4, 0.2).unwrap();
        let u = ValueDistribution::Uniform;
        let d = CompetingBidDistribution::new(vec![0.1, 0.3, 0.05, 0.35, 0.2]).unwrap();
        let (w, s) = best_fixed_utility(&g, &u, &d).unwrap();
        assert!((w - riemann(&g, &d)).abs() < 1e-6);
        let p = probabilities_of(&u, &s);
        assert!((w - expected_utility(&g, &u, &d, &p).unwrap()).abs() < 1e-12);
    }
}

//! Fixed-seed property suites behind `fpa-bench verify`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::auction::{
    bid_for_value, expected_utility, probabilities_from_strategy, strategy_from_probabilities, utility_against,
    utility_gradient, BidGrid, BidProbabilityVector, CompetingBidDistribution, StepStrategy, ThresholdVector,
    ValueDistribution,
};
use crate::environments::{run_single_buyer, AdversarySpec, RunMode, RunOptions};
use crate::error::{domain, Result};
use crate::learners::{new_alg1, new_alg2, Learner, StepSizePolicy};
use crate::metrics::{
    best_fixed_utility, check_regret_step, empirical_strong_concavity, Comparator, SLACK_TOL,
};
use crate::numeric::integrate_pieces;
use crate::projection::{ga_step_probabilities, ga_step_thresholds, project_oracle, ChainPolytope};

pub const SUITES: &[&str] = &["projection", "mirror", "gradient", "concavity", "transforms", "inequalities"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Largest error; passes at or below the tolerance.
    MaxError,
    /// Smallest slack; passes at or above minus the tolerance.
    MinSlack,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: &'static str,
    pub check: &'static str,
    pub cases: u64,
    pub measure: Measure,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(suite: &'static str, check: &'static str, cases: u64, measure: Measure, worst: f64, tolerance: f64) -> Self {
        let passed = match measure {
            Measure::MaxError => worst <= tolerance,
            Measure::MinSlack => worst >= -tolerance,
        };
        Self { suite, check, cases, measure, worst, tolerance, passed }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (what, bound) = match self.measure {
            Measure::MaxError => ("max error", format!("≤ {:e}", self.tolerance)),
            Measure::MinSlack => ("min slack", format!("≥ -{:e}", self.tolerance)),
        };
        write!(
            f,
            "{} {}/{}: {} cases, {what} {:e} (need {bound})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.check,
            self.cases,
            self.worst
        )
    }
}

/// A uniform grid with 1 ≤ K ≤ `max_k` and Kε ≤ 1.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, max_k: usize) -> BidGrid {
    let k = rng.random_range(1..=max_k);
    let eps = rng.random_range(0.02..=1.0 / k as f64);
    BidGrid::uniform(k, eps).expect("Kε ≤ 1")
}

/// One of the built-in families with random parameters.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R) -> ValueDistribution {
    match rng.random_range(0..4) {
        0 => ValueDistribution::Uniform,
        1 => {
            let a = rng.random_range(0.0..0.8);
            let b = rng.random_range(a + 0.05..=1.0);
            ValueDistribution::uniform_interval(a, b).expect("a < b")
        }
        2 => ValueDistribution::equi_revenue(rng.random_range(0.02..0.86)).expect("δ in (0, 7/8)"),
        _ => {
            let n = rng.random_range(1..5);
            let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
            xs.sort_by(f64::total_cmp);
            let mut ys: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
            ys.sort_by(f64::total_cmp);
            let mut pts = vec![(0.0, 0.0)];
            for (x, y) in xs.into_iter().zip(ys) {
                if x > pts.last().unwrap().0 + 1e-3 && y > pts.last().unwrap().1 + 1e-3 {
                    pts.push((x, y));
                }
            }
            pts.push((1.0, 1.0));
            ValueDistribution::piecewise_linear(&pts).expect("strictly increasing table")
        }
    }
}

/// A random distribution over the K+1 bids; every entry is at least `floor`.
pub fn random_competing<R: Rng + ?Sized>(rng: &mut R, k: usize, floor: f64) -> CompetingBidDistribution {
    let raw: Vec<f64> = (0..=k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - floor * (k + 1) as f64;
    CompetingBidDistribution::new(raw.iter().map(|x| floor + free * x / total).collect()).expect("normalized")
}

/// A no-overbid step strategy with up to six pieces, not necessarily monotone.
pub fn random_no_overbid<R: Rng + ?Sized>(rng: &mut R, grid: &BidGrid) -> StepStrategy {
    let n = rng.random_range(1..=6);
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.push(1.0);
    let mut lo = 0.0;
    let mut pairs = Vec::with_capacity(n);
    for hi in cuts {
        let top = grid.bids().iter().rposition(|&b| b <= lo).unwrap_or(0);
        pairs.push((hi, rng.random_range(0..=top)));
        lo = hi;
    }
    StepStrategy::new(pairs).expect("sorted cuts ending at 1")
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn projection(cases: u64, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_p, mut worst_v) = (0.0f64, 0.0f64);
    for _ in 0..cases {
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let i = rng.random_range(0..=grid.k());
        let eta = 2.0 * (1.0 - rng.random::<f64>());

        let p = BidProbabilityVector::sample(&grid, &dist, &mut rng);
        let (closed, _) = ga_step_probabilities(&grid, &dist, &p, i, eta)?;
        let g = utility_gradient(&grid, &dist, &p, i)?;
        let q: Vec<f64> = p.as_slice().iter().zip(&g).map(|(x, d)| x + eta * d).collect();
        let oracle = project_oracle(&ChainPolytope::probabilities(&grid, &dist), &q)?;
        worst_p = worst_p.max(max_abs_diff(closed.as_slice(), &oracle));

        let v = ThresholdVector::sample(&grid, &mut rng);
        let (closed, _) = ga_step_thresholds(&grid, &v, i, eta)?;
        let q: Vec<f64> = (1..=grid.k())
            .map(|j| {
                let vj = v.get(j);
                if j < i {
                    vj
                } else if j == i {
                    vj - eta * (vj - grid.bid(j))
                } else {
                    vj + eta * grid.gap(j)
                }
            })
            .collect();
        let oracle = project_oracle(&ChainPolytope::thresholds(&grid), &q)?;
        worst_v = worst_v.max(max_abs_diff(closed.as_slice(), &oracle));
    }
    Ok(vec![
        CheckReport::new("projection", "probabilities", cases, Measure::MaxError, worst_p, 1e-9),
        CheckReport::new("projection", "thresholds", cases, Measure::MaxError, worst_v, 1e-9),
    ])
}

/// Alg 1 and Alg 2 on uniform values with K = 8 and v_1 = 1 − p_1, fed the
/// same random competing bids.
pub fn mirror(rounds: u64, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = BidGrid::uniform(8, 0.125)?;
    let dist = ValueDistribution::Uniform;
    let eta = (8.0 / (2.0 * rounds as f64)).sqrt();
    let p1 = BidProbabilityVector::sample(&grid, &dist, &mut rng);
    let v1 = ThresholdVector::new(p1.as_slice().iter().map(|p| 1.0 - p).collect(), &grid)?;
    let mut a1 = new_alg1(&grid, &dist, &p1, StepSizePolicy::Fixed(eta))?;
    let mut a2 = new_alg2(&grid, &v1, eta)?;
    let mut worst = 0.0f64;
    for _ in 0..rounds {
        let h = rng.random_range(0..=grid.k());
        a1.observe(h)?;
        a2.observe(h)?;
        let mirrored: Vec<f64> = a1.probabilities().as_slice().iter().map(|p| 1.0 - p).collect();
        worst = worst.max(max_abs_diff(&mirrored, a2.thresholds().as_slice()));
    }
    Ok(vec![CheckReport::new("mirror", "alg1_vs_alg2", rounds, Measure::MaxError, worst, 1e-12)])
}

/// A point of 𝒫 at least `margin` inside every constraint, away from kinks of F⁻.
fn interior_point<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &BidGrid,
    dist: &ValueDistribution,
    margin: f64,
) -> Option<BidProbabilityVector> {
    let caps: Vec<f64> = (1..=grid.k()).map(|j| 1.0 - dist.cdf(grid.bid(j))).collect();
    let mut p: Vec<f64> = caps.iter().map(|&c| rng.random::<f64>() * c).collect();
    p.sort_by(|a, b| b.total_cmp(a));
    let mut prev = 1.0;
    for (j, &x) in p.iter().enumerate() {
        if x > caps[j] - margin || x < margin || prev - x < margin {
            return None;
        }
        prev = x;
    }
    let kinks = dist.breakpoints();
    for &x in &p {
        let v = dist.inverse(1.0 - x);
        if kinks.iter().any(|&b| (b - v).abs() < 1e-3) {
            return None;
        }
    }
    BidProbabilityVector::new(p, grid, dist).ok()
}

/// ∇u against central differences with step 1e−5.
pub fn gradient(points: u64, seed: u64) -> Result<Vec<CheckReport>> {
    const STEP: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < points {
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let Some(p) = interior_point(&mut rng, &grid, &dist, 1e-3) else { continue };
        let i = rng.random_range(0..=grid.k());
        let g = utility_gradient(&grid, &dist, &p, i)?;
        for j in 0..grid.k() {
            let shifted = |delta: f64| -> Result<f64> {
                let mut x = p.as_slice().to_vec();
                x[j] += delta;
                utility_against(&grid, &dist, &BidProbabilityVector::new(x, &grid, &dist)?, i)
            };
            let fd = (shifted(STEP)? - shifted(-STEP)?) / (2.0 * STEP);
            worst = worst.max((fd - g[j]).abs());
        }
        done += 1;
    }
    Ok(vec![CheckReport::new("gradient", "finite_differences", points, Measure::MaxError, worst, 1e-6)])
}

/// Chord inequality for u(·|F, d) and the α-strong-concavity midpoint test.
pub fn concavity(tuples: u64, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..tuples {
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let d = random_competing(&mut rng, grid.k(), 0.0);
        let p = BidProbabilityVector::sample(&grid, &dist, &mut rng);
        let q = BidProbabilityVector::sample(&grid, &dist, &mut rng);
        let lambda: f64 = rng.random();
        let mix: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let mix = BidProbabilityVector::new(mix, &grid, &dist)?;
        let u = |x: &BidProbabilityVector| expected_utility(&grid, &dist, &d, x);
        worst = worst.min(u(&mix)? - lambda * u(&p)? - (1.0 - lambda) * u(&q)?);
    }
    let mut strong = f64::INFINITY;
    let instances = 100;
    for _ in 0..instances {
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let d = random_competing(&mut rng, grid.k(), 0.02);
        strong = strong.min(empirical_strong_concavity(&grid, &dist, &d, (tuples / instances).max(1) as usize, &mut rng)?);
    }
    Ok(vec![
        CheckReport::new("concavity", "chord", tuples, Measure::MinSlack, worst, 1e-9),
        CheckReport::new("concavity", "strong_midpoint", tuples, Measure::MinSlack, strong, 1e-9),
    ])
}

/// E[(v − b_{s(v)})·1(s(v) ≥ h)] by adaptive quadrature over the pieces of s.
fn strategy_utility_by_quadrature(grid: &BidGrid, dist: &ValueDistribution, v: &ThresholdVector, h: usize) -> f64 {
    let mut cuts = v.as_slice().to_vec();
    cuts.extend(dist.breakpoints());
    cuts.sort_by(f64::total_cmp);
    let payoff = |x: f64| {
        let s = bid_for_value(v, x).expect("x in [0,1]");
        if s >= h {
            (x - grid.bid(s)) * dist.density(x)
        } else {
            0.0
        }
    };
    integrate_pieces(payoff, 0.0, 1.0, &cuts, 1e-12)
}

/// Transform consistency, round trips, no-overbid monotone bidding and
/// best-response dominance.
pub fn transforms(cases: u64, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut utility_err, mut round_trip, mut bidding) = (0.0f64, 0.0f64, 0u64);
    for _ in 0..cases {
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let v = ThresholdVector::sample(&grid, &mut rng);
        let p = probabilities_from_strategy(&grid, &dist, &v)?;
        let h = rng.random_range(0..=grid.k());
        let direct = strategy_utility_by_quadrature(&grid, &dist, &v, h);
        utility_err = utility_err.max((utility_against(&grid, &dist, &p, h)? - direct).abs());

        let p = BidProbabilityVector::sample(&grid, &dist, &mut rng);
        let back = probabilities_from_strategy(&grid, &dist, &strategy_from_probabilities(&grid, &dist, &p)?)?;
        round_trip = round_trip.max(max_abs_diff(p.as_slice(), back.as_slice()));

        let mut last = 0;
        for s in 0..=200 {
            let x = s as f64 / 200.0;
            let b = bid_for_value(&v, x)?;
            if b < last || grid.bid(b) > x + 1e-15 {
                bidding += 1;
            }
            last = b;
        }
    }
    let mut dominance = f64::INFINITY;
    let instances = 100;
    let per = (10 * cases / instances).max(1);
    for _ in 0..instances {
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let d = random_competing(&mut rng, grid.k(), 0.0);
        let (best, _) = best_fixed_utility(&grid, &dist, &d)?;
        for _ in 0..per {
            let v = ThresholdVector::sample(&grid, &mut rng);
            let u = expected_utility(&grid, &dist, &d, &probabilities_from_strategy(&grid, &dist, &v)?)?;
            dominance = dominance.min(best - u);
        }
    }
    Ok(vec![
        CheckReport::new("transforms", "utility_vs_quadrature", cases, Measure::MaxError, utility_err, 1e-8),
        CheckReport::new("transforms", "p_v_p_round_trip", cases, Measure::MaxError, round_trip, 1e-9),
        CheckReport::new("transforms", "monotone_no_overbid", cases, Measure::MaxError, bidding as f64, 0.0),
        CheckReport::new("transforms", "best_response_dominance", instances * per, Measure::MinSlack, dominance, 1e-9),
    ])
}

/// Per-step robustness slack along Alg 1 and Alg 2 runs against every
/// adversary family, and the regret-step inequality on random tuples.
pub fn inequalities(tuples: u64, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let runs = 48;
    let horizon = 2_000;
    let mut robust = f64::INFINITY;
    for r in 0..runs {
        let grid = random_grid(&mut rng, 6);
        let dist = random_distribution(&mut rng);
        let adversary = match r % 4 {
            0 => AdversarySpec::Stochastic(random_competing(&mut rng, grid.k(), 0.0)),
            1 => AdversarySpec::DecreasingReserve { switch: horizon / 2, high: grid.k(), low: rng.random_range(0..=grid.k()) },
            2 => AdversarySpec::LowerBoundConstruction,
            _ => AdversarySpec::FixedSequence(std::sync::Arc::new(
                (0..horizon).map(|_| rng.random_range(0..=grid.k())).collect(),
            )),
        };
        let eta = rng.random_range(0.001..0.5);
        let mut learner: Box<dyn Learner> = if r % 2 == 0 {
            Box::new(new_alg1(&grid, &dist, &BidProbabilityVector::sample(&grid, &dist, &mut rng), StepSizePolicy::Fixed(eta))?)
        } else {
            Box::new(new_alg2(&grid, &ThresholdVector::sample(&grid, &mut rng), eta)?)
        };
        let options = RunOptions { check_inequalities: true, ..RunOptions::default() };
        let trace = run_single_buyer(&grid, &dist, learner.as_mut(), &adversary, horizon, RunMode::Exact, seed + r, &options)?;
        robust = robust.min(trace.min_slack().ok_or_else(|| domain("robustness slack was not recorded"))?);
    }

    let eta = 0.01;
    let mut regret = f64::INFINITY;
    for n in 0..tuples {
        let grid = random_grid(&mut rng, 8);
        let before = ThresholdVector::sample(&grid, &mut rng);
        let h = rng.random_range(0..=grid.k());
        let (after, _) = ga_step_thresholds(&grid, &before, h, eta)?;
        let vstar = if n % 4 == 0 {
            let j = rng.random_range(1..=grid.k());
            (before.get(j) + rng.random_range(-2.0 * eta..2.0 * eta)).clamp(0.0, 1.0)
        } else {
            rng.random()
        };
        let s = random_no_overbid(&mut rng, &grid);
        regret = regret.min(check_regret_step(&grid, &before, &after, Comparator::Benchmark(&s), vstar, h, eta)?);
    }
    Ok(vec![
        CheckReport::new("inequalities", "robustness_along_runs", runs * horizon, Measure::MinSlack, robust, SLACK_TOL),
        CheckReport::new("inequalities", "regret_step", tuples, Measure::MinSlack, regret, SLACK_TOL),
    ])
}

/// Runs one suite (or all of them for `None`) at the documented sizes.
pub fn verify(suite: Option<&str>) -> Result<Vec<CheckReport>> {
    let selected: Vec<&str> = match suite {
        None | Some("all") => SUITES.to_vec(),
        Some(s) if SUITES.contains(&s) => vec![s],
        Some(s) => return Err(domain(format!("unknown suite `{s}` (expected one of {} or all)", SUITES.join(", ")))),
    };
    let mut out = Vec::new();
    for s in selected {
        out.extend(match s {
            "projection" => projection(10_000, 1)?,
            "mirror" => mirror(10_000, 2)?,
            "gradient" => gradient(1_000, 3)?,
            "concavity" => concavity(1_000, 4)?,
            "transforms" => transforms(1_000, 5)?,
            "inequalities" => inequalities(100_000, 6)?,
            _ => unreachable!(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for report in projection(500, 11)
            .unwrap()
            .into_iter()
            .chain(mirror(500, 12).unwrap())
            .chain(gradient(100, 13).unwrap())
            .chain(concavity(200, 14).unwrap())
            .chain(transforms(100, 15).unwrap())
            .chain(inequalities(5_000, 16).unwrap())
        {
            assert!(report.passed, "{report}");
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(verify(Some("nonsense")).is_err());
    }

    #[test]
    fn random_strategies_never_overbid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let g = random_grid(&mut rng, 8);
            assert!(random_no_overbid(&mut rng, &g).never_overbids(&g));
        }
    }
}

use rand::Rng;

use crate::auction::{expected_utility, BidGrid, BidProbabilityVector, CompetingBidDistribution, ValueDistribution};
use crate::error::{domain, Result};

/// α = d_min / f̄, where d_min is the smallest of d_1..d_K.
///
/// The curvature of p_i comes from the d_i·G(1 − p_i) term alone, so every
/// non-zero bid needs positive probability; d_0 plays no role.
pub fn strong_concavity_modulus(dist: &ValueDistribution, d: &CompetingBidDistribution) -> Result<f64> {
    let d_min = d.d()[1..].iter().copied().fold(f64::INFINITY, f64::min);
    if !(d_min > 0.0) {
        return Err(domain("strong concavity needs d_i > 0 for every non-zero bid"));
    }
    Ok(d_min / dist.density_bound())
}

/// u(midpoint) − (u(p) + u(q))/2 − (α/8)·‖p − q‖², non-negative for an
/// α-strongly concave utility.
pub fn midpoint_excess(
    grid: &BidGrid,
    dist: &ValueDistribution,
    d: &CompetingBidDistribution,
    p: &BidProbabilityVector,
    q: &BidProbabilityVector,
    alpha: f64,
) -> Result<f64> {
    let mid: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| 0.5 * (a + b)).collect();
    let mid = BidProbabilityVector::new(mid, grid, dist)?;
    let dist2: f64 = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
    let u = |x: &BidProbabilityVector| expected_utility(grid, dist, d, x);
    Ok(u(&mid)? - 0.5 * (u(p)? + u(q)?) - alpha / 8.0 * dist2)
}

/// Smallest [`midpoint_excess`] over `pairs` random pairs in 𝒫.
pub fn empirical_strong_concavity<R: Rng + ?Sized>(
    grid: &BidGrid,
    dist: &ValueDistribution,
    d: &CompetingBidDistribution,
    pairs: usize,
    rng: &mut R,
) -> Result<f64> {
    let alpha = strong_concavity_modulus(dist, d)?;
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let p = BidProbabilityVector::sample(grid, dist, rng);
        let q = BidProbabilityVector::sample(grid, dist, rng);
        worst = worst.min(midpoint_excess(grid, dist, d, &p, &q, alpha)?);
    }
    Ok(worst)
}

use crate::auction::{BidGrid, ValueDistribution};
use crate::error::{Error, Result};
use crate::numeric::golden_max;

const SEARCH_POINTS: usize = 100_000;

/// Mye(F) = max_r r·(1 − F(r)), with a maximizing reserve.
pub fn myerson_revenue(dist: &ValueDistribution) -> (f64, f64) {
    match dist {
        ValueDistribution::Uniform => (0.25, 0.5),
        ValueDistribution::UniformInterval { a, b } => {
            let r = a.max(0.5 * b);
            (r * (b - r) / (b - a), r)
        }
        ValueDistribution::EquiRevenue { delta } => {
            if *delta <= 0.5 {
                (0.125, 0.125)
            } else {
                (1.0 / (32.0 * (1.0 - delta) * delta), 0.5)
            }
        }
        ValueDistribution::PiecewiseLinear { .. } => search(dist),
    }
}

/// Grid search on 10^5 points followed by golden-section refinement.
fn search(dist: &ValueDistribution) -> (f64, f64) {
    let rev = |r: f64| r * (1.0 - dist.cdf(r));
    let h = 1.0 / SEARCH_POINTS as f64;
    let mut best = 0;
    let mut best_rev = f64::NEG_INFINITY;
    for s in 0..=SEARCH_POINTS {
        let r = rev(s as f64 * h);
        if r > best_rev {
            best = s;
            best_rev = r;
        }
    }
    let lo = (best as f64 - 1.0).max(0.0) * h;
    let hi = ((best + 1) as f64 * h).min(1.0);
    let r = golden_max(rev, lo, hi, 1e-8);
    if rev(r) >= best_rev {
        (rev(r), r)
    } else {
        (best_rev, best as f64 * h)
    }
}

/// Index of the grid bid maximizing b·(1 − F(b)), ties to the smaller bid.
pub fn monopoly_reserve_index(grid: &BidGrid, dist: &ValueDistribution) -> usize {
    let mut best = 0;
    let mut best_rev = 0.0;
    for (j, &b) in grid.bids().iter().enumerate() {
        let r = b * (1.0 - dist.cdf(b));
        if r > best_rev {
            best = j;
            best_rev = r;
        }
    }
    best
}

/// Optimal auction revenue for n iid buyers from the uniform family:
/// n·∫ max(φ(v), 0)·F(v)^{n−1} f(v) dv with φ(v) = 2v − b, evaluated by the
/// midpoint rule on 10^5 cells.
pub fn optimal_multi_buyer_revenue(dists: &[ValueDistribution]) -> Result<f64> {
    let first = dists.first().ok_or_else(|| Error::Unsupported("no buyers".into()))?;
    if dists.iter().any(|d| d != first) {
        return Err(Error::Unsupported(
            "optimal revenue is computed for iid buyers only; supply the constant manually".into(),
        ));
    }
    let (a, b) = match first {
        ValueDistribution::Uniform => (0.0, 1.0),
        ValueDistribution::UniformInterval { a, b } => (*a, *b),
        other => {
            return Err(Error::Unsupported(format!(
                "optimal multi-buyer revenue is only built in for the uniform family, not {other}; supply the constant manually"
            )))
        }
    };
    let n = dists.len() as i32;
    let h = (b - a) / SEARCH_POINTS as f64;
    let density = 1.0 / (b - a);
    let terms = (0..SEARCH_POINTS).map(|s| {
        let v = a + (s as f64 + 0.5) * h;
        let phi = 2.0 * v - b;
        if phi <= 0.0 {
            0.0
        } else {
            phi * ((v - a) / (b - a)).powi(n - 1) * density
        }
    });
    Ok(n as f64 * h * crate::numeric::neumaier(terms))
}

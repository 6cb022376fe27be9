//! Closed-form gradient step plus Euclidean projection onto 𝒫 and 𝒱, and an
//! independent projection oracle for chain polytopes with box bounds.

use serde::Serialize;

use crate::auction::{BidGrid, BidProbabilityVector, ThresholdVector, ValueDistribution};
use crate::error::{domain, Error, Result};

/// Slack applied toward inclusion in the m and ℓ scans.
pub const SCAN_SLACK: f64 = 1e-12;

/// Largest KKT residual accepted from the oracle.
pub const KKT_TOL: f64 = 1e-10;

/// Where pooling started (m), where saturation starts (ℓ), the pooled level x
/// and the pool size i − m + 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionDiagnostics {
    pub m: usize,
    pub ell: usize,
    pub x: f64,
    pub pooled_count: usize,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("step size must be positive, got {eta}")))
    }
}

/// 1 − F(b_j) for j = 1..=K.
pub fn probability_caps(grid: &BidGrid, dist: &ValueDistribution) -> Vec<f64> {
    (1..=grid.k()).map(|j| 1.0 - dist.cdf(grid.bid(j))).collect()
}

/// One step of gradient ascent on u(·|F, b_i) from p, projected onto 𝒫.
pub fn ga_step_probabilities(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p: &BidProbabilityVector,
    i: usize,
    eta: f64,
) -> Result<(BidProbabilityVector, ProjectionDiagnostics)> {
    let eps = grid.epsilon()?;
    grid.check_index(i)?;
    check_eta(eta)?;
    let p = BidProbabilityVector::new(p.as_slice().to_vec(), grid, dist)?;
    let caps = probability_caps(grid, dist);
    Ok(step_probabilities(grid, dist, &caps, eps, &p, i, eta))
}

pub(crate) fn step_probabilities(
    grid: &BidGrid,
    dist: &ValueDistribution,
    caps: &[f64],
    eps: f64,
    p: &BidProbabilityVector,
    i: usize,
    eta: f64,
) -> (BidProbabilityVector, ProjectionDiagnostics) {
    let k = grid.k();
    let q = p.as_slice();
    let shift = eta * eps;
    let ell = (i + 1..=k).find(|&j| q[j - 1] <= shift + SCAN_SLACK).unwrap_or(k + 1);
    let mut out = q.to_vec();

    if i == 0 {
        for x in out.iter_mut() {
            *x = (*x - shift).max(0.0);
        }
        let diag = ProjectionDiagnostics { m: 0, ell, x: 1.0, pooled_count: 1 };
        return (BidProbabilityVector::trusted(out), diag);
    }

    let cap = caps[i - 1];
    let lift = eta * (dist.inverse(1.0 - q[i - 1]) - grid.bid(i));
    let mut m = i;
    let mut pooled = q[i - 1];
    for j in (1..i).rev() {
        let pj = q[j - 1];
        let candidate = pooled + pj;
        let spread = (i - j + 1) as f64 * pj - candidate;
        if pj <= cap + SCAN_SLACK && spread <= lift + SCAN_SLACK {
            m = j;
            pooled = candidate;
        } else {
            break;
        }
    }
    let count = i - m + 1;
    let x = ((lift + pooled) / count as f64).min(cap);
    for j in m..=i {
        out[j - 1] = x;
    }
    for j in i + 1..=k {
        out[j - 1] = if j < ell { q[j - 1] - shift } else { 0.0 };
    }
    let mut prev = 1.0f64;
    for (j, v) in out.iter_mut().enumerate() {
        *v = v.clamp(0.0, caps[j].min(prev).max(0.0));
        prev = *v;
    }
    let diag = ProjectionDiagnostics { m, ell, x, pooled_count: count };
    (BidProbabilityVector::trusted(out), diag)
}

/// One gradient step on the threshold vector under competing bid b_i, projected onto 𝒱.
pub fn ga_step_thresholds(
    grid: &BidGrid,
    v: &ThresholdVector,
    i: usize,
    eta: f64,
) -> Result<(ThresholdVector, ProjectionDiagnostics)> {
    let eps = grid.epsilon()?;
    grid.check_index(i)?;
    check_eta(eta)?;
    let v = ThresholdVector::new(v.as_slice().to_vec(), grid)?;
    Ok(step_thresholds(grid, eps, &v, i, eta))
}

pub(crate) fn step_thresholds(
    grid: &BidGrid,
    eps: f64,
    v: &ThresholdVector,
    i: usize,
    eta: f64,
) -> (ThresholdVector, ProjectionDiagnostics) {
    let k = grid.k();
    let q = v.as_slice();
    let shift = eta * eps;
    let ell = (i + 1..=k).find(|&j| q[j - 1] >= 1.0 - shift - SCAN_SLACK).unwrap_or(k + 1);
    let mut out = q.to_vec();

    if i == 0 {
        for x in out.iter_mut() {
            *x = (*x + shift).min(1.0);
        }
        let diag = ProjectionDiagnostics { m: 0, ell, x: 0.0, pooled_count: 1 };
        return (ThresholdVector::trusted(out), diag);
    }

    let floor = grid.bid(i);
    let drop = eta * (q[i - 1] - floor);
    let mut m = i;
    let mut pooled = q[i - 1];
    for j in (1..i).rev() {
        let vj = q[j - 1];
        let candidate = pooled + vj;
        let spread = candidate - (i - j + 1) as f64 * vj;
        if vj >= floor - SCAN_SLACK && spread <= drop + SCAN_SLACK {
            m = j;
            pooled = candidate;
        } else {
            break;
        }
    }
    let count = i - m + 1;
    let x = ((pooled - drop) / count as f64).max(floor);
    for j in m..=i {
        out[j - 1] = x;
    }
    for j in i + 1..=k {
        out[j - 1] = if j < ell { q[j - 1] + shift } else { 1.0 };
    }
    let mut prev = 0.0f64;
    for (j, x) in out.iter_mut().enumerate() {
        *x = x.clamp(grid.bid(j + 1).max(prev), 1.0);
        prev = *x;
    }
    let diag = ProjectionDiagnostics { m, ell, x, pooled_count: count };
    (ThresholdVector::trusted(out), diag)
}

/// Order imposed along a chain polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainDirection {
    /// x_1 ≥ x_2 ≥ ...
    Decreasing,
    /// x_1 ≤ x_2 ≤ ...
    Increasing,
}

/// {x : x monotone in `direction`, lower_j ≤ x_j ≤ upper_j}.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPolytope {
    direction: ChainDirection,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ChainPolytope {
    pub fn new(direction: ChainDirection, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Infeasible("bound vectors must be non-empty and of equal length".into()));
        }
        if let Some(j) = (0..lower.len()).find(|&j| !(lower[j] <= upper[j])) {
            return Err(Error::Infeasible(format!("lower bound exceeds upper bound at {}", j + 1)));
        }
        // Some monotone point exists iff every later lower bound fits under every
        // earlier upper bound (decreasing) or vice versa (increasing).
        let n = lower.len();
        match direction {
            ChainDirection::Decreasing => {
                let mut min_hi = f64::INFINITY;
                for j in 0..n {
                    min_hi = min_hi.min(upper[j]);
                    if lower[j] > min_hi {
                        return Err(Error::Infeasible(format!("no decreasing point fits at {}", j + 1)));
                    }
                }
            }
            ChainDirection::Increasing => {
                let mut max_lo = f64::NEG_INFINITY;
                for j in 0..n {
                    max_lo = max_lo.max(lower[j]);
                    if max_lo > upper[j] {
                        return Err(Error::Infeasible(format!("no increasing point fits at {}", j + 1)));
                    }
                }
            }
        }
        Ok(Self { direction, lower, upper })
    }

    /// 𝒫 for (grid, F).
    pub fn probabilities(grid: &BidGrid, dist: &ValueDistribution) -> Self {
        let upper = probability_caps(grid, dist);
        Self::new(ChainDirection::Decreasing, vec![0.0; grid.k()], upper).expect("𝒫 contains 0")
    }

    /// 𝒱 for a grid.
    pub fn thresholds(grid: &BidGrid) -> Self {
        let lower = grid.bids()[1..].to_vec();
        Self::new(ChainDirection::Increasing, lower, vec![1.0; grid.k()]).expect("𝒱 contains 1")
    }

    pub fn direction(&self) -> ChainDirection {
        self.direction
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.lower).zip(&self.upper).all(|((&v, &lo), &hi)| v >= lo - tol && v <= hi + tol)
            && x.windows(2).all(|w| match self.direction {
                ChainDirection::Decreasing => w[1] <= w[0] + tol,
                ChainDirection::Increasing => w[0] <= w[1] + tol,
            })
    }
}

struct Block {
    len: usize,
    sum: f64,
    lo: f64,
    hi: f64,
}

impl Block {
    fn value(&self) -> f64 {
        (self.sum / self.len as f64).clamp(self.lo, self.hi)
    }
}

/// Euclidean projection of q onto a chain polytope.
///
/// Adjacent violators are pooled with each block's level clipped to the
/// intersection of its members' boxes; the result is then certified by
/// constructing KKT multipliers, and rejected if the residual exceeds 1e−10.
pub fn project_oracle(poly: &ChainPolytope, q: &[f64]) -> Result<Vec<f64>> {
    if q.len() != poly.dim() {
        return Err(domain(format!("point of length {} for a {}-dim polytope", q.len(), poly.dim())));
    }
    let violates = |prev: f64, next: f64| match poly.direction {
        ChainDirection::Decreasing => prev < next,
        ChainDirection::Increasing => prev > next,
    };
    let mut blocks: Vec<Block> = Vec::with_capacity(q.len());
    for j in 0..q.len() {
        let mut b = Block { len: 1, sum: q[j], lo: poly.lower[j], hi: poly.upper[j] };
        while let Some(top) = blocks.last() {
            if !violates(top.value(), b.value()) {
                break;
            }
            let top = blocks.pop().unwrap();
            b = Block { len: top.len + b.len, sum: top.sum + b.sum, lo: top.lo.max(b.lo), hi: top.hi.min(b.hi) };
            if b.lo > b.hi {
                return Err(Error::Infeasible("pooled block has empty box".into()));
            }
        }
        blocks.push(b);
    }
    let mut x = Vec::with_capacity(q.len());
    for b in &blocks {
        let v = b.value();
        x.extend(std::iter::repeat_n(v, b.len));
    }
    let residual = kkt_residual(poly, q, &x);
    if residual > KKT_TOL {
        return Err(Error::Infeasible(format!("oracle KKT residual {residual:e} exceeds tolerance")));
    }
    Ok(x)
}

/// Largest violation of the KKT conditions for x = proj(q).
///
/// Primal feasibility is measured directly. Stationarity is checked on each
/// run of equal coordinates by propagating the interval of reachable chain
/// multipliers, where a coordinate sitting on a bound may absorb any amount of
/// the sign its bound allows.
pub fn kkt_residual(poly: &ChainPolytope, q: &[f64], x: &[f64]) -> f64 {
    const EQ: f64 = 1e-12;
    let n = x.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        worst = worst.max(poly.lower[j] - x[j]).max(x[j] - poly.upper[j]);
    }
    let s = match poly.direction {
        ChainDirection::Decreasing => 1.0,
        ChainDirection::Increasing => -1.0,
    };
    for j in 0..n.saturating_sub(1) {
        worst = worst.max(s * (x[j + 1] - x[j]));
    }
    let mut a = 0;
    while a < n {
        let mut b = a;
        while b + 1 < n && (x[b + 1] - x[b]).abs() <= EQ {
            b += 1;
        }
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for k in a..=b {
            let r = s * (x[k] - q[k]);
            let at_hi = (x[k] - poly.upper[k]).abs() <= EQ;
            let at_lo = (x[k] - poly.lower[k]).abs() <= EQ;
            let (up_free, down_free) = if s > 0.0 { (at_hi, at_lo) } else { (at_lo, at_hi) };
            lo = if down_free { f64::NEG_INFINITY } else { lo + r };
            hi = if up_free { f64::INFINITY } else { hi + r };
            if k < b {
                if hi < 0.0 {
                    worst = worst.max(-hi);
                    hi = 0.0;
                }
                lo = lo.max(0.0);
            } else if lo > 0.0 {
                worst = worst.max(lo);
            } else if hi < 0.0 {
                worst = worst.max(-hi);
            }
        }
        a = b + 1;
    }
    worst
}

use rand::Rng;
use serde::Serialize;

use crate::auction::{BidGrid, ValueDistribution};
use crate::error::{domain, invariant, Result};

/// Absolute tolerance for polytope membership; smaller violations are clamped away.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A point p of 𝒫: 1 ≥ p_1 ≥ ... ≥ p_K ≥ 0 with p_j ≤ 1 − F(b_j).
///
/// Only p_1..p_K are stored; `get(0)` is 1 and `get(K + 1)` is 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidProbabilityVector(Vec<f64>);

impl BidProbabilityVector {
    /// Validates `values` against 𝒫 for (grid, F) and clamps drift within tolerance.
    pub fn new(values: Vec<f64>, grid: &BidGrid, dist: &ValueDistribution) -> Result<Self> {
        let k = grid.k();
        if values.len() != k {
            return Err(invariant(format!("expected {k} probabilities, got {}", values.len())));
        }
        let mut out = values;
        let mut prev = 1.0;
        for j in 0..k {
            let x = out[j];
            if !x.is_finite() {
                return Err(invariant(format!("p_{} is not finite", j + 1)));
            }
            let cap = (1.0 - dist.cdf(grid.bid(j + 1))).min(prev);
            if x < -FEASIBILITY_TOL || x > cap + FEASIBILITY_TOL {
                return Err(invariant(format!(
                    "p_{} = {x} outside [0, {cap}] (monotone and capped by 1 − F(b_{}))",
                    j + 1,
                    j + 1
                )));
            }
            out[j] = x.clamp(0.0, cap.max(0.0));
            prev = out[j];
        }
        Ok(Self(out))
    }

    /// The all-zero point (never bid above 0).
    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    /// A random point of 𝒫: sorted uniform draws clamped to the caps, with
    /// some coordinates repeated so that ties and active caps are common.
    pub fn sample<R: Rng + ?Sized>(grid: &BidGrid, dist: &ValueDistribution, rng: &mut R) -> Self {
        let mut draws: Vec<f64> = (0..grid.k()).map(|_| rng.random()).collect();
        draws.sort_by(|a, b| b.total_cmp(a));
        let mut prev = 1.0f64;
        let v = draws
            .into_iter()
            .enumerate()
            .map(|(j, x)| {
                let x = if j > 0 && rng.random_bool(0.25) { prev } else { x };
                let x = x.min(prev).min(1.0 - dist.cdf(grid.bid(j + 1))).max(0.0);
                prev = x;
                x
            })
            .collect();
        Self(v)
    }

    /// Wraps a vector already known to be feasible.
    pub(crate) fn trusted(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// p_j for j in 0..=K+1, including the implicit constants.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else if j > self.0.len() {
            0.0
        } else {
            self.0[j - 1]
        }
    }
}

/// A point v of 𝒱: v_1 ≤ ... ≤ v_K ≤ 1 with v_i ≥ b_i.
///
/// Only v_1..v_K are stored; `get(0)` is 0 and `get(K + 1)` is 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdVector(Vec<f64>);

impl ThresholdVector {
    pub fn new(values: Vec<f64>, grid: &BidGrid) -> Result<Self> {
        let k = grid.k();
        if values.len() != k {
            return Err(invariant(format!("expected {k} thresholds, got {}", values.len())));
        }
        let mut out = values;
        let mut prev = 0.0f64;
        for j in 0..k {
            let x = out[j];
            if !x.is_finite() {
                return Err(invariant(format!("v_{} is not finite", j + 1)));
            }
            let floor = grid.bid(j + 1).max(prev);
            if x < floor - FEASIBILITY_TOL || x > 1.0 + FEASIBILITY_TOL {
                return Err(invariant(format!(
                    "v_{} = {x} outside [{floor}, 1] (monotone and at least b_{})",
                    j + 1,
                    j + 1
                )));
            }
            out[j] = x.clamp(floor, 1.0);
            prev = out[j];
        }
        Ok(Self(out))
    }

    /// The all-one point (never bid above 0).
    pub fn ones(k: usize) -> Self {
        Self(vec![1.0; k])
    }

    /// A random point of 𝒱, with repeated coordinates and saturated tails
    /// mixed in.
    pub fn sample<R: Rng + ?Sized>(grid: &BidGrid, rng: &mut R) -> Self {
        let mut draws: Vec<f64> = (0..grid.k()).map(|_| rng.random()).collect();
        draws.sort_by(f64::total_cmp);
        let mut prev = 0.0f64;
        let v = draws
            .into_iter()
            .enumerate()
            .map(|(j, x)| {
                let x = match rng.random_range(0..8) {
                    0 if j > 0 => prev,
                    1 => 1.0,
                    _ => x,
                };
                let x = x.max(prev).max(grid.bid(j + 1)).min(1.0);
                prev = x;
                x
            })
            .collect();
        Self(v)
    }

    pub(crate) fn trusted(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// v_j for j in 0..=K+1, including the implicit constants.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else if j > self.0.len() {
            1.0
        } else {
            self.0[j - 1]
        }
    }
}

/// A distribution d over competing-bid indices 0..=K.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetingBidDistribution {
    d: Vec<f64>,
    cumulative: Vec<f64>,
}

impl CompetingBidDistribution {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(domain("empty competing-bid distribution"));
        }
        if d.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(domain("competing-bid probabilities must be non-negative"));
        }
        let total: f64 = crate::numeric::neumaier(d.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("competing-bid probabilities sum to {total}, not 1")));
        }
        let mut cumulative = Vec::with_capacity(d.len());
        let mut acc = 0.0;
        for &x in &d {
            acc += x;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self { d, cumulative })
    }

    pub fn point_mass(k: usize, i: usize) -> Result<Self> {
        if i > k {
            return Err(domain(format!("point mass at {i} is off the grid 0..={k}")));
        }
        let mut d = vec![0.0; k + 1];
        d[i] = 1.0;
        Self::new(d)
    }

    pub fn uniform(k: usize) -> Self {
        Self::new(vec![1.0 / (k + 1) as f64; k + 1]).expect("uniform weights sum to one")
    }

    /// Empirical distribution of observed counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(domain("no observations"));
        }
        Self::new(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    /// Probabilities d_0..d_K.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// D_j = Σ_{i ≤ j} d_i, with D_K = 1.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn k(&self) -> usize {
        self.d.len() - 1
    }

    /// Smallest positive entry of d.
    pub fn d_min(&self) -> f64 {
        self.d.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min)
    }

    /// Whether every bid on the grid has positive probability.
    pub fn has_full_support(&self) -> bool {
        self.d.iter().all(|&x| x > 0.0)
    }
}

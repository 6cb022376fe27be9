use crate::error::{domain, Error, Result};

/// The discrete bid set b_0 = 0 < b_1 < ... < b_K ≤ 1.
///
/// A uniform grid has b_i = i·ε. Irregular grids carry arbitrary gaps and are
/// only accepted by the harmonic-step pipeline; everything that relies on a
/// common spacing calls [`BidGrid::epsilon`] and fails for them.
#[derive(Debug, Clone, PartialEq)]
pub struct BidGrid {
    bids: Vec<f64>,
    epsilon: Option<f64>,
}

impl BidGrid {
    pub fn uniform(k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(domain("a bid grid needs K ≥ 1"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(domain(format!("bid spacing must be positive, got {epsilon}")));
        }
        let bids: Vec<f64> = (0..=k).map(|i| i as f64 * epsilon).collect();
        if bids[k] > 1.0 {
            return Err(domain(format!("K·ε = {} exceeds 1", bids[k])));
        }
        Ok(Self { bids, epsilon: Some(epsilon) })
    }

    pub fn irregular(bids: Vec<f64>) -> Result<Self> {
        if bids.len() < 2 {
            return Err(domain("a bid grid needs at least two bids"));
        }
        if bids[0] != 0.0 {
            return Err(domain("the lowest bid must be 0"));
        }
        if bids.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("bids must be strictly increasing"));
        }
        if *bids.last().unwrap() > 1.0 {
            return Err(domain("bids must not exceed 1"));
        }
        Ok(Self { bids, epsilon: None })
    }

    /// Number of non-zero bids.
    pub fn k(&self) -> usize {
        self.bids.len() - 1
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn bid(&self, i: usize) -> f64 {
        self.bids[i]
    }

    pub fn is_uniform(&self) -> bool {
        self.epsilon.is_some()
    }

    /// The common spacing ε; irregular grids are rejected.
    pub fn epsilon(&self) -> Result<f64> {
        self.epsilon
            .ok_or_else(|| Error::Unsupported("operation requires a uniform bid grid".into()))
    }

    /// b_j − b_{j−1} for j ≥ 1 (exactly ε on a uniform grid).
    pub fn gap(&self, j: usize) -> f64 {
        match self.epsilon {
            Some(eps) => eps,
            None => self.bids[j] - self.bids[j - 1],
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i > self.k() {
            Err(Error::BidIndex { index: i, k: self.k() })
        } else {
            Ok(())
        }
    }

    /// Index of a bid value, if it sits on the grid (within 1e−12).
    pub fn index_of(&self, bid: f64) -> Option<usize> {
        self.bids.iter().position(|&b| (b - bid).abs() <= 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_is_exact_multiples() {
        let g = BidGrid::uniform(4, 0.125).unwrap();
        assert_eq!(g.bids(), &[0.0, 0.125, 0.25, 0.375, 0.5]);
        assert_eq!(g.k(), 4);
        assert_eq!(g.index_of(0.25), Some(2));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(BidGrid::uniform(0, 0.1).is_err());
        assert!(BidGrid::uniform(3, 0.5).is_err());
        assert!(BidGrid::uniform(2, 0.0).is_err());
        assert!(BidGrid::irregular(vec![0.1, 0.2]).is_err());
        assert!(BidGrid::irregular(vec![0.0, 0.3, 0.3]).is_err());
    }

    #[test]
    fn irregular_grid_has_no_spacing() {
        let g = BidGrid::irregular(vec![0.0, 0.1, 0.4]).unwrap();
        assert!(g.epsilon().is_err());
        assert!((g.gap(2) - 0.3).abs() < 1e-15);
    }
}

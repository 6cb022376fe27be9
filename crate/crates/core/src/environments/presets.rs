use crate::auction::{BidGrid, ValueDistribution};
use crate::environments::AdversarySpec;
use crate::error::{domain, Result};

/// A grid, a value distribution and a competing-bid process that together
/// form a named scenario.
#[derive(Debug, Clone)]
pub struct Preset {
    pub grid: BidGrid,
    pub dist: ValueDistribution,
    pub adversary: AdversarySpec,
}

/// Bids {0, 1/8, 1/4}, the equal-revenue distribution with tail width δ, and a
/// seller posting reserve 1/4 for the first half of the horizon and 1/8 after.
pub fn example52(delta: f64, horizon: u64) -> Result<Preset> {
    Ok(Preset {
        grid: BidGrid::uniform(2, 0.125)?,
        dist: ValueDistribution::equi_revenue(delta)?,
        adversary: AdversarySpec::DecreasingReserve { switch: horizon / 2, high: 2, low: 1 },
    })
}

/// Bids {0, 1/4}, values uniform on [1/2, 1/2 + 1/T], and h_t uniform on {0, 1/4}.
pub fn lower_bound(horizon: u64) -> Result<Preset> {
    if horizon < 2 {
        return Err(domain("the lower-bound preset needs T ≥ 2"));
    }
    Ok(Preset {
        grid: BidGrid::uniform(1, 0.25)?,
        dist: ValueDistribution::uniform_interval(0.5, 0.5 + 1.0 / horizon as f64)?,
        adversary: AdversarySpec::LowerBoundConstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example52_layout() {
        let p = example52(0.1, 100_000).unwrap();
        assert_eq!(p.grid.bids(), &[0.0, 0.125, 0.25]);
        assert_eq!(p.dist, ValueDistribution::EquiRevenue { delta: 0.1 });
        assert!(matches!(p.adversary, AdversarySpec::DecreasingReserve { switch: 50_000, high: 2, low: 1 }));
    }
}

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::auction::{BidGrid, ValueDistribution};
use crate::environments::rng::{stream, Purpose};
use crate::error::{domain, Error, Result};
use crate::learners::{Learner, LearnerSpec, StrategySnapshot};
use crate::metrics::monopoly_reserve_index;

pub type ReserveFn = Arc<dyn Fn(u64, &[StrategySnapshot]) -> usize + Send + Sync>;

/// How the seller sets the reserve each round.
#[derive(Clone)]
pub enum ReservePolicy {
    Fixed(usize),
    Sequence(Arc<Vec<usize>>),
    /// `high` for t ≤ `switch`, `low` afterwards.
    Decreasing { switch: u64, high: usize, low: usize },
    /// The grid bid maximizing b·(1 − F(b)) for the (common) buyer distribution.
    Monopoly,
    /// Chosen from the buyers' current strategies, never their values.
    Adaptive(ReserveFn),
}

impl fmt::Debug for ReservePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(i) => write!(f, "fixed({i})"),
            Self::Sequence(s) => write!(f, "seq(<{} rounds>)", s.len()),
            Self::Decreasing { switch, high, low } => write!(f, "decreasing({switch},{high},{low})"),
            Self::Monopoly => write!(f, "monopoly"),
            Self::Adaptive(_) => write!(f, "adaptive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// A fresh uniformly random ranking every round.
    UniformPermutation,
    /// Buyer 0 outranks buyer 1, and so on.
    Lexicographic,
}

#[derive(Debug, Clone)]
pub struct BuyerConfig {
    pub dist: ValueDistribution,
    pub learner: LearnerSpec,
}

#[derive(Debug, Clone)]
pub struct MultiBuyerConfig {
    pub grid: BidGrid,
    pub buyers: Vec<BuyerConfig>,
    pub reserve: ReservePolicy,
    pub tie_break: TieBreak,
    /// Keep per-buyer round records (large for long runs).
    pub record_buyers: bool,
}

/// The smallest bid that wins for one buyer, or no winning bid at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EffectiveBid {
    Bid(usize),
    Unwinnable,
}

/// h for buyer `me`: max(reserve, β̄) when `me` outranks every other buyer bidding
/// β̄, else max(reserve, β̄ + ε); unwinnable if that would exceed b_K.
///
/// `bids` holds every buyer's bid (the entry of `me` is ignored) and
/// `ranking` lists buyers from highest to lowest priority.
pub fn effective_competing_bid(
    grid: &BidGrid,
    bids: &[usize],
    reserve: usize,
    ranking: &[usize],
    me: usize,
) -> EffectiveBid {
    let top = bids.iter().enumerate().filter(|&(b, _)| b != me).map(|(_, &x)| x).max();
    let Some(top) = top else {
        return EffectiveBid::Bid(reserve);
    };
    let position = |b: usize| ranking.iter().position(|&x| x == b).unwrap_or(usize::MAX);
    let mine = position(me);
    let outranked = bids.iter().enumerate().any(|(b, &x)| b != me && x == top && position(b) < mine);
    if !outranked {
        EffectiveBid::Bid(reserve.max(top))
    } else if top == grid.k() {
        EffectiveBid::Unwinnable
    } else {
        EffectiveBid::Bid(reserve.max(top + 1))
    }
}

/// Highest bid at or above the reserve, ties to the higher-ranked buyer.
fn winner(bids: &[usize], reserve: usize, ranking: &[usize]) -> Option<usize> {
    ranking.iter().copied().filter(|&b| bids[b] >= reserve).fold(None, |best, b| match best {
        Some(w) if bids[w] >= bids[b] => Some(w),
        _ => Some(b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuyerRound {
    pub value: f64,
    pub bid_index: usize,
    /// None when the round was unwinnable for this buyer.
    pub h_index: Option<usize>,
    pub won: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiBuyerTrace {
    pub seller_revenue: Vec<f64>,
    pub reserves: Vec<usize>,
    pub winners: Vec<Option<usize>>,
    /// Indexed [buyer][round] when recorded.
    pub buyers: Option<Vec<Vec<BuyerRound>>>,
    /// Realized utility per buyer.
    pub buyer_utility: Vec<f64>,
}

impl MultiBuyerTrace {
    pub fn total_revenue(&self) -> f64 {
        crate::numeric::neumaier(self.seller_revenue.iter().copied())
    }
}

fn monopoly(config: &MultiBuyerConfig) -> Result<usize> {
    let first = &config.buyers[0].dist;
    if config.buyers.iter().any(|b| &b.dist != first) {
        return Err(Error::Unsupported("the monopoly reserve needs identically distributed buyers".into()));
    }
    Ok(monopoly_reserve_index(&config.grid, first))
}

/// Sampled-mode repeated auction among learning buyers: values and a ranking
/// are drawn, every learner bids, the highest bid at or above the reserve
/// wins and pays its bid, and each buyer observes its own effective h.
pub fn run_multi_buyer(config: &MultiBuyerConfig, horizon: u64, seed: u64, replication: u32) -> Result<MultiBuyerTrace> {
    let n = config.buyers.len();
    if n < 2 {
        return Err(domain("a multi-buyer auction needs at least two buyers"));
    }
    let grid = &config.grid;
    let mut learners: Vec<Box<dyn Learner>> = config
        .buyers
        .iter()
        .map(|b| b.learner.build(grid, &b.dist, Some(horizon)))
        .collect::<Result<_>>()?;
    let fixed_monopoly = match config.reserve {
        ReservePolicy::Monopoly => Some(monopoly(config)?),
        _ => None,
    };
    let mut value_rngs: Vec<_> = (0..n).map(|b| stream(seed, replication, b as u32, Purpose::Values)).collect();
    let mut rank_rng = stream(seed, replication, 0, Purpose::Ranking);

    let mut out = MultiBuyerTrace {
        seller_revenue: Vec::with_capacity(horizon as usize),
        reserves: Vec::with_capacity(horizon as usize),
        winners: Vec::with_capacity(horizon as usize),
        buyers: config.record_buyers.then(|| vec![Vec::with_capacity(horizon as usize); n]),
        buyer_utility: vec![0.0; n],
    };
    let mut ranking: Vec<usize> = (0..n).collect();
    let mut bids = vec![0usize; n];
    let mut values = vec![0.0f64; n];
    for t in 1..=horizon {
        let reserve = match &config.reserve {
            ReservePolicy::Fixed(r) => *r,
            ReservePolicy::Sequence(s) => {
                *s.get((t - 1) as usize).ok_or(Error::SequenceExhausted { round: t, len: s.len() })?
            }
            ReservePolicy::Decreasing { switch, high, low } => {
                if t <= *switch {
                    *high
                } else {
                    *low
                }
            }
            ReservePolicy::Monopoly => fixed_monopoly.unwrap_or(0),
            ReservePolicy::Adaptive(f) => {
                let snaps: Vec<StrategySnapshot> = learners.iter().map(|l| l.snapshot()).collect();
                f(t, &snaps)
            }
        };
        grid.check_index(reserve)?;
        if config.tie_break == TieBreak::UniformPermutation {
            ranking.shuffle(&mut rank_rng);
        }
        for b in 0..n {
            values[b] = config.buyers[b].dist.sample(&mut value_rngs[b]);
            bids[b] = learners[b].bid_index(values[b])?;
        }
        let w = winner(&bids, reserve, &ranking);
        let revenue = w.map_or(0.0, |w| grid.bid(bids[w]));
        if let Some(w) = w {
            out.buyer_utility[w] += values[w] - grid.bid(bids[w]);
        }
        for b in 0..n {
            let h = effective_competing_bid(grid, &bids, reserve, &ranking, b);
            if let Some(rows) = out.buyers.as_mut() {
                rows[b].push(BuyerRound {
                    value: values[b],
                    bid_index: bids[b],
                    h_index: match h {
                        EffectiveBid::Bid(i) => Some(i),
                        EffectiveBid::Unwinnable => None,
                    },
                    won: w == Some(b),
                });
            }
            if let EffectiveBid::Bid(i) = h {
                learners[b].observe(i)?;
            }
        }
        out.seller_revenue.push(revenue);
        out.reserves.push(reserve);
        out.winners.push(w);
    }
    Ok(out)
}

//! Competing-bid generators, the single-buyer loop and the multi-buyer auction.

mod adversary;
mod multi;
mod presets;
pub mod rng;
mod single;
mod trace;

pub use adversary::{AdaptiveFn, AdversarySpec, History};
pub use multi::{
    effective_competing_bid, run_multi_buyer, BuyerConfig, BuyerRound, EffectiveBid, MultiBuyerConfig,
    MultiBuyerTrace, ReserveFn, ReservePolicy, TieBreak,
};
pub use presets::{example52, lower_bound, Preset};
pub use single::{run_single_buyer, RunOptions};
pub use trace::{RoundTrace, RunMode, SampledRound, Trace, CSV_HEADER, CSV_SAMPLED_HEADER};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learners::StrategySnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Expected utility and revenue in closed form; no values are drawn.
    Exact,
    /// Exact columns plus a realized value, bid and payment per round.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledRound {
    pub value: f64,
    pub bid_index: usize,
    pub win: bool,
    pub payment: f64,
}

/// One auction from the buyer's side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTrace {
    pub t: u64,
    pub h_index: usize,
    pub eta_t: Option<f64>,
    /// Strategy used this round; kept only when requested.
    pub snapshot: Option<StrategySnapshot>,
    pub exp_utility: f64,
    pub exp_revenue: f64,
    /// p_{t,h} · F⁻(1 − p_{t,h}) for probability-space learners.
    pub instance_revenue: Option<f64>,
    /// Robustness potential of the strategy used this round.
    pub potential: Option<f64>,
    /// Slack of the per-step robustness inequality for this round's update.
    pub slack: Option<f64>,
    pub sample: Option<SampledRound>,
    pub benchmark_cum: f64,
    pub regret_cum: f64,
}

pub const CSV_HEADER: &str = "t,h_index,eta_t,exp_utility,exp_revenue,benchmark_cum,regret_cum,potential,slack";
pub const CSV_SAMPLED_HEADER: &str = ",value,bid_index,win,payment";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub mode: RunMode,
    pub rows: Vec<RoundTrace>,
}

impl Trace {
    pub fn horizon(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn h_sequence(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.h_index).collect()
    }

    pub fn total_utility(&self) -> f64 {
        crate::numeric::neumaier(self.rows.iter().map(|r| r.exp_utility))
    }

    pub fn total_revenue(&self) -> f64 {
        crate::numeric::neumaier(self.rows.iter().map(|r| r.exp_revenue))
    }

    pub fn total_instance_revenue(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.instance_revenue).sum()
    }

    /// Smallest robustness slack over the run, if slacks were recorded.
    pub fn min_slack(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.slack).reduce(f64::min)
    }

    pub fn total_payment(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.sample.as_ref().map(|s| s.payment)).sum()
    }

    pub fn regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.regret_cum)
    }

    /// Writes the per-round CSV; floats use the shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let sampled = self.mode == RunMode::Sampled;
        write!(out, "{CSV_HEADER}")?;
        if sampled {
            write!(out, "{CSV_SAMPLED_HEADER}")?;
        }
        writeln!(out)?;
        for r in &self.rows {
            write!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.t,
                r.h_index,
                opt(r.eta_t),
                r.exp_utility,
                r.exp_revenue,
                r.benchmark_cum,
                r.regret_cum,
                opt(r.potential),
                opt(r.slack)
            )?;
            if sampled {
                match &r.sample {
                    Some(s) => write!(out, ",{},{},{},{}", s.value, s.bid_index, u8::from(s.win), s.payment)?,
                    None => write!(out, ",,,,")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

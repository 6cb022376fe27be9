use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bench::config::{parse_config_in, override_key, Environment, ExperimentConfig};
use crate::environments::{
    run_multi_buyer, run_single_buyer, AdversarySpec, BuyerConfig, MultiBuyerConfig, MultiBuyerTrace, RunMode,
    RunOptions, Trace,
};
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;
use crate::metrics::{ic_gap, myerson_revenue, optimal_multi_buyer_revenue, stochastic_regret, SLACK_TOL};

/// Guarantees for the configured grid, distribution and horizon, stored next
/// to the measurements they bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds {
    pub mye: f64,
    pub mye_reserve: f64,
    pub fbar: f64,
    pub k: usize,
    pub horizon: u64,
    /// 2√(2K)·√T, pseudo-regret of Alg 1 with η = √(K/2T).
    pub alg1_regret: f64,
    /// 7·f̄^{1/2}·K·√T, pseudo-regret of Alg 2 with η = 1/√(f̄T).
    pub alg2_regret: f64,
    /// (2f̄/d_min)(1 + ln T), stochastic regret of Alg 1 with harmonic steps.
    pub log_regret: Option<f64>,
    /// √(2KT), revenue above Mye·T extractable from Alg 1.
    pub alg1_revenue_excess: f64,
    /// 2·f̄^{1/2}·K·√T, revenue above Mye·T extractable from Alg 2.
    pub alg2_revenue_excess: f64,
    /// 8K·f̄^{1/2}·√T, utility gain from any misreport under Alg 2.
    pub ic_gap: f64,
    /// Optimal auction revenue per round for the configured buyers.
    pub optimal_multi_buyer_revenue: Option<f64>,
    /// 8nK·f̄^{1/2}·√T, multi-buyer revenue above the optimal auction.
    pub multi_buyer_revenue_excess: Option<f64>,
}

impl Bounds {
    pub fn new(config: &ExperimentConfig) -> Self {
        let (mye, mye_reserve) = myerson_revenue(&config.dist);
        let fbar = config.dist.density_bound();
        let k = config.grid.k();
        let kf = k as f64;
        let t = config.horizon as f64;
        let log_regret = match config.learner.truthful() {
            LearnerSpec::Alg1Harmonic { fbar, dmin } => Some(2.0 * fbar / dmin * (1.0 + t.ln())),
            _ => None,
        };
        let (optimal, multi) = match &config.environment {
            Environment::Multi { buyers, .. } => (
                optimal_multi_buyer_revenue(&vec![config.dist.clone(); *buyers]).ok(),
                Some(8.0 * *buyers as f64 * kf * fbar.sqrt() * t.sqrt()),
            ),
            Environment::Single { .. } => (None, None),
        };
        Self {
            mye,
            mye_reserve,
            fbar,
            k,
            horizon: config.horizon,
            alg1_regret: 2.0 * (2.0 * kf).sqrt() * t.sqrt(),
            alg2_regret: 7.0 * fbar.sqrt() * kf * t.sqrt(),
            log_regret,
            alg1_revenue_excess: (2.0 * kf * t).sqrt(),
            alg2_revenue_excess: 2.0 * fbar.sqrt() * kf * t.sqrt(),
            ic_gap: 8.0 * kf * fbar.sqrt() * t.sqrt(),
            optimal_multi_buyer_revenue: optimal,
            multi_buyer_revenue_excess: multi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub replication: u32,
    /// Against the best fixed strategy for the realized h-sequence.
    pub regret: Option<f64>,
    /// Against the best fixed strategy for the true competing-bid distribution.
    pub stochastic_regret: Option<f64>,
    pub learner_utility: Option<f64>,
    /// Expected seller revenue (single buyer) or realized revenue (multi-buyer).
    pub revenue: f64,
    /// Revenue minus Mye·T, or minus the optimal auction revenue for several buyers.
    pub revenue_excess: Option<f64>,
    pub instance_revenue: Option<f64>,
    pub realized_payment: Option<f64>,
    pub min_slack: Option<f64>,
    pub violations: u64,
    /// Misreporting minus truthful utility on the same competing bids.
    pub ic_gap: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub learner: String,
    pub scenario: String,
    pub dist: String,
    pub bids: Vec<f64>,
    pub horizon: u64,
    pub seed: u64,
    pub mode: RunMode,
    pub reps: u32,
    pub regret: Option<f64>,
    pub regret_se: Option<f64>,
    pub stochastic_regret: Option<f64>,
    pub revenue: f64,
    pub revenue_se: Option<f64>,
    pub revenue_excess: Option<f64>,
    pub ic_gap: Option<f64>,
    pub min_slack: Option<f64>,
    pub violations: u64,
    pub wall_time_s: f64,
    pub bounds: Bounds,
    pub replications: Vec<ReplicationSummary>,
}

impl Summary {
    /// No per-step inequality was violated.
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn standard_error(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    Some((var / xs.len() as f64).sqrt())
}

fn mean_of(reps: &[ReplicationSummary], f: impl Fn(&ReplicationSummary) -> Option<f64>) -> Option<f64> {
    let xs: Option<Vec<f64>> = reps.iter().map(f).collect();
    xs.map(|xs| mean(&xs))
}

/// Worker pool sized by `FPA_BENCH_THREADS` when set.
fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(s) = std::env::var("FPA_BENCH_THREADS") {
        let n: usize = s
            .trim()
            .parse()
            .map_err(|_| Error::Unsupported(format!("FPA_BENCH_THREADS must be a non-negative integer, got `{s}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Unsupported(e.to_string()))
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write(&mut w)?;
    w.flush()?;
    Ok(())
}

fn single_replication(
    config: &ExperimentConfig,
    adversary: &AdversarySpec,
    replication: u32,
    mye: f64,
) -> Result<(ReplicationSummary, Trace)> {
    let start = Instant::now();
    let (grid, dist) = (&config.grid, &config.dist);
    let true_d = match adversary {
        AdversarySpec::Stochastic(d) => Some(d),
        _ => None,
    };
    let options = RunOptions {
        keep_snapshots: true_d.is_some(),
        check_inequalities: config.checks.robustness,
        abort_on_violation: config.checks.abort_on_violation,
        replication,
    };
    let mut learner = config.learner.build(grid, dist, Some(config.horizon))?;
    let trace = run_single_buyer(grid, dist, learner.as_mut(), adversary, config.horizon, config.mode, config.seed, &options)?;
    let stochastic = match true_d {
        Some(d) => stochastic_regret(&trace, grid, dist, d)?.last().copied(),
        None => None,
    };
    let gap = match &config.learner {
        LearnerSpec::Misreport { inner, .. } => {
            let mut truthful = inner.build(grid, dist, Some(config.horizon))?;
            let plain = RunOptions { replication, ..RunOptions::default() };
            let reference =
                run_single_buyer(grid, dist, truthful.as_mut(), adversary, config.horizon, RunMode::Exact, config.seed, &plain)?;
            Some(ic_gap(&reference, &trace)?)
        }
        _ => None,
    };
    let revenue = trace.total_revenue();
    let summary = ReplicationSummary {
        replication,
        regret: Some(trace.regret()),
        stochastic_regret: stochastic,
        learner_utility: Some(trace.total_utility()),
        revenue,
        revenue_excess: Some(revenue - mye * config.horizon as f64),
        instance_revenue: trace.total_instance_revenue(),
        realized_payment: trace.total_payment(),
        min_slack: trace.min_slack(),
        violations: trace.rows.iter().filter(|r| r.slack.is_some_and(|s| s < -SLACK_TOL)).count() as u64,
        ic_gap: gap,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((summary, trace))
}

fn write_seller_csv<W: Write>(trace: &MultiBuyerTrace, out: &mut W) -> Result<()> {
    writeln!(out, "t,reserve,winner,revenue")?;
    for (t, ((r, w), rev)) in trace.reserves.iter().zip(&trace.winners).zip(&trace.seller_revenue).enumerate() {
        let w = w.map(|w| w.to_string()).unwrap_or_default();
        writeln!(out, "{},{r},{w},{rev}", t + 1)?;
    }
    Ok(())
}

fn replication(config: &ExperimentConfig, r: u32, mye: f64, optimal: Option<f64>, out: Option<&Path>) -> Result<ReplicationSummary> {
    match &config.environment {
        Environment::Single { adversary } => {
            let (summary, trace) = single_replication(config, adversary, r, mye)?;
            if let Some(dir) = out {
                write_file(&dir.join(format!("trace_rep{r}.csv")), |w| trace.write_csv(w))?;
            }
            Ok(summary)
        }
        Environment::Multi { buyers, reserve, tie_break } => {
            let start = Instant::now();
            let cfg = MultiBuyerConfig {
                grid: config.grid.clone(),
                buyers: vec![BuyerConfig { dist: config.dist.clone(), learner: config.learner.clone() }; *buyers],
                reserve: reserve.clone(),
                tie_break: *tie_break,
                record_buyers: false,
            };
            let trace = run_multi_buyer(&cfg, config.horizon, config.seed, r)?;
            if let Some(dir) = out {
                write_file(&dir.join(format!("seller_rep{r}.csv")), |w| write_seller_csv(&trace, w))?;
            }
            let revenue = trace.total_revenue();
            Ok(ReplicationSummary {
                replication: r,
                regret: None,
                stochastic_regret: None,
                learner_utility: None,
                revenue,
                revenue_excess: optimal.map(|o| revenue - o * config.horizon as f64),
                instance_revenue: None,
                realized_payment: Some(revenue),
                min_slack: None,
                violations: 0,
                ic_gap: None,
                wall_time_s: start.elapsed().as_secs_f64(),
            })
        }
    }
}

/// Runs every replication (in parallel) and writes `trace_rep{r}.csv` (or
/// `seller_rep{r}.csv` for several buyers) and `summary.json` to `out`.
///
/// With `abort_on_violation` the first violated per-step inequality ends the
/// run with [`Error::Violation`].
pub fn run_experiment(config: &ExperimentConfig, out: Option<&Path>) -> Result<Summary> {
    let start = Instant::now();
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let bounds = Bounds::new(config);
    let (mye, optimal) = (bounds.mye, bounds.optimal_multi_buyer_revenue);
    let reps: Vec<ReplicationSummary> = pool()?.install(|| {
        (0..config.reps).into_par_iter().map(|r| replication(config, r, mye, optimal, out)).collect::<Result<Vec<_>>>()
    })?;

    let revenues: Vec<f64> = reps.iter().map(|r| r.revenue).collect();
    let regrets: Option<Vec<f64>> = reps.iter().map(|r| r.regret).collect();
    let summary = Summary {
        learner: config.learner.to_string(),
        scenario: config.scenario.clone(),
        dist: config.dist.to_string(),
        bids: config.grid.bids().to_vec(),
        horizon: config.horizon,
        seed: config.seed,
        mode: config.mode,
        reps: config.reps,
        regret: regrets.as_deref().map(mean),
        regret_se: regrets.as_deref().and_then(standard_error),
        stochastic_regret: mean_of(&reps, |r| r.stochastic_regret),
        revenue: mean(&revenues),
        revenue_se: standard_error(&revenues),
        revenue_excess: mean_of(&reps, |r| r.revenue_excess),
        ic_gap: mean_of(&reps, |r| r.ic_gap),
        min_slack: reps.iter().filter_map(|r| r.min_slack).reduce(f64::min),
        violations: reps.iter().map(|r| r.violations).sum(),
        wall_time_s: start.elapsed().as_secs_f64(),
        bounds,
        replications: reps,
    };
    if let Some(dir) = out {
        write_file(&dir.join("summary.json"), |w| Ok(serde_json::to_writer_pretty(&mut *w, &summary)?))?;
    }
    Ok(summary)
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: String,
    pub horizon: u64,
    pub regret: Option<f64>,
    pub stochastic_regret: Option<f64>,
    pub revenue: f64,
    pub revenue_excess: Option<f64>,
    pub ic_gap: Option<f64>,
    pub min_slack: Option<f64>,
    pub violations: u64,
    pub wall_time_s: f64,
}

pub const SWEEP_HEADER: &str =
    "param,value,T,regret,stochastic_regret,revenue,revenue_excess,ic_gap,min_slack,violations,wall_time_s";

impl SweepRow {
    pub fn csv(&self) -> String {
        let o = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.param,
            self.value,
            self.horizon,
            o(self.regret),
            o(self.stochastic_regret),
            self.revenue,
            o(self.revenue_excess),
            o(self.ic_gap),
            o(self.min_slack),
            self.violations,
            self.wall_time_s
        )
    }
}

/// Runs the config once per value of `param` (a possibly dotted config key).
/// Each point writes its artifacts to `<out>/<param>=<value>`, and the rows go
/// to `<out>/sweep.csv`.
pub fn run_sweep(text: &str, base: Option<&Path>, param: &str, values: &[String], out: Option<&Path>) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let config = parse_config_in(&override_key(text, param, value)?, base)?;
        let dir = out.map(|o| o.join(format!("{param}={value}")));
        let s = run_experiment(&config, dir.as_deref())?;
        rows.push(SweepRow {
            param: param.to_string(),
            value: value.clone(),
            horizon: s.horizon,
            regret: s.regret,
            stochastic_regret: s.stochastic_regret,
            revenue: s.revenue,
            revenue_excess: s.revenue_excess,
            ic_gap: s.ic_gap,
            min_slack: s.min_slack,
            violations: s.violations,
            wall_time_s: s.wall_time_s,
        });
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_file(&dir.join("sweep.csv"), |w| {
            writeln!(w, "{SWEEP_HEADER}")?;
            for r in &rows {
                writeln!(w, "{}", r.csv())?;
            }
            Ok(())
        })?;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::parse_config;

    const ALG1: &str = r#"
grid = { K = 4, eps = 0.2 }
dist = "uniform"
learner = "alg1"
adversary = "stochastic(0.2,0.2,0.2,0.2,0.2)"
T = 10000
seed = 3
"#;

    #[test]
    fn exact_alg1_run_respects_its_regret_bound() {
        let config = parse_config(ALG1).unwrap();
        let s = run_experiment(&config, None).unwrap();
        assert!((s.bounds.alg1_regret - 565.685).abs() < 1e-3);
        assert!(s.regret.unwrap() <= s.bounds.alg1_regret);
        assert!(s.stochastic_regret.unwrap() <= s.bounds.alg1_regret);
        assert!(s.passed() && s.min_slack.unwrap() >= -SLACK_TOL);
    }

    #[test]
    fn parallel_replications_match_serial_ones() {
        let text = format!("{ALG1}reps = 3\nmode = \"sampled\"\n").replace("T = 10000", "T = 500");
        let config = parse_config(&text).unwrap();
        let parallel = run_experiment(&config, None).unwrap();
        let mu = parallel.bounds.mye;
        for r in 0..3 {
            let (serial, _) = match &config.environment {
                Environment::Single { adversary } => single_replication(&config, adversary, r, mu).unwrap(),
                _ => unreachable!(),
            };
            let p = &parallel.replications[r as usize];
            assert_eq!((p.regret, p.realized_payment, p.revenue), (serial.regret, serial.realized_payment, serial.revenue));
        }
    }

    #[test]
    fn misreport_runs_report_an_ic_gap() {
        let text = "preset = \"example52(delta=0.1, T=2000)\"\nlearner = \"misreport(alg2, map=shade(1/2, 1/4))\"\n";
        let s = run_experiment(&parse_config(text).unwrap(), None).unwrap();
        assert!(s.ic_gap.unwrap() <= s.bounds.ic_gap);
        let text = "preset = \"example52(delta=0.1, T=2000)\"\nlearner = \"misreport(alg2, map=identity)\"\n";
        let s = run_experiment(&parse_config(text).unwrap(), None).unwrap();
        assert_eq!(s.ic_gap, Some(0.0));
    }
}

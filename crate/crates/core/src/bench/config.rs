//! Experiment configuration in TOML.
//!
//! ```toml
//! # preset = "example52(delta=0.1, T=100000)"   # supplies grid, dist and adversary
//! grid = { K = 2, eps = 0.25 }                  # or grid.bids = [0, 0.1, 0.3]
//! dist = "uniform"
//! learner = "alg2(eta=0.01)"
//! adversary = "stochastic(0.5,0.25,0.25)"
//! T = 10000
//! seed = 1
//! mode = "exact"                                 # or "sampled"
//! reps = 1
//! out = "runs/minimal"
//! checks = { robustness = true, abort_on_violation = true }
//! # Multi-buyer runs replace `adversary` with:
//! # buyers = 3
//! # reserve = "monopoly"
//! # tie_break = "uniform"                        # or "lexicographic"
//! ```
//!
//! Every problem found is reported, each with its field and line.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use toml::de::{DeTable, DeValue};
use toml::{Table, Value};

use crate::auction::{BidGrid, ValueDistribution};
use crate::bench::grammar::{self, PresetSpec};
use crate::environments::{example52, lower_bound, AdversarySpec, ReservePolicy, RunMode, TieBreak};
use crate::error::{ConfigError, Error, Result};
use crate::learners::LearnerSpec;

const TOP_KEYS: &[&str] = &[
    "preset", "grid", "dist", "learner", "adversary", "T", "seed", "mode", "reps", "out", "checks", "buyers",
    "reserve", "tie_break",
];
const GRID_KEYS: &[&str] = &["K", "eps", "bids"];
const CHECK_KEYS: &[&str] = &["robustness", "abort_on_violation"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checks {
    /// Record potentials and per-step robustness slack.
    pub robustness: bool,
    /// Stop a run at the first violated inequality.
    pub abort_on_violation: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self { robustness: true, abort_on_violation: true }
    }
}

/// Who sets the highest competing bid.
#[derive(Debug, Clone)]
pub enum Environment {
    Single { adversary: AdversarySpec },
    Multi { buyers: usize, reserve: ReservePolicy, tie_break: TieBreak },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid: BidGrid,
    pub dist: ValueDistribution,
    pub learner: LearnerSpec,
    pub environment: Environment,
    pub horizon: u64,
    pub seed: u64,
    pub mode: RunMode,
    pub reps: u32,
    pub out: Option<PathBuf>,
    pub checks: Checks,
    /// The scenario as written (adversary, reserve or preset), for summaries.
    pub scenario: String,
}

struct Collector {
    lines: HashMap<String, usize>,
    errors: Vec<ConfigError>,
}

impl Collector {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        let line = self.lines.get(field).copied();
        self.errors.push(ConfigError { field: field.to_string(), line, message: message.into() });
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn index_lines(text: &str, prefix: &str, table: &DeTable<'_>, out: &mut HashMap<String, usize>) {
    for (key, value) in table.iter() {
        let path = if prefix.is_empty() { key.get_ref().to_string() } else { format!("{prefix}.{}", key.get_ref()) };
        out.insert(path.clone(), line_of(text, key.span().start));
        if let DeValue::Table(inner) = value.get_ref() {
            index_lines(text, &path, inner, out);
        }
    }
}

fn float_of(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(x) => Ok(*x),
        Value::String(s) => grammar::parse_number(s),
        other => Err(format!("expected a number, found {}", other.type_str())),
    }
}

fn uint_of(v: &Value) -> std::result::Result<u64, String> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        other => Err(format!("expected a non-negative integer, found {other}")),
    }
}

fn str_of(v: &Value) -> std::result::Result<&str, String> {
    v.as_str().ok_or_else(|| format!("expected a string, found {}", v.type_str()))
}

/// Parses a config whose relative paths (outputs, sequence files) are
/// resolved against the current directory.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_in(text, None)
}

/// Reads and parses a config file; relative paths are resolved against its directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_in(&text, path.parent())
}

pub fn parse_config_in(text: &str, base: Option<&Path>) -> Result<ExperimentConfig> {
    let (doc, syntax) = DeTable::parse_recoverable(text);
    if !syntax.is_empty() {
        return Err(Error::Config(
            syntax
                .iter()
                .map(|e| ConfigError {
                    field: "<syntax>".into(),
                    line: e.span().map(|s| line_of(text, s.start)),
                    message: e.message().trim().to_string(),
                })
                .collect(),
        ));
    }
    let mut lines = HashMap::new();
    index_lines(text, "", doc.get_ref(), &mut lines);
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        Error::Config(vec![ConfigError { field: "<syntax>".into(), line: None, message: e.message().to_string() }])
    })?;
    let mut c = Collector { lines, errors: Vec::new() };
    let config = build(&table, base, &mut c);
    match config {
        Some(config) if c.errors.is_empty() => Ok(config),
        _ => Err(Error::Config(c.errors)),
    }
}

fn check_keys(table: &Table, prefix: &str, allowed: &[&str], c: &mut Collector) {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            let field = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
            c.push(&field, format!("unknown key (expected one of {})", allowed.join(", ")));
        }
    }
}

fn get<'a, T>(
    table: &'a Table,
    field: &str,
    c: &mut Collector,
    mut read: impl FnMut(&'a Value) -> std::result::Result<T, String>,
) -> Option<T> {
    let value = table.get(field)?;
    match read(value) {
        Ok(x) => Some(x),
        Err(e) => {
            c.push(field, e);
            None
        }
    }
}

fn parse_grid(value: &Value, c: &mut Collector) -> Option<BidGrid> {
    let Some(grid) = value.as_table() else {
        c.push("grid", "expected a table with K and eps, or bids");
        return None;
    };
    check_keys(grid, "grid", GRID_KEYS, c);
    let mut sub = |key: &str, read: &dyn Fn(&Value) -> std::result::Result<_, String>| -> Option<f64> {
        let v = grid.get(key)?;
        read(v).map_err(|e| c.push(&format!("grid.{key}"), e)).ok()
    };
    let k = sub("K", &|v| uint_of(v).map(|k| k as f64));
    let eps = sub("eps", &float_of);
    let bids = match grid.get("bids") {
        None => None,
        Some(Value::Array(items)) => {
            match items.iter().map(float_of).collect::<std::result::Result<Vec<_>, _>>() {
                Ok(b) => Some(b),
                Err(e) => {
                    c.push("grid.bids", e);
                    return None;
                }
            }
        }
        Some(_) => {
            c.push("grid.bids", "expected an array of bids");
            return None;
        }
    };
    let built = match (k, eps, bids) {
        (Some(k), Some(eps), None) => BidGrid::uniform(k as usize, eps),
        (None, None, Some(bids)) => BidGrid::irregular(bids),
        (None, None, None) if grid.is_empty() => {
            c.push("grid", "needs K and eps, or bids");
            return None;
        }
        (_, _, Some(_)) => {
            c.push("grid.bids", "give either bids or K and eps, not both");
            return None;
        }
        (Some(_), None, None) if !grid.contains_key("eps") => {
            c.push("grid.K", "K needs eps");
            return None;
        }
        (None, Some(_), None) if !grid.contains_key("K") => {
            c.push("grid.eps", "eps needs K");
            return None;
        }
        _ => return None,
    };
    built.map_err(|e| c.push("grid", e.to_string())).ok()
}

fn build(table: &Table, base: Option<&Path>, c: &mut Collector) -> Option<ExperimentConfig> {
    check_keys(table, "", TOP_KEYS, c);

    let preset = get(table, "preset", c, |v| str_of(v).and_then(|s| grammar::parse_preset(s).map(|p| (s, p))));
    let t_key = get(table, "T", c, uint_of);
    if t_key == Some(0) {
        c.push("T", "T must be at least 1");
    }
    let horizon = match (&preset, t_key) {
        (Some((_, PresetSpec::Example52 { horizon: Some(t), .. } | PresetSpec::LowerBound { horizon: Some(t) })), Some(k))
            if *t != k =>
        {
            c.push("T", format!("T = {k} conflicts with the preset's T = {t}"));
            None
        }
        (Some((_, PresetSpec::Example52 { horizon: Some(t), .. } | PresetSpec::LowerBound { horizon: Some(t) })), _) => {
            Some(*t)
        }
        (_, Some(t)) => Some(t),
        (_, None) => {
            c.push("T", "missing horizon T");
            None
        }
    }
    .filter(|&t| t >= 1);

    let buyers = get(table, "buyers", c, uint_of);
    let mut scenario = String::new();
    let (grid, dist, preset_adversary) = match &preset {
        Some((text, spec)) => {
            for key in ["grid", "dist", "adversary"] {
                if table.contains_key(key) {
                    c.push(key, "conflicts with `preset`, which already sets it");
                }
            }
            scenario = text.to_string();
            let t = horizon.unwrap_or(2);
            let built = match spec {
                PresetSpec::Example52 { delta, .. } => example52(*delta, t),
                PresetSpec::LowerBound { .. } => lower_bound(t),
            };
            match built {
                Ok(p) => (Some(p.grid), Some(p.dist), Some(p.adversary)),
                Err(e) => {
                    c.push("preset", e.to_string());
                    (None, None, None)
                }
            }
        }
        None => {
            let grid = match table.get("grid") {
                Some(v) => parse_grid(v, c),
                None => {
                    c.push("grid", "missing grid (or a preset)");
                    None
                }
            };
            let dist = match table.get("dist") {
                Some(_) => get(table, "dist", c, |v| str_of(v).and_then(grammar::parse_dist)),
                None => {
                    c.push("dist", "missing value distribution (or a preset)");
                    None
                }
            };
            (grid, dist, None)
        }
    };

    let learner = match table.get("learner") {
        Some(_) => get(table, "learner", c, |v| str_of(v).and_then(grammar::parse_learner)),
        None => {
            c.push("learner", "missing learner");
            None
        }
    };
    let seed = get(table, "seed", c, uint_of).unwrap_or(0);
    let reps = get(table, "reps", c, uint_of).unwrap_or(1);
    if reps == 0 || reps > u32::MAX as u64 {
        c.push("reps", "reps must be between 1 and 2^32 − 1");
    }
    let mode = get(table, "mode", c, |v| match str_of(v)? {
        "exact" => Ok(RunMode::Exact),
        "sampled" => Ok(RunMode::Sampled),
        other => Err(format!("unknown mode `{other}` (expected exact or sampled)")),
    });
    let out = get(table, "out", c, |v| str_of(v).map(|s| base.map_or_else(|| PathBuf::from(s), |b| b.join(s))));

    let mut checks = Checks::default();
    if let Some(v) = table.get("checks") {
        match v.as_table() {
            Some(t) => {
                check_keys(t, "checks", CHECK_KEYS, c);
                for (key, slot) in [
                    ("robustness", &mut checks.robustness),
                    ("abort_on_violation", &mut checks.abort_on_violation),
                ] {
                    match t.get(key) {
                        Some(Value::Boolean(b)) => *slot = *b,
                        Some(_) => c.push(&format!("checks.{key}"), "expected true or false"),
                        None => {}
                    }
                }
            }
            None => c.push("checks", "expected a table"),
        }
    }

    let (grid, dist, horizon, learner) = (grid?, dist?, horizon?, learner?);
    let environment = match buyers {
        Some(n) => {
            if n < 2 {
                c.push("buyers", "a multi-buyer auction needs at least two buyers");
            }
            if preset.is_some() || table.contains_key("adversary") {
                c.push("buyers", "multi-buyer runs take `reserve`, not an adversary or preset");
            }
            if mode == Some(RunMode::Exact) {
                c.push("mode", "multi-buyer runs are sampled only");
            }
            let reserve = match table.get("reserve") {
                Some(_) => get(table, "reserve", c, |v| {
                    let s = str_of(v)?;
                    scenario = s.to_string();
                    grammar::parse_reserve(s, &grid, horizon, base)
                }),
                None => {
                    c.push("reserve", "multi-buyer runs need a reserve policy");
                    None
                }
            };
            let tie_break = get(table, "tie_break", c, |v| match str_of(v)? {
                "uniform" => Ok(TieBreak::UniformPermutation),
                "lexicographic" => Ok(TieBreak::Lexicographic),
                other => Err(format!("unknown tie_break `{other}` (expected uniform or lexicographic)")),
            })
            .unwrap_or(TieBreak::UniformPermutation);
            Environment::Multi { buyers: n as usize, reserve: reserve?, tie_break }
        }
        None => {
            for key in ["reserve", "tie_break"] {
                if table.contains_key(key) {
                    c.push(key, "only meaningful with `buyers`");
                }
            }
            let adversary = match (preset_adversary, table.get("adversary")) {
                (Some(a), _) => Some(a),
                (None, Some(_)) => get(table, "adversary", c, |v| {
                    let s = str_of(v)?;
                    scenario = s.to_string();
                    grammar::parse_adversary(s, &grid, horizon, base)
                }),
                (None, None) => {
                    c.push("adversary", "missing adversary (or a preset, or buyers)");
                    None
                }
            };
            Environment::Single { adversary: adversary? }
        }
    };
    if let Err(e) = learner.build(&grid, &dist, Some(horizon)) {
        c.push("learner", e.to_string());
    }
    let mode = match (&environment, mode) {
        (_, Some(m)) => m,
        (Environment::Multi { .. }, None) => RunMode::Sampled,
        (Environment::Single { .. }, None) => RunMode::Exact,
    };
    Some(ExperimentConfig {
        grid,
        dist,
        learner,
        environment,
        horizon,
        seed,
        mode,
        reps: reps.clamp(1, u32::MAX as u64) as u32,
        out,
        checks,
        scenario,
    })
}

/// Replaces `key` (dotted for nested tables) in a config text with `value`,
/// read as an integer, a float or else a string.
pub fn override_key(text: &str, key: &str, value: &str) -> Result<String> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| {
        Error::Config(vec![ConfigError { field: "<syntax>".into(), line: None, message: e.message().to_string() }])
    })?;
    let parsed = if let Ok(i) = value.parse::<i64>() {
        Value::Integer(i)
    } else if let Ok(x) = value.parse::<f64>() {
        Value::Float(x)
    } else if let Ok(b) = value.parse::<bool>() {
        Value::Boolean(b)
    } else {
        Value::String(value.to_string())
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut slot = &mut table;
    for part in &parts[..parts.len() - 1] {
        let entry = slot.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
        slot = entry.as_table_mut().ok_or_else(|| {
            Error::Config(vec![ConfigError { field: key.into(), line: None, message: format!("`{part}` is not a table") }])
        })?;
    }
    slot.insert(parts[parts.len() - 1].to_string(), parsed);
    toml::to_string(&table).map_err(|e| Error::Unsupported(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
grid = { K = 2, eps = 0.25 }
dist = "uniform"
learner = "alg2(eta=0.01)"
adversary = "stochastic(0.5,0.25,0.25)"
T = 10000
seed = 1
"#;

    fn errors(text: &str) -> Vec<ConfigError> {
        match parse_config(text) {
            Err(Error::Config(list)) => list,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_is_valid() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.grid.bids(), &[0.0, 0.25, 0.5]);
        assert_eq!(c.horizon, 10_000);
        assert_eq!((c.seed, c.reps, c.mode), (1, 1, RunMode::Exact));
        assert_eq!(c.learner, LearnerSpec::Alg2 { eta: Some(0.01) });
        assert!(matches!(c.environment, Environment::Single { adversary: AdversarySpec::Stochastic(_) }));
    }

    #[test]
    fn dotted_keys_and_sections_work() {
        let text = "learner = \"alg1\"\nT = 5\n[grid]\nK = 1\neps = 0.25\n";
        let c = parse_config(&format!("dist = \"uniform\"\nadversary = \"lowerbound\"\n{text}")).unwrap();
        assert_eq!(c.grid.k(), 1);
    }

    #[test]
    fn every_error_is_reported_with_its_line() {
        let text = "grid = { K = 2, eps = 0.25 }\ndist = \"gauss\"\nlearner = \"alg9\"\nadversary = \"decreasing(5, 7, 0)\"\nT = 100\ncolour = 1\n";
        let errs = errors(text);
        let fields: Vec<&str> = errs.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"dist") && fields.contains(&"learner") && fields.contains(&"colour"), "{errs:?}");
        let colour = errs.iter().find(|e| e.field == "colour").unwrap();
        assert_eq!(colour.line, Some(6));
        assert_eq!(errs.iter().find(|e| e.field == "dist").unwrap().line, Some(2));
    }

    #[test]
    fn adversary_index_off_the_grid_names_the_field() {
        let text = MINIMAL.replace("stochastic(0.5,0.25,0.25)", "decreasing(10, 5, 0)");
        let errs = errors(&text);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].field, "adversary");
        assert_eq!(errs[0].line, Some(5));
        assert!(errs[0].message.contains("outside the grid"));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let errs = errors("T = 10\nlearner = \"alg2\n");
        assert_eq!(errs[0].field, "<syntax>");
        assert_eq!(errs[0].line, Some(2));
    }

    #[test]
    fn preset_expands_and_conflicts_are_caught() {
        let c = parse_config("preset = \"example52(delta=0.1, T=100000)\"\nlearner = \"ftl(buckets=64)\"\n").unwrap();
        assert_eq!(c.grid.bids(), &[0.0, 0.125, 0.25]);
        assert_eq!(c.dist, ValueDistribution::EquiRevenue { delta: 0.1 });
        assert_eq!(c.horizon, 100_000);
        assert!(matches!(
            c.environment,
            Environment::Single { adversary: AdversarySpec::DecreasingReserve { switch: 50_000, high: 2, low: 1 } }
        ));
        let errs = errors("preset = \"example52(delta=0.1, T=1000)\"\nT = 10\ndist = \"uniform\"\nlearner = \"alg2\"\n");
        let fields: Vec<&str> = errs.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"T") && fields.contains(&"dist"), "{errs:?}");
    }

    #[test]
    fn multi_buyer_configs() {
        let text = "grid = { K = 8, eps = 0.125 }\ndist = \"uniform\"\nlearner = \"alg2\"\nT = 100\nbuyers = 3\nreserve = \"monopoly\"\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.mode, RunMode::Sampled);
        assert!(matches!(c.environment, Environment::Multi { buyers: 3, reserve: ReservePolicy::Monopoly, .. }));
        let errs = errors(&format!("{text}mode = \"exact\"\nadversary = \"lowerbound\"\n"));
        assert_eq!(errs.len(), 2, "{errs:?}");
    }

    #[test]
    fn overrides_rewrite_single_keys() {
        let text = override_key(MINIMAL, "T", "1000").unwrap();
        assert_eq!(parse_config(&text).unwrap().horizon, 1000);
        let text = override_key(MINIMAL, "grid.eps", "0.125").unwrap();
        assert_eq!(parse_config(&text).unwrap().grid.bids(), &[0.0, 0.125, 0.25]);
        let text = override_key(MINIMAL, "learner", "alg1(eta=0.1)").unwrap();
        assert_eq!(parse_config(&text).unwrap().learner, LearnerSpec::Alg1 { eta: Some(0.1) });
    }
}

//! Parsers for the one-line specs used in config files:
//!
//! ```text
//! dist       uniform | uniform(a,b) | equirev(delta) | pwl(x0:y0, x1:y1, ...)
//! learner    alg1 | alg1(eta=..) | alg1(harmonic,fbar=..,dmin=..) | alg2(eta=..)
//!            | ftl(buckets=..) | lazyftrl(eta=..) | misreport(<learner>, map=<table>)
//! table      [x0:y0, x1:y1, ...] | shade(from,to)
//! adversary  stochastic(d0,d1,...) | seq(file) | decreasing(tswitch,hi,lo) | lowerbound
//! reserve    fixed(i) | seq(file) | decreasing(tswitch,hi,lo) | monopoly
//! preset     example52(delta=..,T=..) | lowerbound(T=..)
//! ```
//!
//! Numbers may be written as fractions (`1/8`). In `decreasing`, an integer is a
//! grid index and anything else is a bid value that must lie on the grid;
//! `tswitch` may be `T/n`.

use std::path::Path;
use std::sync::Arc;

use crate::auction::{BidGrid, CompetingBidDistribution, ValueDistribution};
use crate::environments::{AdversarySpec, ReservePolicy};
use crate::learners::{LearnerSpec, MisreportMap};

pub type ParseResult<T> = std::result::Result<T, String>;

/// Splits `name(args)` into the name and the raw argument text.
fn call(s: &str) -> ParseResult<(&str, Option<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => {
            if s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                Err(format!("expected a name, found `{s}`"))
            } else {
                Ok((s, None))
            }
        }
        Some(open) => {
            if !s.ends_with(')') {
                return Err(format!("unbalanced parentheses in `{s}`"));
            }
            Ok((s[..open].trim(), Some(&s[open + 1..s.len() - 1])))
        }
    }
}

/// Splits on commas that are not nested inside () or [].
fn split_args(s: &str) -> ParseResult<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("unbalanced brackets in `{s}`"));
                }
            }
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced brackets in `{s}`"));
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    if out.iter().any(|a| a.is_empty()) {
        return Err(format!("empty argument in `{s}`"));
    }
    Ok(out)
}

/// A decimal, exponent or fraction literal.
pub fn parse_number(s: &str) -> ParseResult<f64> {
    let s = s.trim();
    let x = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{s}`"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{s}`"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("bad number `{s}`"))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

fn parse_usize(s: &str) -> ParseResult<usize> {
    s.trim().parse().map_err(|_| format!("expected a non-negative integer, found `{}`", s.trim()))
}

fn key_value(arg: &str) -> ParseResult<(&str, &str)> {
    arg.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| format!("expected key=value, found `{arg}`"))
}

fn no_args(name: &str, args: Option<&str>) -> ParseResult<()> {
    match args {
        None => Ok(()),
        Some(a) if a.trim().is_empty() => Ok(()),
        Some(_) => Err(format!("`{name}` takes no arguments")),
    }
}

pub fn parse_dist(s: &str) -> ParseResult<ValueDistribution> {
    let (name, args) = call(s)?;
    let args = args.map(split_args).transpose()?;
    let err = |e: crate::error::Error| e.to_string();
    match (name, args.as_deref()) {
        ("uniform", None) => Ok(ValueDistribution::Uniform),
        ("uniform", Some([a, b])) => ValueDistribution::uniform_interval(parse_number(a)?, parse_number(b)?).map_err(err),
        ("equirev", Some([delta])) => {
            let delta = match key_value(delta) {
                Ok(("delta", v)) => v,
                _ => delta,
            };
            ValueDistribution::equi_revenue(parse_number(delta)?).map_err(err)
        }
        ("pwl", Some(points)) => {
            let points = points.iter().map(|p| parse_pair(p)).collect::<ParseResult<Vec<_>>>()?;
            ValueDistribution::piecewise_linear(&points).map_err(err)
        }
        ("uniform" | "equirev" | "pwl", _) => Err(format!("wrong arguments for `{name}` in `{}`", s.trim())),
        _ => Err(format!("unknown distribution `{name}` (expected uniform, uniform(a,b), equirev(delta) or pwl(...))")),
    }
}

fn parse_pair(s: &str) -> ParseResult<(f64, f64)> {
    let (x, y) = s.split_once(':').ok_or_else(|| format!("expected x:y, found `{s}`"))?;
    Ok((parse_number(x)?, parse_number(y)?))
}

pub fn parse_map(s: &str) -> ParseResult<MisreportMap> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let knots = split_args(inner)?.into_iter().map(parse_pair).collect::<ParseResult<Vec<_>>>()?;
        return MisreportMap::new(knots).map_err(|e| e.to_string());
    }
    match call(s)? {
        ("identity", args) => no_args("identity", args).map(|_| MisreportMap::identity()),
        ("shade", Some(args)) => match split_args(args)?.as_slice() {
            [from, to] => MisreportMap::shade_above(parse_number(from)?, parse_number(to)?).map_err(|e| e.to_string()),
            _ => Err("shade takes (from,to)".into()),
        },
        _ => Err(format!("expected a knot table [x:y, ...] or shade(from,to), found `{s}`")),
    }
}

pub fn parse_learner(s: &str) -> ParseResult<LearnerSpec> {
    let (name, args) = call(s)?;
    let args = args.map(split_args).transpose()?.unwrap_or_default();
    let eta = |args: &[&str]| -> ParseResult<Option<f64>> {
        match args {
            [] => Ok(None),
            [a] => match key_value(a)? {
                ("eta", v) => {
                    let eta = parse_number(v)?;
                    if eta > 0.0 {
                        Ok(Some(eta))
                    } else {
                        Err(format!("eta must be positive, got {eta}"))
                    }
                }
                (k, _) => Err(format!("unknown parameter `{k}` for `{name}`")),
            },
            _ => Err(format!("`{name}` takes at most eta=...")),
        }
    };
    match name {
        "alg1" if args.first() == Some(&"harmonic") => {
            let (mut fbar, mut dmin) = (None, None);
            for a in &args[1..] {
                match key_value(a)? {
                    ("fbar", v) => fbar = Some(parse_number(v)?),
                    ("dmin", v) => dmin = Some(parse_number(v)?),
                    (k, _) => return Err(format!("unknown parameter `{k}` for alg1(harmonic,...)")),
                }
            }
            match (fbar, dmin) {
                (Some(fbar), Some(dmin)) if fbar > 0.0 && dmin > 0.0 => Ok(LearnerSpec::Alg1Harmonic { fbar, dmin }),
                (Some(_), Some(_)) => Err("fbar and dmin must be positive".into()),
                _ => Err("alg1(harmonic,...) needs fbar=... and dmin=...".into()),
            }
        }
        "alg1" => Ok(LearnerSpec::Alg1 { eta: eta(&args)? }),
        "alg2" => Ok(LearnerSpec::Alg2 { eta: eta(&args)? }),
        "lazyftrl" => Ok(LearnerSpec::LazyFtrl { eta: eta(&args)? }),
        "ftl" => match args.as_slice() {
            [] => Ok(LearnerSpec::ftl()),
            [a] => match key_value(a)? {
                ("buckets", v) => match parse_usize(v)? {
                    0 => Err("buckets must be positive".into()),
                    buckets => Ok(LearnerSpec::Ftl { buckets }),
                },
                (k, _) => Err(format!("unknown parameter `{k}` for ftl")),
            },
            _ => Err("ftl takes at most buckets=...".into()),
        },
        "misreport" => match args.as_slice() {
            [inner, map] => {
                let map = match key_value(map) {
                    Ok(("map", v)) => v,
                    _ => return Err("misreport needs map=<table> as its second argument".into()),
                };
                let inner = parse_learner(inner)?;
                if matches!(inner, LearnerSpec::Misreport { .. }) {
                    return Err("misreport wrappers cannot be nested".into());
                }
                Ok(LearnerSpec::Misreport { inner: Box::new(inner), map: parse_map(map)? })
            }
            _ => Err("misreport takes (<learner>, map=<table>)".into()),
        },
        _ => Err(format!("unknown learner `{name}` (expected alg1, alg2, ftl, lazyftrl or misreport)")),
    }
}

/// A bid position in `decreasing(..)`: integers are indices, other numbers bid values.
fn parse_bid(s: &str, grid: &BidGrid) -> ParseResult<usize> {
    let s = s.trim();
    let index = match s.parse::<usize>() {
        Ok(i) => i,
        Err(_) => {
            let b = parse_number(s)?;
            grid.index_of(b).ok_or_else(|| format!("bid {s} is not on the grid {:?}", grid.bids()))?
        }
    };
    if index > grid.k() {
        return Err(format!("bid index {index} is outside the grid 0..={}", grid.k()));
    }
    Ok(index)
}

fn parse_round(s: &str, horizon: u64) -> ParseResult<u64> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('T') {
        let rest = rest.trim();
        if rest.is_empty() {
            return Ok(horizon);
        }
        let div = rest.strip_prefix('/').ok_or_else(|| format!("expected T or T/n, found `{s}`"))?;
        let n: u64 = div.trim().parse().map_err(|_| format!("expected T/n with integer n, found `{s}`"))?;
        if n == 0 {
            return Err("division by zero".into());
        }
        return Ok(horizon / n);
    }
    s.parse().map_err(|_| format!("expected a round number, found `{s}`"))
}

fn decreasing(args: &[&str], grid: &BidGrid, horizon: u64) -> ParseResult<(u64, usize, usize)> {
    match args {
        [t, hi, lo] => Ok((parse_round(t, horizon)?, parse_bid(hi, grid)?, parse_bid(lo, grid)?)),
        _ => Err("decreasing takes (tswitch,hi,lo)".into()),
    }
}

/// Reads whitespace- or comma-separated indices, relative to `base` when given.
fn read_sequence(file: &str, grid: &BidGrid, base: Option<&Path>) -> ParseResult<Arc<Vec<usize>>> {
    let path = match base {
        Some(dir) => dir.join(file),
        None => Path::new(file).to_path_buf(),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let seq = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| parse_usize(s).and_then(|i| if i <= grid.k() { Ok(i) } else { Err(format!("index {i} is off the grid")) }))
        .collect::<ParseResult<Vec<_>>>()?;
    Ok(Arc::new(seq))
}

pub fn parse_adversary(s: &str, grid: &BidGrid, horizon: u64, base: Option<&Path>) -> ParseResult<AdversarySpec> {
    let (name, args) = call(s)?;
    let list = args.map(split_args).transpose()?.unwrap_or_default();
    match name {
        "stochastic" => {
            let d = list.iter().map(|a| parse_number(a)).collect::<ParseResult<Vec<_>>>()?;
            if d.len() != grid.k() + 1 {
                return Err(format!("stochastic needs {} probabilities (one per grid bid), got {}", grid.k() + 1, d.len()));
            }
            CompetingBidDistribution::new(d).map(AdversarySpec::Stochastic).map_err(|e| e.to_string())
        }
        "seq" => match list.as_slice() {
            [file] => Ok(AdversarySpec::FixedSequence(read_sequence(file, grid, base)?)),
            _ => Err("seq takes one file name".into()),
        },
        "decreasing" => {
            let (switch, high, low) = decreasing(&list, grid, horizon)?;
            Ok(AdversarySpec::DecreasingReserve { switch, high, low })
        }
        "lowerbound" => {
            no_args(name, args)?;
            if grid.k() < 1 {
                return Err("lowerbound needs a grid with at least two bids".into());
            }
            Ok(AdversarySpec::LowerBoundConstruction)
        }
        _ => Err(format!("unknown adversary `{name}` (expected stochastic, seq, decreasing or lowerbound)")),
    }
}

pub fn parse_reserve(s: &str, grid: &BidGrid, horizon: u64, base: Option<&Path>) -> ParseResult<ReservePolicy> {
    let (name, args) = call(s)?;
    let list = args.map(split_args).transpose()?.unwrap_or_default();
    match name {
        "fixed" => match list.as_slice() {
            [b] => Ok(ReservePolicy::Fixed(parse_bid(b, grid)?)),
            _ => Err("fixed takes one bid".into()),
        },
        "seq" => match list.as_slice() {
            [file] => Ok(ReservePolicy::Sequence(read_sequence(file, grid, base)?)),
            _ => Err("seq takes one file name".into()),
        },
        "decreasing" => {
            let (switch, high, low) = decreasing(&list, grid, horizon)?;
            Ok(ReservePolicy::Decreasing { switch, high, low })
        }
        "monopoly" => no_args(name, args).map(|_| ReservePolicy::Monopoly),
        _ => Err(format!("unknown reserve policy `{name}` (expected fixed, seq, decreasing or monopoly)")),
    }
}

/// A named scenario with its own horizon, if it names one.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetSpec {
    Example52 { delta: f64, horizon: Option<u64> },
    LowerBound { horizon: Option<u64> },
}

pub fn parse_preset(s: &str) -> ParseResult<PresetSpec> {
    let (name, args) = call(s)?;
    let list = args.map(split_args).transpose()?.unwrap_or_default();
    let mut delta = None;
    let mut horizon = None;
    for a in &list {
        match key_value(a)? {
            ("delta", v) => delta = Some(parse_number(v)?),
            ("T", v) => horizon = Some(v.parse::<u64>().map_err(|_| format!("T must be a positive integer, found `{v}`"))?),
            (k, _) => return Err(format!("unknown parameter `{k}` for preset `{name}`")),
        }
    }
    match name {
        "example52" => Ok(PresetSpec::Example52 { delta: delta.ok_or("example52 needs delta=...")?, horizon }),
        "lowerbound" if delta.is_none() => Ok(PresetSpec::LowerBound { horizon }),
        "lowerbound" => Err("lowerbound takes only T=...".into()),
        _ => Err(format!("unknown preset `{name}` (expected example52 or lowerbound)")),
    }
}

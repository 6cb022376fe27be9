use serde::Serialize;

use crate::environments::Trace;

/// Seller-side summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub total_revenue: f64,
    pub mye_times_t: f64,
    pub excess: f64,
    /// Theoretical cap on the excess, when the learner has one.
    pub cap: Option<f64>,
    pub potential_series: Vec<f64>,
    pub min_slack: Option<f64>,
    /// max(0, −min slack).
    pub max_violation: f64,
}

pub fn robustness_report(trace: &Trace, mye: f64, cap: Option<f64>) -> RobustnessReport {
    let total_revenue = trace.total_revenue();
    let mye_times_t = mye * trace.horizon() as f64;
    let min_slack = trace.min_slack();
    RobustnessReport {
        total_revenue,
        mye_times_t,
        excess: total_revenue - mye_times_t,
        cap,
        potential_series: trace.rows.iter().filter_map(|r| r.potential).collect(),
        min_slack,
        max_violation: min_slack.map_or(0.0, |s| (-s).max(0.0)),
    }
}

/// Flat `key=value` lines for the scalar fields of a report; arrays are
/// written inline when short and summarized by length otherwise.
pub fn to_key_values<T: Serialize>(report: &T) -> String {
    let value = serde_json::to_value(report).unwrap_or(serde_json::Value::Null);
    let mut out = String::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let text = match v {
                serde_json::Value::Array(items) if items.len() > 32 => format!("<{} values>", items.len()),
                serde_json::Value::Array(items) => {
                    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                }
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}={text}\n"));
        }
    }
    out
}

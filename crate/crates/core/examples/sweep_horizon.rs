//! Drives the config-based harness from code: one config text, several horizons.

use fpa_bench::bench::{run_sweep, SWEEP_HEADER};

const CONFIG: &str = r#"
grid = { K = 4, eps = 0.125 }
dist = "equirev(0.3)"
learner = "alg2"
adversary = "stochastic(0.3,0.1,0.2,0.25,0.15)"
T = 1000
seed = 9
reps = 4
"#;

fn main() -> fpa_bench::Result<()> {
    let values: Vec<String> = ["1000", "10000", "100000"].iter().map(|s| s.to_string()).collect();
    let rows = run_sweep(CONFIG, None, "T", &values, None)?;
    println!("{SWEEP_HEADER}");
    for r in rows {
        println!("{}", r.csv());
    }
    Ok(())
}

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fpa-bench"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fpa-bench-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn run_writes_traces_and_summary() {
    let dir = scratch("run");
    let config = dir.join("c.toml");
    fs::write(
        &config,
        "grid = { K = 2, eps = 0.25 }\ndist = \"uniform\"\nlearner = \"alg2\"\nadversary = \"stochastic(0.5,0.25,0.25)\"\nT = 500\nreps = 2\n",
    )
    .unwrap();
    let out = dir.join("out");
    let res = bin().args(["run", "--config"]).arg(&config).arg("--out").arg(&out).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let printed: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let saved: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(printed, saved);
    assert_eq!(saved["horizon"], 500);
    assert!(out.join("trace_rep0.csv").exists() && out.join("trace_rep1.csv").exists());
}

#[test]
fn config_errors_exit_with_two_and_name_every_field() {
    let dir = scratch("bad");
    let config = dir.join("bad.toml");
    fs::write(&config, "grid = { K = 2, eps = 0.25 }\ndist = \"triangle\"\nlearner = \"alg2\"\nT = 100\ncolour = 3\n").unwrap();
    let res = bin().args(["run", "--config"]).arg(&config).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("dist") && err.contains("line 2"), "{err}");
    assert!(err.contains("colour") && err.contains("line 5"), "{err}");
}

#[test]
fn verify_reports_one_line_per_check() {
    let res = bin().args(["verify", "mirror"]).output().unwrap();
    assert!(res.status.success());
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn sweep_prints_one_row_per_value() {
    let dir = scratch("sweep");
    let config = dir.join("s.toml");
    fs::write(
        &config,
        "grid = { K = 2, eps = 0.25 }\ndist = \"uniform\"\nlearner = \"alg1\"\nadversary = \"lowerbound\"\nT = 100\n",
    )
    .unwrap();
    let res = bin().args(["sweep", "--config"]).arg(&config).args(["--param", "T=100,200,400"]).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8_lossy(&res.stdout);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(3).unwrap().starts_with("T,400,400,"));
}

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tradeclock");

const INSTRUMENT: &str = r#"
[[instruments]]
symbol = "SIM"
tick_value = "0.01"
session_open = "08:00"
session_close = "09:00"
"#;

const SCENARIO: &str = r#"
[scenario]
seed = 5
n_days = 2
session_ms = 3600000
noise_std = 0.3
tick_value = "0.01"
rate_fn = { kind = "constant", rate = 10.0 }
sign_model = { kind = "markov", persistence = 0.8 }
kernel = { kind = "power_law", g0 = 0.5, exponent = 0.5, cutoff = 1000 }
volume_model = { mu = 1.0, sigma = 0.8 }
"#;

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    let text = format!("data_dir = \"data\"\noutput_dir = \"out\"\n{INSTRUMENT}{extra}");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("TRADECLOCK_OUTPUT_DIR").env("RUST_LOG", "warn").output().unwrap()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn simulate_writes_each_day_and_the_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SCENARIO);
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let data = tmp.path().join("data");
    assert_eq!(files_with_ext(&data, "csv"), vec!["SIM_20240102.csv", "SIM_20240103.csv"]);
    assert!(data.join("scenario.json").exists());

    // 10 per second over an hour
    let stdout = String::from_utf8(out.stdout).unwrap();
    for line in stdout.lines() {
        let n: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!((n - 36_000.0).abs() < 4.0 * 36_000f64.sqrt(), "{line}");
    }

    let first = std::fs::read(data.join("SIM_20240102.csv")).unwrap();
    let rerun = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(rerun.status.success());
    assert_eq!(std::fs::read(data.join("SIM_20240102.csv")).unwrap(), first);
}

#[test]
fn analyze_one_day_writes_the_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("[estimators]\nvar_n0 = [1]\ndt0_ms = 60000\n{}", SCENARIO.replace("n_days = 2", "n_days = 1")));
    let cfg = cfg.to_str().unwrap();
    let sim = run(&["simulate", "--config", cfg]);
    assert!(sim.status.success());
    let n_trades: usize = String::from_utf8(sim.stdout).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();

    let out = run(&["analyze", "--config", cfg, "--symbol", "SIM"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("out");
    let csv = files_with_ext(&dir, "csv");
    assert_eq!(csv.len(), 10, "{csv:?}");
    for name in &csv {
        assert!(dir.join(name).with_extension("json").exists(), "no sidecar for {name}");
    }

    let run_json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("SIM_run.json")).unwrap()).unwrap();
    assert_eq!(run_json["provenance"]["n_days"], 1);
    assert_eq!(run_json["tickmetrics"]["days_used"], 1);
    assert!(run_json["null_consistent"].is_boolean());
    assert_eq!(run_json["csv_files"].as_array().unwrap().len(), 10);

    let scatter = std::fs::read_to_string(dir.join("SIM_daily_scatter.csv")).unwrap();
    for row in scatter.lines().skip(1) {
        assert_eq!(row.split(',').nth(1).unwrap().parse::<usize>().unwrap(), n_trades);
    }
    let diag: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("SIM_diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["ingest"]["filter"]["kept_days"], 1);

    // the single-trade variance curve uses every defined return
    let v1 = std::fs::read_to_string(dir.join("SIM_var_fixed_n_N1_bins30.csv")).unwrap();
    let terms: u64 = v1.lines().skip(1).map(|r| r.split(',').nth(3).unwrap().parse::<u64>().unwrap()).sum();
    assert!((terms as usize) < n_trades && terms as usize > n_trades * 99 / 100, "{terms} of {n_trades}");
}

#[test]
fn output_dir_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("[estimators]\ndt0_ms = 60000\n{}", SCENARIO.replace("n_days = 2", "n_days = 1")));
    let cfg = cfg.to_str().unwrap();
    assert!(run(&["simulate", "--config", cfg]).status.success());
    let elsewhere = tmp.path().join("elsewhere");
    let out = Command::new(BIN)
        .args(["analyze", "--config", cfg, "--symbol", "SIM"])
        .env("TRADECLOCK_OUTPUT_DIR", &elsewhere)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(elsewhere.join("SIM_run.json").exists());
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn empty_data_dir_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("data")).unwrap();
    let cfg = write_config(tmp.path(), "");
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--symbol", "SIM"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no usable days"));
}

#[test]
fn short_data_names_the_estimator() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SCENARIO.replace("n_days = 2", "n_days = 1").as_str());
    let cfg = cfg.to_str().unwrap();
    assert!(run(&["simulate", "--config", cfg]).status.success());
    // an hour holds 12 five-minute windows, too few for 30 bins
    let out = run(&["analyze", "--config", cfg, "--symbol", "SIM"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("var_fixed_dt"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--symbol", "SIM"]).status.code(), Some(1));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["analyze", "--config", cfg, "--symbol", "ES"]).status.code(), Some(1));
    // no scenario section to simulate
    assert_eq!(run(&["simulate", "--config", cfg]).status.code(), Some(1));
    std::fs::write(tmp.path().join("bad.toml"), "data_dir = 3\n").unwrap();
    let bad = tmp.path().join("bad.toml");
    assert_eq!(run(&["analyze", "--config", bad.to_str().unwrap(), "--symbol", "SIM"]).status.code(), Some(1));
}

#[test]
fn verify_exit_code_matches_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--quick"]);
    let verdict: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("out/verify/verdict.json")).unwrap()).unwrap();
    let checks = verdict["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 10);
    assert_eq!(checks.iter().filter(|c| c["status"] == "skipped").count(), 3);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with('[')).count(), 10);
    let expected = if verdict["passed"] == true { 0 } else { 3 };
    assert_eq!(out.status.code(), Some(expected));
}

//! End-to-end checks of the command-line contract: flags, file outputs and
//! the exit-code scheme (0 ok, 1 usage, 2 input/data, 3 non-convergence).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_accelerando")
}

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn run_out(args: &[&str], out: &Path) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    full.extend_from_slice(&["--out", out_str]);
    run(&full)
}

fn population_csv() -> PathBuf {
    manifest().join("data").join("world_population.csv")
}

fn config(name: &str) -> PathBuf {
    manifest().join("configs").join(name)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("file exists")).expect("valid json")
}

#[test]
fn fit_population_hyperbolic_in_log_space() {
    let dir = tempfile::tempdir().unwrap();
    let data = population_csv();
    let status = run_out(
        &[
            "fit",
            "--data",
            data.to_str().unwrap(),
            "--model",
            "hyperbolic",
            "--slice=-500:1962",
            "--fit-space",
            "log",
        ],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0), "{status:?}");
    let fit = read_json(&dir.path().join("fit.json"));
    assert_eq!(fit["kind"], "hyperbolic");
    assert_eq!(fit["fit_space"], "log");
    assert!(fit["r_squared"].as_f64().unwrap() >= 0.98);
    let residuals = std::fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert!(residuals.starts_with("t,observed,fitted,residual\n"));
    assert_eq!(residuals.lines().count(), 26); // header + 25 points
}

#[test]
fn fit_noiseless_exponential_converges_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,value\n");
    for i in 0..20 {
        let t = i as f64 * 0.5;
        csv.push_str(&format!("{},{}\n", t, 2.0 * (0.3 * t).exp()));
    }
    let data = dir.path().join("synthetic_exp.csv");
    std::fs::write(&data, csv).unwrap();
    let status = run_out(
        &["fit", "--data", data.to_str().unwrap(), "--model", "exponential"],
        &dir.path().join("out"),
    );
    assert_eq!(status.status.code(), Some(0));
    let fit = read_json(&dir.path().join("out").join("fit.json"));
    assert!(fit["r_squared"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert_eq!(fit["converged"], true);
}

#[test]
fn fit_missing_file_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &["fit", "--data", "/nonexistent/series.csv", "--model", "hyperbolic"],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(2));
    assert!(!status.stderr.is_empty());
}

#[test]
fn fit_unknown_flag_exits_1() {
    let status = run(&["fit", "--data", "x.csv", "--model", "hyperbolic", "--bogus"]);
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn fit_malformed_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "t,value\n1,2\n1,3\n2,4\n").unwrap();
    let status = run_out(
        &["fit", "--data", data.to_str().unwrap(), "--model", "exponential"],
        &dir.path().join("out"),
    );
    assert_eq!(status.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&status.stderr);
    assert!(stderr.contains("increasing"), "stderr: {stderr}");
}

#[test]
fn macro_fast_relaxation_reports_blowup_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &["macro", "--params", "100,1,1", "--init", "1,1,0", "--t-end", "2"],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0), "{status:?}");
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,N,T\n"));
    let comment = csv.lines().last().unwrap();
    let t_est: f64 = comment
        .strip_prefix("# termination=blow_up,t_est=")
        .unwrap_or_else(|| panic!("unexpected comment {comment}"))
        .parse()
        .unwrap();
    assert!((t_est - 1.0).abs() <= 0.01, "t_est = {t_est}");
}

#[test]
fn macro_logistic_converges_to_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &["macro", "--params", "1,1,0", "--init", "0.5,1,0", "--t-end", "50"],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let last_row = csv.lines().rfind(|l| !l.starts_with('#')).unwrap();
    let n: f64 = last_row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((n - 1.0).abs() < 1e-6, "N = {n}");
}

#[test]
fn macro_t_end_before_start_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &["macro", "--params", "1,1,1", "--init", "1,1,10", "--t-end", "5"],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn macro_bad_params_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        vec!["macro", "--params", "1,1", "--init", "1,1,0", "--t-end", "2"],
        vec!["macro", "--params", "1,1,x", "--init", "1,1,0", "--t-end", "2"],
        vec!["macro", "--params", "-1,1,1", "--init", "1,1,0", "--t-end", "2"],
    ] {
        let status = run_out(&bad, dir.path());
        assert_eq!(status.status.code(), Some(1), "{bad:?}");
    }
}

#[test]
fn macro_transition_stabilizes_population() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &[
            "macro",
            "--params",
            "2,1,0.02",
            "--init",
            "0.5,0.6,0",
            "--t-end",
            "40",
            "--transition",
            "12,10,0.6",
        ],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.trim_end().ends_with("# termination=reached_end"));
    let last_row = csv.lines().rfind(|l| !l.starts_with('#')).unwrap();
    let n: f64 = last_row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((n - 10.0).abs() / 10.0 < 1e-3, "N = {n} far from ceiling");
}

#[test]
fn sim_ants_is_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("double_bridge.json");
    for sub in ["a", "b"] {
        let status = run_out(
            &["sim", "ants", "--config", cfg.to_str().unwrap(), "--seed", "42"],
            &dir.path().join(sub),
        );
        assert_eq!(status.status.code(), Some(0), "{status:?}");
    }
    let a = std::fs::read(dir.path().join("a").join("report.json")).unwrap();
    let b = std::fs::read(dir.path().join("b").join("report.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sim_wiki_writes_full_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &[
            "sim",
            "wiki",
            "--config",
            config("wiki_default.json").to_str().unwrap(),
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0));
    let report = read_json(&dir.path().join("report.json"));
    // one point per edit plus the initial state
    assert_eq!(report["trajectory"].as_array().unwrap().len(), 501);
    assert_eq!(report["seed"], 7);
    assert!(report["final"]["mean_quality"].as_f64().unwrap() > 0.5);
}

#[test]
fn sim_config_missing_field_exits_2_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    std::fs::write(&cfg, r#"{"medium": {"nodes": [], "links": []}, "nest": "a"}"#).unwrap();
    let status = run_out(
        &["sim", "ants", "--config", cfg.to_str().unwrap(), "--seed", "1"],
        &dir.path().join("out"),
    );
    assert_eq!(status.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&status.stderr);
    assert!(stderr.contains("food"), "diagnostic must name the field: {stderr}");
}

#[test]
fn sim_rank_emits_sorted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &[
            "sim",
            "rank",
            "--config",
            config("rank_demo.json").to_str().unwrap(),
            "--seed",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("ranking.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("node,score"));
    let scores: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[1] <= w[0]), "not sorted: {scores:?}");
    let total: f64 = scores.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn sim_activate_reports_decayed_values() {
    let dir = tempfile::tempdir().unwrap();
    let status = run_out(
        &[
            "sim",
            "activate",
            "--config",
            config("activate_demo.json").to_str().unwrap(),
            "--seed",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(status.status.code(), Some(0));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["steps"], 3);
    let values = report["values"].as_object().unwrap();
    assert_eq!(values.len(), 5);
    let total: f64 = values.values().map(|v| v.as_f64().unwrap()).sum();
    assert!(total > 0.0 && total < 1.0);
}

#[test]
fn sim_unknown_system_exits_1() {
    let status = run(&["sim", "swarm", "--config", "x.json", "--seed", "1", "--out", "/tmp/x"]);
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let status = run(&["--help"]);
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).contains("fit"));
}

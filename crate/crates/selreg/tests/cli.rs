//! End-to-end tests of the `selreg` binary: exit codes and the documented
//! behavior of the three subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn selreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn run_rejects_invalid_configs_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
  "dataset": {"synthetic": {"n": 40, "coefficients": [1.0, 0.0]}},
  "selector_ensembles": [{"label": "none"}],
  "regressors": []
}"#,
    )
    .unwrap();
    let out = selreg(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("regressor"));

    let missing = selreg(&["run", "--config", "/nonexistent.json", "--out", "/tmp/x"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn run_exits_1_on_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    // A duplicated column makes OLS rank-deficient at fit time; the config
    // itself is valid, so this is a runtime failure.
    let csv = dir.path().join("collinear.csv");
    let mut body = String::from("a,b,y\n");
    for i in 0..30 {
        body.push_str(&format!("{0},{1},{0}\n", i as f64, 2.0 * i as f64));
    }
    std::fs::write(&csv, body).unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        format!(
            r#"{{
  "dataset": {{"csv": "{}", "target": "y"}},
  "cv_folds": 3,
  "selector_ensembles": [{{"label": "none"}}],
  "regressors": [{{"kind": "linear"}}]
}}"#,
            csv.display()
        ),
    )
    .unwrap();
    let out = selreg(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank-deficient"));
}

#[test]
fn run_succeeds_with_global_selection_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
  "dataset": {"synthetic": {"n": 60, "coefficients": [2.0, 0.0, 1.0]}},
  "cv_folds": 3,
  "selector_ensembles": [{"label": "kbest", "techniques": [{"kind": "kbest-f", "k": 2}]}],
  "regressors": [{"kind": "linear"}]
}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = selreg(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--global-selection",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("results.json").exists());
    assert!(out_dir.join("table.md").exists());
    let results = std::fs::read_to_string(out_dir.join("results.json")).unwrap();
    assert!(results.contains("\"seed\": 7"));
}

#[test]
fn generate_writes_csv_and_support_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data.csv");
    let result = selreg(&[
        "generate", "--n", "100", "--d", "8", "--coef", "1,0,2,0,0,0.5,0,0", "--noise", "0.2",
        "--seed", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&result), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 9);

    let sidecar = std::fs::read_to_string(dir.path().join("data.support.json")).unwrap();
    assert!(sidecar.contains("\"support_indices\""));
    assert!(sidecar.contains('0') && sidecar.contains('2') && sidecar.contains('5'));

    // Same seed, same bytes.
    let out2 = dir.path().join("again.csv");
    let rerun = selreg(&[
        "generate", "--n", "100", "--d", "8", "--coef", "1,0,2,0,0,0.5,0,0", "--noise", "0.2",
        "--seed", "3", "--out", out2.to_str().unwrap(),
    ]);
    assert_eq!(code(&rerun), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn generate_validates_flags_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let negative_noise = selreg(&[
        "generate", "--n", "10", "--d", "2", "--coef", "1,0", "--noise", "-1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&negative_noise), 2);

    let mismatched = selreg(&[
        "generate", "--n", "10", "--d", "3", "--coef", "1,0", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&mismatched), 2);
    assert!(!out.exists());
}

fn write_scored_csv(dir: &Path) -> std::path::PathBuf {
    let csv = dir.join("scored.csv");
    let out = selreg(&[
        "generate", "--n", "200", "--d", "3", "--coef", "0,3,0", "--noise", "0.1", "--seed",
        "11", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    csv
}

#[test]
fn score_ranks_the_relevant_feature_first() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_scored_csv(dir.path());
    for method in ["f-regression", "mutual-info", "chi2", "rfe"] {
        let out = selreg(&[
            "score", "--data", csv.to_str().unwrap(), "--target", "y", "--method", method,
        ]);
        assert_eq!(code(&out), 0, "{method}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        let first = stdout.lines().next().unwrap();
        assert!(first.starts_with("x2"), "{method} ranked: {first}");
    }
}

#[test]
fn score_pca_variances_sum_to_one_hundred() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_scored_csv(dir.path());
    let out = selreg(&[
        "score", "--data", csv.to_str().unwrap(), "--target", "y", "--method", "pca",
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let total: f64 = stdout
        .lines()
        .map(|l| l.split_whitespace().last().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 100.0).abs() < 0.01, "total {total}");
}

#[test]
fn score_rejects_unknown_method_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_scored_csv(dir.path());
    let unknown = selreg(&[
        "score", "--data", csv.to_str().unwrap(), "--target", "y", "--method", "bogus",
    ]);
    assert_eq!(code(&unknown), 2);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("expected"));

    let missing = selreg(&[
        "score", "--data", "/no/such.csv", "--target", "y", "--method", "pca",
    ]);
    assert_eq!(code(&missing), 2);

    let bad_target = selreg(&[
        "score", "--data", csv.to_str().unwrap(), "--target", "nope", "--method", "pca",
    ]);
    assert_eq!(code(&bad_target), 2);
}

#[test]
fn usage_errors_from_the_parser_exit_2() {
    let out = selreg(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

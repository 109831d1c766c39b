use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skew-info"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const PLUS: &str = r#"{"dim": 2, "entries": [[0.5, 0], [0.5, 0], [0.5, 0], [0.5, 0]]}"#;
const MIXED: &str = r#"{"dim": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}"#;
const NUMBER: &str = r#"{"dim": 2, "entries": [[0, 0], [0, 0], [0, 0], [1, 0]]}"#;

#[test]
fn skew_of_plus_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "plus.json", PLUS);
    let h = write(dir.path(), "h.json", NUMBER);
    let out = run(&[
        "skew",
        state.to_str().unwrap(),
        h.to_str().unwrap(),
        "--f",
        "WY",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("0.25"));
    let record: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(record["f_id"], "WY");

    let mixed = write(dir.path(), "mixed.json", MIXED);
    for f in ["WY", "SLD"] {
        let out = run(&["skew", mixed.to_str().unwrap(), h.to_str().unwrap(), "--f", f]);
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("0"));
    }
    let out = run(&[
        "skew",
        mixed.to_str().unwrap(),
        h.to_str().unwrap(),
        "--f",
        "WYD",
        "--alpha",
        "0.3",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dim\": 2, \"entries\": [");
    let h = write(dir.path(), "h.json", NUMBER);
    let out = run(&["skew", bad.to_str().unwrap(), h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("parse error"));

    let not_psd = write(
        dir.path(),
        "neg.json",
        r#"{"dim": 2, "entries": [[1.5, 0], [0, 0], [0, 0], [-0.5, 0]]}"#,
    );
    let out = run(&["skew", not_psd.to_str().unwrap(), h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("positive semidefinite"));

    assert_eq!(run(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["fig1", "--m-min", "5", "--m-max", "4"]).status.code(), Some(2));
    assert_eq!(run(&["fig1", "--m-min", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["skew", "missing.json", "missing.json"]).status.code(), Some(2));
}

#[test]
fn table_function_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let samples: Vec<[f64; 2]> = (0..=32).map(|i| i as f64 / 32.0).map(|x| [x, (1.0 + x) / 2.0]).collect();
    let table = serde_json::json!({"name": "sld-table", "f0": 0.5, "samples": samples});
    let table_path = write(dir.path(), "sld.json", &table.to_string());
    let state = write(dir.path(), "plus.json", PLUS);
    let h = write(dir.path(), "h.json", NUMBER);
    let out = run(&[
        "skew",
        state.to_str().unwrap(),
        h.to_str().unwrap(),
        "--f",
        table_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("0.25"));

    let square = serde_json::json!({"name": "square", "f0": 0.1, "samples": [[0.5, 0.25], [1.0, 1.0]]});
    let sq_path = write(dir.path(), "sq.json", &square.to_string());
    let out = run(&["skew", state.to_str().unwrap(), h.to_str().unwrap(), "--f", sq_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig1_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["fig1", "--m-min", "1", "--m-max", "50", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "M,global,local_sum,gap");
    assert_eq!(lines.len(), 51);
    assert_eq!(lines[1], "1,0,0,0");
    assert_eq!(lines[4], "4,0.134288654718,0.169281086117,-0.0349924313989");
    for line in &lines[2..] {
        assert!(line.split(',').nth(3).unwrap().starts_with('-'), "{line}");
    }

    let single = run(&["fig1", "--m-min", "4", "--m-max", "4"]);
    let text = String::from_utf8(single.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn clock_bundled_scenarios() {
    let aberg = scenario("aberg_m4.json");
    let naive: Value = serde_json::from_slice(&run(&["clock", &aberg, "--rule", "naive"]).stdout).unwrap();
    assert_eq!(naive["decision"], true);
    assert_eq!(naive["sound"], false);
    let out = run(&["clock", &aberg, "--rule", "conservative"]);
    assert_eq!(out.status.code(), Some(0));
    let cons: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cons["sound"], true);
    // the file's own rule is naive
    let default: Value = serde_json::from_slice(&run(&["clock", &aberg]).stdout).unwrap();
    assert_eq!(default["decision"], true);

    let product = scenario("product.json");
    for rule in ["naive", "conservative"] {
        let rec: Value = serde_json::from_slice(&run(&["clock", &product, "--rule", rule]).stdout).unwrap();
        assert_eq!(rec["sound"], true, "{rule}");
    }
    assert_eq!(run(&["clock", &aberg, "--rule", "bold"]).status.code(), Some(2));
}

#[test]
fn verify_suites_report_json() {
    let out = run(&["verify", "weak-superadditivity", "--seed", "3", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"][0]["checks"].as_array().unwrap().len(), 3);

    let out = run(&["verify", "monotonicity", "--count", "10"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"][0]["checks"][0]["name"], "non-covariant-fixture-rejected");
    assert_eq!(report["suites"][0]["checks"][0]["passed"], true);
}

#[test]
fn verify_all_default_seed() {
    let out = bin()
        .args(["verify", "all", "--seed", "7", "--count", "200"])
        .env("RAYON_NUM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn aberg_run_and_multipartite() {
    let out = run(&["aberg-run", "--m", "4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((rec["gap"].as_f64().unwrap() + 0.034992431398928).abs() < 1e-12);
    assert!(rec["catalytic_max_diff"].as_f64().unwrap() < 1e-12);

    let out = run(&["multipartite", "--m", "8", "--n-max", "48"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["n_star"], 41);
}

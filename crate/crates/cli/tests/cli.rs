use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EQUALITY_PAIR: &str = r#"{"n": 2, "m": 2, "matrices": [[[0, 1], [1, 0]], [[1, 0], [0, -1]]]}"#;

fn ddvv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddvv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_equality_pair_holds_with_zero_residuals() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.json", EQUALITY_PAIR);
    let out = ddvv(&["check", s(&input), "--which", "both"]);
    assert_eq!(code(&out), 0);
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["residual"].as_f64().unwrap(), 0.0);
        assert_eq!(r["holds"], Value::Bool(true));
    }
}

#[test]
fn check_zero_tuple() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "zero.json", r#"{"n": 3, "m": 2, "matrices": [[[0,0,0],[0,0,0],[0,0,0]], [[0,0,0],[0,0,0],[0,0,0]]]}"#);
    let out = ddvv(&["check", s(&input)]);
    assert_eq!(code(&out), 0);
    for r in json(&out).as_array().unwrap() {
        assert_eq!(r["residual"].as_f64().unwrap(), 0.0);
        assert_eq!(r["holds"], Value::Bool(true));
    }
}

#[test]
fn check_rejects_bad_input_with_exit_1() {
    let dir = TempDir::new().unwrap();
    let asym = write(&dir, "asym.json", r#"{"n": 2, "m": 1, "matrices": [[[1, 5], [0, 1]]]}"#);
    let out = ddvv(&["check", s(&asym)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("matrices[0]"));

    let short = write(&dir, "short.json", r#"{"n": 2, "m": 1, "matrices": [[[1, 0], [0]]]}"#);
    let out = ddvv(&["check", s(&short)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("matrices[0][1]"));

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&ddvv(&["check", s(&missing)])), 1);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&ddvv(&["bogus"])), 1);
    assert_eq!(code(&ddvv(&["sweep", "--n", "3..2"])), 1);
    assert_eq!(code(&ddvv(&["search", "--n", "2", "--m", "2", "--restarts", "0"])), 1);
}

#[test]
fn curvature_umbilical_example() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u.json", r#"{"n": 2, "m": 1, "c": 0, "h": [[[1, 0], [0, 1]]]}"#);
    let out = ddvv(&["curvature", s(&input)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rho"].as_f64().unwrap(), 1.0);
    assert_eq!(v["rho_perp"].as_f64().unwrap(), 0.0);
    assert_eq!(v["mean_h_sq"].as_f64().unwrap(), 1.0);
    assert_eq!(v["conjecture1"]["residual"].as_f64().unwrap(), 0.0);
    assert_eq!(v["forms_agree"], Value::Bool(true));
}

#[test]
fn curvature_flat_and_equality_examples() {
    let dir = TempDir::new().unwrap();
    let flat = write(&dir, "flat.json", r#"{"n": 2, "m": 1, "c": 0, "h": [[[0, 0], [0, 0]]]}"#);
    let out = ddvv(&["curvature", s(&flat), "--c", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["c"].as_f64().unwrap(), 1.0);
    assert_eq!(v["conjecture1"]["residual"].as_f64().unwrap(), 0.0);

    let pair = write(&dir, "pair.json", r#"{"n": 2, "m": 2, "c": 0, "h": [[[0, 1], [1, 0]], [[1, 0], [0, -1]]]}"#);
    let v = json(&ddvv(&["curvature", s(&pair)]));
    assert!(v["conjecture1"]["residual"].as_f64().unwrap().abs() <= 1e-10);
    assert!(v["eq1a"]["residual"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["forms_agree"], Value::Bool(true));
}

#[test]
fn search_reaches_the_bound_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let best = dir.path().join("best.json");
    let out = ddvv(&["search", "--n", "2", "--m", "2", "--restarts", "20", "--out", s(&best)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["lambda"].as_f64().unwrap() - 0.5).abs() <= 1e-4);
    assert_eq!(v["converged"], Value::Bool(true));

    // written tuple re-reads entrywise identical to the reported one
    let written: Value = serde_json::from_str(&fs::read_to_string(&best).unwrap()).unwrap();
    assert_eq!(written, v["tuple"]);
    let check = ddvv(&["check", s(&best)]);
    assert_eq!(code(&check), 0);
}

#[test]
fn search_commuting_case_and_bound_assertions() {
    let v = json(&ddvv(&["search", "--n", "2", "--m", "1", "--restarts", "2"]));
    assert_eq!(v["lambda"].as_f64().unwrap(), 0.0);
    assert_eq!(code(&ddvv(&["search", "--n", "4", "--m", "3", "--restarts", "4", "--assert-bound", "0.5"])), 0);
    assert_eq!(code(&ddvv(&["search", "--n", "2", "--m", "2", "--restarts", "4", "--assert-bound", "0.4"])), 2);
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = ddvv(&["sweep", "--n", "2..4", "--m", "1..3", "--trials", "20", "--seed", "7", "--out", s(path)]);
        assert_eq!(code(&out), 0);
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 3 * 20);
    assert!(text.starts_with("n,m,trial,seed,S,C,ddvv_residual,pprime_residual,holds_P,holds_Pprime\n"));
}

#[test]
fn sweep_single_row_and_json_format() {
    let out = ddvv(&["sweep", "--n", "2..2", "--m", "1..1", "--trials", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with(",true,true"));

    let out = ddvv(&["sweep", "--n", "3", "--m", "2", "--trials", "5", "--format", "json", "--distribution", "traceless_gaussian"]);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r["holds_P"] == Value::Bool(true)));
}

#[test]
fn sweep_unwritable_path_exits_1() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("no_such_dir").join("rows.csv");
    assert_eq!(code(&ddvv(&["sweep", "--trials", "1", "--out", s(&target)])), 1);
}

#[test]
fn lemmas_pass_and_precondition_path_exits_1() {
    let out = ddvv(&["lemmas", "--samples", "10"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["oracles"].as_array().unwrap().len() >= 5);

    let out = ddvv(&["lemmas", "--samples", "10", "--force-x-lt-y"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn conflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conflab")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn bk_of_two_identity_at_unit_curvature() {
    let out = conflab(&["bk", "--n", "4", "--k", "2", "--at", "2I", "--h", "1"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert!((doc["results"]["bk"].as_f64().unwrap() - 7.0).abs() <= 1e-12);
    assert_eq!(doc["pass"], true);
    for key in ["version", "config", "checks", "pass", "wall_ms"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
    assert_eq!(doc["config"]["command"], "bk");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&conflab(&["bk", "--n", "3", "--k", "2", "--at", "2I", "--h", "1"])), 2);
    assert_eq!(code(&conflab(&["bk", "--n", "4", "--k", "2", "--bogus"])), 2);
    assert_eq!(code(&conflab(&["solve-h", "--n", "4", "--k", "2"])), 2);
    assert_eq!(code(&conflab(&["schouten", "--n", "4", "--expr", "1 +", "--x", "0,0,0,1"])), 2);
    assert_eq!(code(&conflab(&["sigma", "--matrix", "1,2"])), 2);
}

#[test]
fn bubble_certificate_reports_c0_seven() {
    let out = conflab(&["bubble-certify", "--n", "4", "--k", "2", "--b", "0.25", "--center", "0,0,0,-1"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert!((doc["results"]["c0"].as_f64().unwrap() - 7.0).abs() <= 1e-8);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn lambda_bar_of_unit_bubble() {
    let out = conflab(&["lambda-bar", "--n", "4", "--b", "1", "--center", "0,0,0,-1"]);
    assert_eq!(code(&out), 0);
    let lb = json_of(&out)["results"]["lambda_bar"].as_f64().unwrap();
    assert!((lb - 2f64.sqrt()).abs() <= 1e-3 * 2f64.sqrt(), "{lb}");
}

#[test]
fn flat_metric_is_outside_the_cone() {
    let out = conflab(&["cone", "--n", "4", "--expr", "1", "--k", "1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["pass"], false);
}

#[test]
fn domain_errors_exit_three() {
    // inversion center off the boundary
    let out = conflab(&["kelvin-check", "--n", "4", "--expr", "1", "--k", "1", "--at", "0,0,0,1"]);
    assert_eq!(code(&out), 3);
    // bubble center above the boundary gives h < 0
    let out = conflab(&["bubble-certify", "--n", "4", "--k", "2", "--b", "1", "--center", "0,0,0,1"]);
    assert_eq!(code(&out), 3);
    // u = 1 has every radius feasible
    let out = conflab(&["lambda-bar", "--n", "4", "--expr", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn suite_is_deterministic() {
    let a = conflab(&["suite", "--seed", "7", "--no-timing"]);
    let b = conflab(&["suite", "--seed", "7", "--no-timing"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let doc = json_of(&a);
    assert!(doc["wall_ms"].is_null());
    assert_eq!(doc["results"]["groups"].as_array().unwrap().len(), 10);
    let timed = json_of(&conflab(&["suite", "--seed", "7"]));
    assert!(timed["wall_ms"].as_f64().unwrap() > 0.0);
}

#[test]
fn constraint_report_is_informational() {
    let out = conflab(&["constraint-report", "--n", "4", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 15);
    assert!(checks.iter().all(|c| c["informational"] == true));
    let e = &doc["results"]["entries"][1];
    assert_eq!((e["lhs_printed"].as_f64(), e["c0_direct"].as_f64(), e["rhs_printed"].as_f64()), (Some(5.5), Some(7.0), Some(5.25)));
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn value_range(rows: &[Vec<f64>]) -> (f64, f64) {
    rows.iter().map(|r| *r.last().unwrap()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[test]
fn emit_grid_boundary_slice_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let out = conflab(&[
        "emit-grid", "--n", "4", "--b", "0.25", "--center", "0,0,0,-1", "--quantity", "u",
        "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["x1", "x2", "x3", "x4", "value"]);
    assert_eq!(rows.len(), 101 * 101);
    assert!(rows.iter().all(|r| r[3] == 0.0));
    // row-major: the second axis varies fastest
    assert_eq!((rows[0][0], rows[0][1], rows[1][0], rows[1][1]), (-2.0, -2.0, -2.0, -1.96));
}

#[test]
fn emit_grid_bk_is_constant_on_a_bubble() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bk.csv");
    let out = conflab(&[
        "emit-grid", "--n", "4", "--b", "0.25", "--center", "0,0,0,-1", "--quantity", "bk-boundary", "--k", "2",
        "--resolution", "21", "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&path);
    let (lo, hi) = value_range(&rows);
    assert!(hi - lo <= 1e-9 && (lo - 7.0).abs() <= 1e-8, "{lo} {hi}");
}

#[test]
fn emit_grid_sigma_matches_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = conflab(&[
        "emit-grid", "--n", "5", "--b", "2", "--center", "0.3,0,0,0,-0.5", "--quantity", "sigma-k", "--k", "2",
        "--axes", "1,5", "--range", "0.01,2", "--resolution", "31", "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&path);
    let (lo, hi) = value_range(&rows);
    // 2^2 binom(5,2)
    assert!((lo - 40.0).abs() <= 1e-8 && (hi - 40.0).abs() <= 1e-8, "{lo} {hi}");
}

#[test]
fn unwritable_paths_exit_three() {
    let out = conflab(&[
        "emit-grid", "--n", "4", "--expr", "1", "--quantity", "u", "--resolution", "3",
        "--csv", "/nonexistent-dir/grid.csv",
    ]);
    assert_eq!(code(&out), 3);
    let out = conflab(&["bk", "--n", "4", "--k", "2", "--at", "2I", "--h", "1", "--out", "/nonexistent-dir/r.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = conflab(&["sigma", "--matrix", "2I", "--dim", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["results"]["sigma"][2], 24.0);
}

#[test]
fn remaining_commands_pass_on_bubbles() {
    let runs: [&[&str]; 6] = [
        &["solve-h", "--n", "5", "--k", "2", "--data", "2I", "--c0", "3"],
        &["solve-h", "--mode", "fixed-m", "--n", "4", "--k", "2", "--data", "2.5I", "--c0", "7"],
        &["solve-family", "--n", "4", "--k", "2", "--c0", "7"],
        &["kelvin-check", "--n", "4", "--b", "0.5", "--center", "0.2,0,0,-1", "--k", "2", "--lambda", "1.3"],
        &["ball-check", "--n", "4", "--k", "2", "--b", "0.25", "--center", "0,0,0,-1"],
        &["schouten", "--n", "4", "--b", "0.25", "--center", "0,0,0,-1", "--x", "0.5,0,0,0"],
    ];
    for args in runs {
        let out = conflab(args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let fam = json_of(&conflab(runs[2]));
    assert!((fam["results"]["h"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
    let fm = json_of(&conflab(runs[1]));
    // M = 2.5 I, h = 1 gives A^T = 2I and B_2 = 7
    assert!((fm["results"]["h"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
}

#[test]
fn threads_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_conflab"))
        .args(["sigma", "--matrix", "1I", "--dim", "2"])
        .env("CONFLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_conflab"))
        .args(["sigma", "--matrix", "1I", "--dim", "2"])
        .env("CONFLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

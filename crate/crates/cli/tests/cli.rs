use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chairman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chairman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = chairman(args);
    assert!(out.status.success());
    write(dir, name, std::str::from_utf8(&out.stdout).unwrap())
}

#[test]
fn round_caplb_reports_tight_bound() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "x.json", &["gen", "caplb", "--m", "5"]);
    let y = dir.path().join("y.json");
    let out = chairman(&["round", "--input", &input, "--output", y.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["prefix_discrepancy"], "7/8");
    assert_eq!(v["bound"], "7/8");
    assert_eq!(v["holds"], true);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(y).unwrap()).unwrap();
    assert_eq!(written["s"], v["assignment"]);
}

#[test]
fn round_missing_file_is_usage_error() {
    let out = chairman(&["round", "--input", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn malformed_input_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"x": [[0.5], [0.6]]}"#);
    assert_eq!(chairman(&["round", "--input", &bad]).status.code(), Some(2));
    let junk = write(dir.path(), "junk.json", "{not json");
    assert_eq!(chairman(&["oracle", "--input", &junk]).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_and_names() {
    assert_eq!(chairman(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(chairman(&["repro", "no-such-claim"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "x.json", &["gen", "caplb", "--m", "3"]);
    assert_eq!(chairman(&["round", "--input", &input, "--rounder", "nope"]).status.code(), Some(2));
}

#[test]
fn csv_input_and_open_times() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "x.csv", "0.5,0.5,0\n0.5,0.5,1\nd,1,1,1\n");
    let a = write(dir.path(), "a.json", r#"{"a": [1, 1]}"#);
    let out = chairman(&["round", "--input", &input, "--open-times", &a]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["m"], 2);
    assert_eq!(v["assignment"][2], 2);
}

#[test]
fn oracle_decision_on_carlb() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "x.json", &["gen", "carlb", "--delta", "0.25"]);
    let v = json_of(&chairman(&["oracle", "--input", &input, "--support"]));
    assert_eq!(v["status"], "exact");
    assert_eq!(v["value"], "3/4");
    let v = json_of(&chairman(&["oracle", "--input", &input, "--support", "--threshold", "0.75"]));
    assert_eq!(v["status"], "no");
    let v = json_of(&chairman(&["oracle", "--input", &input, "--support", "--threshold", "0.75", "--inclusive"]));
    assert_eq!(v["status"], "yes");
    let v = json_of(&chairman(&["oracle", "--input", &input, "--method", "enumerate", "--support"]));
    assert_eq!(v["value"], "3/4");
}

#[test]
fn oracle_node_limit_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "x.json", &["gen", "intlb"]);
    let out = chairman(&["oracle", "--objective", "interval", "--input", &input, "--node-limit", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["status"], "limit_reached");
}

#[test]
fn gen_random_is_seeded() {
    let a = chairman(&["--seed", "3", "gen", "random", "--m", "4", "--n", "10"]);
    let b = chairman(&["--seed", "3", "gen", "random", "--m", "4", "--n", "10"]);
    let c = chairman(&["--seed", "4", "gen", "random", "--m", "4", "--n", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v = json_of(&a);
    assert_eq!(v["m"], 4);
    assert_eq!(v["n"], 10);
}

#[test]
fn schedule_commands() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "inst.json", &["gen", "fifo", "--m", "4", "--delta", "1e-4"]);
    let lp = json_of(&chairman(&["schedule", "solve-lp", "--input", &input]));
    assert_eq!(lp["T"], 1);
    let fifo = json_of(&chairman(&["schedule", "fifo", "--input", &input]));
    assert_eq!(fifo["max_flow_time"], "62491/30000");
    let out = chairman(&["schedule", "approx", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["holds"], true);
    let table = chairman(&["schedule", "compare", "--input", &input]);
    let text = String::from_utf8(table.stdout).unwrap();
    for key in ["T ", "d_max", "fifo_flow_time", "approx_flow_time", "certified_ratio"] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn round_with_closing_times() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(dir.path(), "inst.json", &["gen", "fifo", "--m", "2", "--delta", "0.1"]);
    // Machine 1 closes before the last release.
    let x = write(dir.path(), "x.json", r#"{"x": [[0.5, 0.5, 0], [0.5, 0.5, 1]]}"#);
    let v = json_of(&chairman(&["round", "--input", &x, "--closing-times", &inst]));
    assert_eq!(v["holds"], true);
    assert_eq!(v["assignment"][2], 2);
}

#[test]
fn flow_build_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "x.json", &["--seed", "11", "gen", "random", "--m", "3", "--n", "6"]);
    let edges = String::from_utf8(chairman(&["flow", "build", "--input", &input]).stdout).unwrap();
    assert_eq!(edges.lines().count(), 3 + 3 * 5 + 3 * 6);
    assert!(edges.lines().next().unwrap().starts_with("s i1_6 "));
    let v = json_of(&chairman(&["flow", "verify", "--input", &input]));
    assert_eq!(v["below_d_max"], true);
    assert_eq!(v["path_max"], v["prefix_discrepancy"]);
}

#[test]
fn float_mode_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_to(dir.path(), "x.json", &["--float", "gen", "caplb", "--m", "3"]);
    let out = chairman(&["--float", "--format", "csv", "round", "--input", &input]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("prefix_discrepancy,0.75"));
    assert_eq!(chairman(&["--float", "--tolerance", "0", "gen", "intlb"]).status.code(), Some(2));
}

#[test]
fn repro_claims() {
    let out = chairman(&["repro", "prop1.3", "--m", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["claim"], "caplb");
    assert_eq!(v["status"], "pass");
    assert!(v["per_m"][0]["formula"].as_str().unwrap().contains("1/8"));

    let a = chairman(&["repro", "theorem1", "--m", "2", "--trials", "50"]);
    let b = chairman(&["repro", "rounding-bound", "--m", "2", "--trials", "50"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["per_m"][0]["bound"], "1/2");

    let v = json_of(&chairman(&["--float", "repro", "fig2", "--m", "8"]));
    let fifo = v["per_m"][0]["fifo_max_flow_time"].as_f64().unwrap();
    assert!((fifo - 2.7171).abs() < 1e-3, "{fifo}");
    assert!(v["per_m"][0]["approx_certified_ratio"].as_f64().unwrap() <= 3.0 - 1.0 / 7.0);
}

#[test]
fn repro_inconclusive_is_not_failure() {
    let out = chairman(&["--node-limit", "10", "repro", "intlb"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["status"], "inconclusive");
}

#[test]
fn repro_list() {
    let v = json_of(&chairman(&["repro", "--list"]));
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 7);
    assert!(ids.contains(&"flow-arcs"));
}

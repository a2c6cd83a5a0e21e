use std::path::Path;
use std::process::Command;

fn skewlab(args: &[&str], out: Option<&Path>) -> (i32, String) {
    let mut c = Command::new(env!("CARGO_BIN_EXE_skewlab"));
    c.args(args).env_remove("OUTPUT_DIR");
    if let Some(d) = out {
        c.env("OUTPUT_DIR", d);
    }
    let o = c.output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir).map(|r| r.map(|e| e.unwrap().file_name().into_string().unwrap()).collect()).unwrap_or_default();
    v.sort();
    v
}

#[test]
fn golden_quotients_are_ones() {
    let (code, out) = skewlab(&["cf", "--value", "(sqrt(5)-1)/2", "--depth", "20"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let a = v["evidence"]["a"].as_array().unwrap();
    assert_eq!(a.len(), 20);
    assert!(a.iter().all(|x| x == "1"));
}

#[test]
fn exit_codes() {
    assert_eq!(skewlab(&["cf", "--value", "3/7"], None).0, 2);
    assert_eq!(skewlab(&["cf"], None).0, 2);
    assert_eq!(skewlab(&["reproduce", "nope"], None).0, 2);
    assert_eq!(skewlab(&["partition", "--alpha", "sqrt2, sqrt2+1", "--ell", "3"], None).0, 3);
    assert_eq!(skewlab(&["--bits", "64", "cf", "--value", "golden", "--depth", "200"], None).0, 4);
    assert_eq!(skewlab(&["--bits", "32", "cf", "--value", "golden"], None).0, 2);
}

#[test]
fn invalid_flag_leaves_no_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, _) = skewlab(&["partition", "--alpha", "sqrt2, e", "--ell", "5", "--svg", "fig.svg", "--frobnicate"], Some(&out));
    assert_ne!(code, 0);
    assert!(files(&out).is_empty());
}

#[test]
fn figure_bytes_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = vec![];
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let (code, _) = skewlab(&["partition", "--alpha", "sqrt2, e", "--ell", "20", "--svg", "fig.svg", "--json", "cells.json"], Some(&out));
        assert_eq!(code, 0);
        assert_eq!(files(&out), ["cells.json", "fig.svg", "partition-cells.csv", "partition.json"]);
        let svg = std::fs::read(out.join("fig.svg")).unwrap();
        assert_eq!(String::from_utf8_lossy(&svg).matches("<polygon").count(), 1180);
        seen.push([svg, std::fs::read(out.join("partition-cells.csv")).unwrap(), std::fs::read(out.join("partition.json")).unwrap()]);
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn config_file_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "conjugation", "seed": 9, "params": {"samples": 500, "fiber": "sqrt5-2"}}"#).unwrap();
    let (code, out) = skewlab(&["--config", cfg.to_str().unwrap(), "conjugation", "--samples", "700"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["params"]["samples"], 700);
    assert_eq!(v["evidence"]["samples"], 700);
    assert_eq!(v["verdict"], "pass");

    std::fs::write(&cfg, r#"{"params": {"sampels": 5}}"#).unwrap();
    assert_eq!(skewlab(&["--config", cfg.to_str().unwrap(), "conjugation"], None).0, 2);
    std::fs::write(&cfg, r#"{"command": "weyl"}"#).unwrap();
    assert_eq!(skewlab(&["--config", cfg.to_str().unwrap(), "conjugation"], None).0, 2);
}

#[test]
fn seeded_probes_are_deterministic() {
    let args = ["--seed", "4", "recur", "--alpha", "sqrt2-1", "--map", "psi", "--n", "20000", "--points", "8"];
    let (c1, a) = skewlab(&args, None);
    let (c2, b) = skewlab(&args, None);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn reproduce_writes_summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = skewlab(&["reproduce", "triangle-identity"], Some(dir.path()));
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "pass");
    let csv = std::fs::read_to_string(dir.path().join("reproduce-summary.csv")).unwrap();
    assert!(csv.starts_with("criterion,title,verdict,measured,elapsed_s\r\n3,triangle identity,PASS,"));
}

#[test]
fn reproduce_failure_exits_five() {
    let (code, out) = skewlab(&["reproduce", "weyl"], None);
    assert_eq!(code, 5);
    assert!(out.contains("\"verdict\": \"fail\""));
}

#[test]
fn bench_zero_size_is_empty() {
    let (code, out) = skewlab(&["bench", "arrangement", "--size", "0"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["evidence"]["ops_per_s"], 0.0);
    assert_eq!(skewlab(&["bench", "fft"], None).0, 2);
}

#[test]
fn sums_table_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = skewlab(&["sums", "--alpha", "sqrt2-1, sqrt3-1", "--map", "xy_quarter; triangle0", "--schedule", "10,100,1000", "--grid", "64"], Some(dir.path()));
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("sums-series.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,phi1,phi2,sup,boundary_hits");
    assert_eq!(lines.len(), 4);
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detshallow")).args(args).output().expect("binary runs")
}

fn gen(dir: &Path, class: &str, n: &str, seed: &str) -> String {
    let out = dir.join(format!("{class}{n}_{seed}.txt"));
    let o = bin(&["gen", "--class", class, "--n", n, "--delta", "0.3", "--seed", seed, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn hermitian_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let f = gen(dir.path(), "H", "6", "4");
    let o = bin(&["approx", "--matrix", &f, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["estimate", "oracle", "rel_error", "k", "t", "theta", "m_sequence", "r", "precision_bits", "circuit", "bitwidth", "schedule", "exact_fallback", "wall_time_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["rel_error"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["t"], 10);
}

#[test]
fn paper_mode_reports_wide_budget() {
    let dir = tempfile::tempdir().unwrap();
    let f = gen(dir.path(), "H", "4", "1");
    let o = bin(&["approx", "--matrix", &f, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3", "--param-mode", "paper", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    // k exceeds u64 and is written as a decimal string
    assert!(v["k"].as_str().unwrap().parse::<u128>().unwrap() > u64::MAX as u128);
    assert_eq!(v["exact_fallback"], true);
    assert_eq!(v["rel_error"].as_f64().unwrap(), 0.0);
}

#[test]
fn hurwitz_with_circuit_metrics_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let f = gen(dir.path(), "S", "3", "1");
    let c = dir.path().join("c.txt");
    let o = bin(&[
        "approx", "--matrix", &f, "--mode", "hurwitz", "--delta", "0.3", "--epsilon", "1e-3", "--verify", "--circuit-metrics",
        "--dump-schedule", "--dump-circuit", c.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let circ = &v["circuit"];
    assert!(circ["mult_depth_post"].as_u64().unwrap() <= circ["mult_depth_pre"].as_u64().unwrap());
    assert!(String::from_utf8_lossy(&o.stderr).lines().count() >= 8);
    let text = std::fs::read_to_string(&c).unwrap();
    assert!(detshallow::circuit::Circuit::from_text(&text).is_ok());
}

#[test]
fn abs_mode_and_text_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = gen(dir.path(), "psd", "5", "2");
    let o = bin(&["approx", "--matrix", &f, "--mode", "abs", "--delta", "0.3", "--epsilon", "1e-3", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["rel_error"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["v"].as_array().unwrap().len(), 5);
    let o = bin(&["approx", "--matrix", &f, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3", "--report", "text"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("exact_fallback: true"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "S", "3", "3");
    // class mismatch
    let o = bin(&["approx", "--matrix", &s, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    // uncertified input
    let plain = dir.path().join("plain.txt");
    std::fs::write(&plain, "2\n1 0 0 0\n0 0 1/2 0\n").unwrap();
    let p = plain.to_str().unwrap();
    let o = bin(&["approx", "--matrix", p, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["approx", "--matrix", p, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3", "--unsafe", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["estimate"]["re"], 0.5);
    let o = bin(&["approx", "--matrix", p, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3", "--unsafe", "--m0", "0"]);
    assert_eq!(o.status.code(), Some(2));
    // unscaled decay from m0 = 100 runs out before the last segment
    let o = bin(&[
        "approx", "--matrix", p, "--mode", "hermitian", "--delta", "0.3", "--epsilon", "1e-3", "--unsafe", "--param-mode", "paper", "--m0", "100",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

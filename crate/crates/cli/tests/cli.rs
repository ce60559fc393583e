use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_univalent"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("univalent-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn constants_to_file() {
    let path = scratch("c.json");
    let out = run(&["constants", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let r0 = doc["result"]["constants"]["r0"].as_f64().unwrap();
    assert!((r0 - 0.329423).abs() < 1e-5);
    for (_, dev) in doc["result"]["deviations"].as_object().unwrap() {
        assert!(dev.as_f64().unwrap() <= 1e-5);
    }
    assert_eq!(doc["config"]["truncation_order"], 256);
    assert_eq!(doc["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn constants_at_loose_tolerance() {
    let doc = json(&run(&["constants", "--tol", "1e-6"]));
    assert!((doc["result"]["constants"]["r0"].as_f64().unwrap() - 0.329423).abs() < 1e-5);
    assert!((doc["config"]["solver_tol"].as_f64().unwrap() / 1e-6 - 1.0).abs() < 1e-12);
}

#[test]
fn output_is_deterministic() {
    let args = ["criteria", "--function", "catalog:phi", "--alpha", "0.5"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = run(&["constants"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"beta0\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{number}");
}

#[test]
fn norms_of_catalog_functions() {
    let s = json(&run(&["norm", "--what", "S", "--function", "catalog:koebe"]));
    assert!((s["result"]["value"].as_f64().unwrap() - 6.0).abs() < 1e-3);
    let t = json(&run(&["norm", "--what", "T", "--function", "catalog:phi"]));
    assert!((t["result"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    let i = json(&run(&["norm", "--what", "S", "--function", "catalog:phi", "--transform", "I", "--alpha", "1"]));
    assert!((i["result"]["value"].as_f64().unwrap() - 6.0).abs() < 1e-3);
}

#[test]
fn transform_matches_series() {
    let doc = json(&run(&["transform", "--op", "J", "--alpha", "0.5", "--function", "catalog:koebe", "--eval", "0.5"]));
    let (re, im) = pair(&doc["result"]["value"]);
    // J_{1/2}[K](z) = -log(1 - z)
    assert!((re - 2f64.ln()).abs() < 1e-12 && im.abs() < 1e-12);
    assert!(doc["result"]["difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn criteria_for_phi() {
    let doc = json(&run(&["criteria", "--function", "catalog:phi", "--alpha", "1"]));
    let items = doc["result"]["items"].as_array().unwrap();
    let verdict = |id: &str| items.iter().find(|i| i["id"] == id).unwrap()["verdict"].clone();
    assert_eq!(verdict("noshiro_warschawski"), "pass");
    assert_eq!(verdict("becker_univalence"), "fail");
}

#[test]
fn extension_of_a_strict_sector_map() {
    let path = scratch("g.csv");
    let doc = json(&run(&[
        "extend", "--function", "expr:z/(1-0.5*z)", "--grid", "10x36", "--rout", "3", "--out", path.to_str().unwrap(),
    ]));
    let s = &doc["result"];
    assert_eq!(s["failures"], 0);
    assert!(s["max_mu"].as_f64().unwrap() <= s["k_bound"].as_f64().unwrap() + 0.05);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,u,v,mu_abs,t,theta,ok"));
    assert_eq!(lines.count(), 360);
    assert!(path.with_extension("json").exists());
}

#[test]
fn extension_of_spiral_koebe_reports_solver_failure() {
    // the image is the plane minus a spiral slit, so flow lines from most
    // interior points never meet the boundary curve
    let path = scratch("s.csv");
    let out = run(&[
        "extend", "--function", "catalog:spiral-koebe", "--lambda", "pi/4", "--grid", "5x18", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extension cells failed"));
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("x,y,u,v,mu_abs,t,theta,ok"));
}

#[test]
fn subordination_of_phi_over_z() {
    let doc = json(&run(&["subord", "--function", "expr:(-z-2*log(1-z))/z"]));
    assert_eq!(doc["result"]["subordinate"], true);
    let doc = json(&run(&["subord", "--function", "expr:50+z"]));
    assert_eq!(doc["result"]["subordinate"], false);
}

#[test]
fn selftest_subset() {
    let out = run(&["selftest", "--only", "6,9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["norm", "--what", "T", "--function", "expr:z/("]).status.code(), Some(4));
    assert_eq!(run(&["norm", "--what", "T", "--function", "catalog:nope"]).status.code(), Some(4));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(run(&["transform", "--op", "J", "--function", "catalog:koebe", "--eval", "1.5"]).status.code(), Some(3));
    assert_eq!(run(&["norm", "--what", "T", "--function", "expr:1+z"]).status.code(), Some(0));
    let cfg = scratch("bad.json");
    std::fs::write(&cfg, r#"{"grid": {"r_max": 1.5}}"#).unwrap();
    assert_eq!(run(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn config_file_is_echoed() {
    let cfg = scratch("cfg.json");
    std::fs::write(&cfg, r#"{"grid": {"n_radial": 40, "n_angular": 80, "r_max": 0.99}, "seed": 7}"#).unwrap();
    let doc = json(&run(&["norm", "--what", "T", "--function", "catalog:phi", "--config", cfg.to_str().unwrap()]));
    assert_eq!(doc["config"]["grid"]["n_radial"], 40);
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["result"]["grid"]["r_max"].as_f64(), Some(0.99));
}

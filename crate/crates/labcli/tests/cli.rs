use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> (Output, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
        .current_dir(dir)
        .env("BERGMAN_LAB_CACHE", dir.join("cache"))
        .args(args)
        .output()
        .expect("binary runs");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out, v)
}

fn output_file(v: &Value, dir: &Path, suffix: &str) -> std::path::PathBuf {
    let name = v["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .find(|s| s.ends_with(suffix))
        .unwrap_or_else(|| panic!("no {suffix} in {}", v["outputs"]));
    dir.join(name)
}

const THM42: [&str; 10] = ["criteria", "thm42", "--weight", "std:alpha=0", "--measure", "star:g=poly:0,1,n=1,k=0", "--p", "0.6", "--r", "1"];

#[test]
fn toeplitz_criterion_report() {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run(dir.path(), &THM42);
    assert!(out.status.success());
    assert_eq!(v["result"]["verdict"], "holds");
    assert_eq!(v["config"]["params"]["measure"], "star:g=poly:0,1,n=1,k=0");
    let report = std::fs::read_to_string(output_file(&v, dir.path(), "report.json")).unwrap();
    assert!(report.contains("\"criterion\": \"thm42\""));
    let csv = std::fs::read_to_string(output_file(&v, dir.path(), "profile.csv")).unwrap();
    assert!(csv.starts_with("section,index,re,im,value"));
}

#[test]
fn cache_hits_and_keys() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = run(dir.path(), &THM42);
    let first = std::fs::read(output_file(&a, dir.path(), "report.json")).unwrap();
    let (_, b) = run(dir.path(), &THM42);
    assert_eq!(a["cached"], false);
    assert_eq!(b["cached"], true);
    assert_eq!(a["cache_key"], b["cache_key"]);
    assert_eq!(first, std::fs::read(output_file(&b, dir.path(), "report.json")).unwrap());
    let mut other = THM42.to_vec();
    other[7] = "0.61";
    let (_, c) = run(dir.path(), &other);
    assert_ne!(a["cache_key"], c["cache_key"]);
    // recomputation is byte-identical to the cached report
    let mut fresh = THM42.to_vec();
    fresh.push("--no-cache");
    let (_, d) = run(dir.path(), &fresh);
    assert_eq!(d["cached"], false);
    assert_eq!(first, std::fs::read(output_file(&d, dir.path(), "report.json")).unwrap());
}

#[test]
fn volterra_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["operator", "volterra", "--g", "poly:0,1", "--weight", "std:alpha=0", "--n", "1", "--k", "0", "--N", "128", "--svd", "--binary"];
    let (out, v) = run(dir.path(), &args);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(output_file(&v, dir.path(), "spectrum.csv")).unwrap();
    let mut count = 0;
    for (j, line) in csv.lines().skip(1).enumerate() {
        let s: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((s - 1.0 / (((j + 1) * (j + 2)) as f64).sqrt()).abs() < 1e-12);
        count += 1;
    }
    assert_eq!(count, 129);
    let bytes = std::fs::read(output_file(&v, dir.path(), "matrix.bin")).unwrap();
    let (rows, cols, entries) = bergman_lab::operators::OperatorMatrix::read_binary(&mut bytes.as_slice()).unwrap();
    assert_eq!((rows, cols), (130, 129));
    assert!((entries[cols].re - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn doubling_flags_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run(dir.path(), &["weights", "doubling", "--weight", "exp:c=1", "--depth", "12"]);
    assert!(out.status.success());
    assert_eq!(v["result"]["doubling"]["verdict"], "non-doubling");
}

#[test]
fn invalid_configuration_is_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run(dir.path(), &["criteria", "thm31", "--g", "poly:0,1", "--p", "2", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "parameter");
    let (out, v) = run(dir.path(), &["criteria", "thm42", "--measure", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "parse");
    std::fs::write(dir.path().join("bad.toml"), "p = \"two\"").unwrap();
    let (out, v) = run(dir.path(), &["criteria", "cor43", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "config");
    let (out, v) = run(dir.path(), &["operator", "volterra"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(v["error"]["message"].as_str().unwrap().contains("--g"));
    let (out, v) = run(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn config_file_supplies_parameters() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.toml"), "g = \"poly:0,1\"\np = 2.0\nns = [64, 128, 256]\ncross_check = true\n").unwrap();
    let (out, v) = run(dir.path(), &["criteria", "cor43", "--config", "exp.toml", "--no-cache"]);
    assert!(out.status.success(), "{v}");
    assert_eq!(v["result"]["verdict"], "holds");
    assert_eq!(v["result"]["cross_check"]["agrees"], true);
    assert_eq!(v["config"]["params"]["ns"], serde_json::json!([64, 128, 256]));
    assert!(output_file(&v, dir.path(), "scan.csv").exists());
}

#[test]
fn hardy_and_geometry_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (_, v) = run(dir.path(), &["hardy", "norm", "--f", "poly:1,1", "--p", "2"]);
    assert!((v["result"]["norm"]["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    let (_, v) = run(dir.path(), &["hardy", "thm54", "--measure", "gap:e=1", "--p", "1.5", "--cross-check"]);
    assert_eq!(v["result"]["verdict"], "holds");
    assert_eq!(v["result"]["cross_check"]["agrees"], true);
    let (_, v) = run(dir.path(), &["geometry", "distance", "--z", "0,0", "--w", "0.5,0"]);
    assert!((v["result"]["bergman_distance"].as_f64().unwrap() - 0.5 * 3f64.ln()).abs() < 1e-12);
    let (_, v) = run(dir.path(), &["geometry", "lattice", "--r", "1", "--limit", "100"]);
    let csv = std::fs::read_to_string(output_file(&v, dir.path(), "lattice.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
    let (out, v) = run(dir.path(), &["--jobs", "2", "operator", "scan-volterra", "--g", "poly:0,1", "--statistic", "schatten", "--p", "2"]);
    assert!(out.status.success());
    assert_eq!(v["result"]["verdict"], "saturating");
}

#[test]
fn regression_suite_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run(dir.path(), &["suite", "regression"]);
    assert!(out.status.success(), "{v}");
    assert_eq!(v["result"]["passed"], v["result"]["total"]);
    let csv = std::fs::read_to_string(output_file(&v, dir.path(), "summary.csv")).unwrap();
    assert!(csv.starts_with("battery,id,name,passed,seconds,detail"));
}

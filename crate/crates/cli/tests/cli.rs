use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn supercharge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supercharge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = supercharge(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn error_record(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr has a record");
    serde_json::from_str(line).expect("stderr record is JSON")
}

fn listing(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        run_ok(&["advantage", "--out", dir.to_str().unwrap()]);
    }
    assert_eq!(fs::read(a.join("advantage.csv")).unwrap(), fs::read(b.join("advantage.csv")).unwrap());
}

#[test]
fn worker_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one");
    let three = tmp.path().join("three");
    run_ok(&["grover-scan", "--nmin", "4", "--nmax", "9", "--jobs", "1", "--out", one.to_str().unwrap()]);
    run_ok(&["--jobs", "3", "grover-scan", "--nmin", "4", "--nmax", "9", "--out", three.to_str().unwrap()]);
    for name in ["grover_scan_linear.csv", "grover_scan_brach.csv", "exponents.json"] {
        assert_eq!(fs::read(one.join(name)).unwrap(), fs::read(three.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn grover_scan_exponents_near_inverse_square_root() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("scan");
    run_ok(&["grover-scan", "--out", dir.to_str().unwrap()]);
    let exps = read_json(&dir.join("exponents.json"));
    for kind in ["linear", "brach"] {
        let e = exps[kind]["exponent"].as_f64().unwrap();
        assert!((-0.6..=-0.4).contains(&e), "{kind}: {e}");
    }
    let csv = fs::read_to_string(dir.join("grover_scan_linear.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "N,tau,s_at_max,p_max_over_P0");
    assert_eq!(csv.lines().count(), 1 + 13);
}

#[test]
fn manifest_lists_exactly_the_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("brach");
    run_ok(&["grover-brach", "--nmin", "2", "--nmax", "4", "--out", dir.to_str().unwrap()]);
    let manifest = read_json(&dir.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "grover-brach");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["points"], 201);
    assert_eq!(manifest["config"]["dims"], serde_json::json!([4, 8, 16]));
    let listed: BTreeSet<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed, listing(&dir));
    let csv = fs::read_to_string(dir.join("grover_brach.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "s,f_4,f_8,f_16");
}

#[test]
fn flags_override_file_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[advantage]\nnmin = 3\nnmax = 9\n").unwrap();
    let dir = tmp.path().join("out");
    run_ok(&["advantage", "--config", cfg.to_str().unwrap(), "--nmax", "5", "--out", dir.to_str().unwrap()]);
    let manifest = read_json(&dir.join("manifest.json"));
    assert_eq!(manifest["config"]["nmin"], 3);
    assert_eq!(manifest["config"]["nmax"], 5);
    let csv = fs::read_to_string(dir.join("advantage.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("typo.toml");
    fs::write(&cfg, "[advantage]\nnmaxx = 5\n").unwrap();
    let dir = tmp.path().join("out");
    let out = supercharge(&["advantage", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(!out.status.success());
    assert_eq!(error_record(&out)["error"]["kind"], "config");
    assert!(!dir.exists());
}

#[test]
fn module_errors_leave_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = supercharge(&["advantage", "--nmin", "1", "--nmax", "4", "--out", dir.to_str().unwrap()]);
    assert!(!out.status.success());
    let record = error_record(&out);
    assert_eq!(record["error"]["kind"], "invalid_input");
    assert!(record["error"]["message"].as_str().unwrap().contains("n in 2..=11"));
    assert!(!dir.exists());

    let out = supercharge(&["cd-fidelity", "--ell", "3", "--out", dir.to_str().unwrap()]);
    assert!(!out.status.success());
    assert_eq!(error_record(&out)["error"]["kind"], "invalid_input");
    assert!(!dir.exists());
}

#[test]
fn usage_errors_are_reported_as_json() {
    let out = supercharge(&["grover-scan", "--schedule", "cubic"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"]["kind"], "usage");
}

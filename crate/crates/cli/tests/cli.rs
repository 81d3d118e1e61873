use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn travwave(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_travwave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("TRAVWAVE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn diagnostic(o: &Output) -> Value {
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().last().expect("a diagnostic line");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("{e}: {line}"))
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn missing_speed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = travwave(dir.path(), &["shoot", "--K", "1.25"]);
    assert_eq!(o.status.code(), Some(2));
    let d = diagnostic(&o);
    assert_eq!(d["error"], "config");
    assert_eq!(d["exit_code"], 2);
    // the manifest still records the attempt
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "shoot");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"K": 1.25, "speed": 0.01}"#).unwrap();
    let o = travwave(dir.path(), &["regions", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flux_outside_the_admissible_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = travwave(dir.path(), &["shoot", "--K", "-0.1", "--c", "0.01"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"acn": {"a": [0.25], "tolerance": 1e-300}}"#).unwrap();
    let o = travwave(dir.path(), &["validate-acn", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let d = diagnostic(&o);
    assert_eq!(d["error"], "checks");
    assert_eq!(d["failed_checks"].as_array().unwrap().len(), 1);
}

#[test]
fn acn_validation_passes_at_its_default_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = travwave(dir.path(), &["validate-acn"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("result.json"));
    assert!(f(&r, "max_error") < f(&r, "tolerance"));
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn back_lies_above_front_at_a_fast_speed() {
    let dir = tempfile::tempdir().unwrap();
    let (b, fr) = (dir.path().join("b"), dir.path().join("f"));
    let ob = travwave(&b, &["shoot", "--K", "1.25", "--c", "0.0163", "--kind", "back"]);
    let of = travwave(&fr, &["shoot", "--K", "1.25", "--c", "0.0163", "--kind", "front"]);
    assert!(ob.status.success() && of.status.success());
    let (rb, rf) = (read_json(&b.join("result.json")), read_json(&fr.join("result.json")));
    assert!((f(&rb, "mu") - 0.15425648).abs() < 1e-7, "{rb}");
    assert!(f(&rb, "mu") > f(&rf, "mu"));
    for dir in [&b, &fr] {
        let m = read_json(&dir.join("manifest.json"));
        for out in m["outputs"].as_array().unwrap() {
            let len = fs::metadata(dir.join(out.as_str().unwrap())).unwrap().len();
            assert!(len > 0, "{out} is empty");
        }
        assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn cycle_reports_its_speed_and_saddle_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let o = travwave(dir.path(), &["cycle", "--K", "1.25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("result.json"));
    assert!((f(&r, "c_star") - 0.0161145).abs() < 1e-5, "{r}");
    assert!((f(&r, "mu_star") - 0.07336).abs() < 1e-4, "{r}");
    let eig = r["eigen"].as_array().unwrap();
    assert_eq!(eig.len(), 2);
    for e in eig {
        assert!(f(e, "lambda_minus") < 0.0 && f(e, "lambda_plus") > 0.0);
    }
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = travwave(d, &["stability", "--svg"]);
        assert!(o.status.success());
    }
    for name in ["dispersion.csv", "stability_map.csv", "result.json", "dispersion.svg"] {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn stability_flag_agrees_with_the_reported_growth() {
    let dir = tempfile::tempdir().unwrap();
    let o = travwave(dir.path(), &["stability"]);
    assert!(o.status.success());
    let r = read_json(&dir.path().join("result.json"));
    let unstable = r["unstable"].as_bool().unwrap();
    assert_eq!(unstable, f(&r, "max_growth") > 0.0);
    assert_eq!(unstable, f(&r, "curvature_at_zero") > 0.0);
    assert_eq!(unstable, !r["band"].is_null());
}

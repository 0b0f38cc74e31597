use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &str = r#"{"model":"rational","gamma":1,"beta":0.5,"epsilon":1e-3,"seed":4,
    "grid":{"n":1024,"dx":0.05,"x0":-25.6}}"#;

fn dhs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dhs"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .arg("-q")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn synth_then_sharpen_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert!(dhs(dir.path(), &["--command", "synth", "--config", &cfg]).status.success());
    for name in ["f.csv", "g.csv", "g_eps.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("x,y\n"));
        assert_eq!(text.lines().count(), 1025);
    }
    let input = dir.path().join("g_eps.csv");
    let out = dhs(dir.path(), &["--command", "sharpen", "--config", &cfg, "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["model"], "rational");
    let d = report["discrepancy"].as_f64().unwrap();
    assert!((0.99e-3..=1.01e-3).contains(&d));
    assert!(report["empirical_error"].as_f64().unwrap() <= report["bound"].as_f64().unwrap());
    assert_eq!(fs::read_to_string(dir.path().join("z_eps.csv")).unwrap().lines().count(), 1025);
}

#[test]
fn sharpen_foreign_input_runs_blind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert!(dhs(dir.path(), &["--command", "synth", "--config", &cfg]).status.success());
    // scaled data no longer matches the synthetic truth
    let path = dir.path().join("g_eps.csv");
    let scaled: String = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                return format!("{line}\n");
            }
            let (x, y) = line.split_once(',').unwrap();
            format!("{x},{:?}\n", 1.01 * y.parse::<f64>().unwrap())
        })
        .collect();
    let input = dir.path().join("scaled.csv");
    fs::write(&input, scaled).unwrap();
    let out = dhs(dir.path(), &["--command", "sharpen", "--config", &cfg, "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["residuals_measured"], false);
    assert!(report["empirical_error"].is_null());
}

#[test]
fn bounds_verify_and_demo_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert!(dhs(dir.path(), &["--command", "bounds", "--config", &cfg]).status.success());
    let bounds = json(&dir.path().join("bounds.json"));
    assert!(bounds["error_bound"].is_array() && bounds["apriori_bound"].is_array());

    assert!(dhs(dir.path(), &["--command", "verify", "--seed", "5", "--trials", "100"]).status.success());
    let verify = json(&dir.path().join("verify.json"));
    assert_eq!(verify["passed"], true);
    for suite in verify["suites"].as_array().unwrap() {
        assert_eq!(suite["trials"], 100);
        assert_eq!(suite["failures"], 0);
    }

    assert!(dhs(dir.path(), &["--command", "diff-demo"]).status.success());
    let demo = json(&dir.path().join("diff_demo.json"));
    assert_eq!(demo["trials"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_config_exits_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model":"lorentz","gamma":1,"beta":0.5,"epsilon":1e-3}"#);
    let out = dhs(dir.path(), &["--command", "synth", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let record = fs::read_to_string(dir.path().join("error.json")).unwrap();
    assert!(record.contains("model"));
    assert!(!dir.path().join("f.csv").exists());
}

#[test]
fn missing_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dhs(dir.path(), &["--command", "sharpen"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dhs(dir.path(), &["--command", "synth", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_discrepancy_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert!(dhs(dir.path(), &["--command", "synth", "--config", &cfg]).status.success());
    // noise at 1e-3 cannot be fit down to 1e-6
    let tight = dir.path().join("tight.json");
    fs::write(&tight, SMALL.replace("1e-3", "1e-6")).unwrap();
    let input = dir.path().join("g_eps.csv");
    let out = dhs(dir.path(), &["--command", "sharpen", "--config", tight.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(fs::read_to_string(dir.path().join("error.json")).unwrap().contains("discrepancy"));
    assert!(!dir.path().join("report.json").exists());
}

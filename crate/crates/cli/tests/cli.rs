use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rotlab_cli::{validate, Report, ScenarioConfig, ScenarioId};
use serde_json::json;

fn write_config(dir: &Path, name: &str, body: serde_json::Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

fn rotlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rotlab"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn valid_file_has_no_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        "c.json",
        json!({"scenario": "linear_flow", "seed": 3}),
    );
    assert!(validate(&p).is_empty());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    for entry in fs::read_dir(manifest.join("../../configs")).unwrap() {
        let path = entry.unwrap().path();
        assert_eq!(validate(&path), vec![], "{}", path.display());
    }
}

#[test]
fn unknown_scenario_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.json", json!({"scenario": "nope"}));
    let d = validate(&p);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].path, "scenario");
}

#[test]
fn negative_step_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        "c.json",
        json!({"scenario": "linear_flow", "parameters": {"step": -0.1}}),
    );
    let d = validate(&p);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].path, "parameters.step");
    assert_eq!(d[0].message, "step must be positive");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let top = write_config(
        dir.path(),
        "a.json",
        json!({"scenario": "linear_flow", "colour": 1}),
    );
    assert_eq!(validate(&top).len(), 1);
    let nested = write_config(
        dir.path(),
        "b.json",
        json!({"scenario": "franks_experiment", "parameters": {"grdi": 4}}),
    );
    let d = validate(&nested);
    assert_eq!(d.len(), 1);
    assert!(d[0].path.starts_with("parameters"), "{}", d[0]);
    assert!(d[0].message.contains("grdi"));
    let missing = dir.path().join("missing.json");
    assert_eq!(validate(&missing).len(), 1);
}

#[test]
fn linear_flow_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::new(ScenarioId::LinearFlow, json!({}), 5);
    let report = rotlab_cli::run(&cfg, Some(dir.path())).unwrap();
    assert!(report.passed());
    let v = report.results["rotation_vector"].as_array().unwrap();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    assert!((v[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v[1].as_f64().unwrap() - golden).abs() < 1e-9);
    let c = report.check("rotation_error").unwrap();
    assert_eq!(c.threshold, 1e-9);

    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let parsed: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, report);
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", text);
    assert!(dir.path().join("trajectory.csv").exists());
    assert_eq!(report.inputs["horizon"], json!(100.0));
}

#[test]
fn reports_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = ScenarioConfig::new(
        ScenarioId::ManeExample,
        json!({"starts": 8, "horizon": 200.0}),
        42,
    );
    rotlab_cli::run(&cfg, Some(a.path())).unwrap();
    rotlab_cli::run(&cfg, Some(b.path())).unwrap();
    for name in ["report.json", "mane_rotation.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
    let other = ScenarioConfig::new(
        ScenarioId::ManeExample,
        json!({"starts": 8, "horizon": 200.0}),
        43,
    );
    let c = tempfile::tempdir().unwrap();
    rotlab_cli::run(&other, Some(c.path())).unwrap();
    assert_ne!(
        fs::read(a.path().join("mane_rotation.csv")).unwrap(),
        fs::read(c.path().join("mane_rotation.csv")).unwrap()
    );
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let ok = write_config(dir.path(), "ok.json", json!({"scenario": "linear_flow"}));
    let r = rotlab(&["run", ok.to_str().unwrap(), "--out", out, "--parallel", "2"]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    assert!(Path::new(out).join("report.json").exists());

    let strict = write_config(
        dir.path(),
        "strict.json",
        json!({"scenario": "linear_flow", "parameters": {"velocity": [1.0, 0.3], "tolerance": 1e-300}}),
    );
    let r = rotlab(&["run", strict.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(2));

    let bad = write_config(
        dir.path(),
        "bad.json",
        json!({"scenario": "linear_flow", "parameters": {"step": 0}}),
    );
    let r = rotlab(&["run", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("parameters.step"));

    let r = rotlab(&["validate", bad.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).contains("step must be positive"));
    assert_eq!(
        rotlab(&["validate", ok.to_str().unwrap()]).status.code(),
        Some(0)
    );

    let r = rotlab(&["list-scenarios"]);
    assert_eq!(r.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&r.stdout);
    for id in ScenarioId::ALL {
        assert!(listing.contains(id.name()));
    }
}

#[test]
fn scenario_failure_is_an_execution_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        json!({"scenario": "mather_table", "parameters": {"model": {"kind": "mechanical", "metric": "missing.json"}}}),
    );
    let r = rotlab(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lens_lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lens-lab"))
        .args(args)
        .current_dir(dir)
        .env("LENS_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.ini");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = fixed-points\nsystem = rot:k=4,s=1\noutput_dir = out\n");
    let out = lens_lab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"));
    assert!(dir.path().join("out/fixed-points.report.json").exists());
    assert!(dir.path().join("out/fixed-points.timing.json").exists());
}

#[test]
fn failed_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = fixed-points\nsystem = rot:k=4,s=1\noutput_dir = out\n");
    let out = lens_lab(&["run", cfg.to_str().unwrap(), "--set", "expected_dimension=2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = fixed-points\nsystem = rot:k=4,s=1\n");
    for set in ["bogus=1", "experiment=nope", "backend=float", "system=rot:k=0,s=1"] {
        let out = lens_lab(&["validate", cfg.to_str().unwrap(), "--set", set], dir.path());
        assert_eq!(out.status.code(), Some(2), "--set {set}");
    }
    let missing = lens_lab(&["run", "does-not-exist.ini"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn size_guard_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = fixed-points\nsystem = bern:d=2,L=7\noutput_dir = out\n");
    let out = lens_lab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_accepts_shipped_configs() {
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let out = lens_lab(&["validate", path.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn list_json_names_every_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = lens_lab(&["list", "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 11);
    assert!(names.contains(&"skew-orbit"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = group-embedding\noutput_dir = out\n");
    let out = Command::new(env!("CARGO_BIN_EXE_lens-lab"))
        .args(["run", cfg.to_str().unwrap()])
        .current_dir(dir.path())
        .env("LENS_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

use std::path::Path;
use std::process::{Command, Output};

fn timelike(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timelike"))
        .current_dir(dir)
        .env("TIMELIKE_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn sharpness_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = timelike(dir.path(), &["verify-sharpness", "--n", "3", "--a", "2", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS sharp_identity"), "{stdout}");
    assert!(dir.path().join("o/verify-sharpness.json").exists());
    assert!(dir.path().join("o/verify-sharpness.csv").exists());
}

#[test]
fn schwarzschild_spot_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = timelike(dir.path(), &["verify-schwarzschild", "--m", "1", "--slab", "0", "1", "--r0", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("verify-schwarzschild.json")).unwrap()).unwrap();
    let r = &json[0];
    assert!((r["lhs"].as_f64().unwrap() - 7.172838).abs() < 1e-5);
    assert!((r["rhs"].as_f64().unwrap() - 134.0413).abs() < 1e-3);
    assert_eq!(r["pass"], true);
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = timelike(dir.path(), &["content", "--config", "missing.json", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    std::fs::write(dir.path().join("typo.json"), r#"{"sede": 3}"#).unwrap();
    let out = timelike(dir.path(), &["sprinkle", "--config", "typo.json"]);
    assert_eq!(out.status.code(), Some(2));

    // Monte-Carlo subcommands insist on a seed
    let out = timelike(dir.path(), &["sprinkle", "--n", "200"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "spacetime": {"kind": "minkowski", "dim": 3},
        "region": [[0, 1], [0, 1], [0, 1]],
        "n_samples": 150,
        "seed": 4
    }"#;
    std::fs::write(dir.path().join("run.json"), cfg).unwrap();
    let out = timelike(dir.path(), &["sprinkle", "--config", "run.json", "--n", "300"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sprinkle.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x0,x1,x2,weight"));
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let out = timelike(dir.path(), &["transport", "--seed", "9", "--n", "120", "--out", sub]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["transport.json", "transport.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

//! Exit-code contract for the CLI binary: 0 on success, 1 on a failed
//! check, 2 on usage or configuration errors.

use std::process::Command;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qmlbk"))
        .args(args)
        .env_remove("QMLBK_SEED")
        .output()
        .unwrap()
}

#[test]
fn selftest_exits_zero() {
    let out = run(&["selftest", "--filter", "gradient"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
}

#[test]
fn missing_input_exits_two() {
    let out = run(&["map", "--input", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"no_such_field": 1}"#).unwrap();
    let out = run(&[
        "parity",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_seed_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_qmlbk"))
        .args([
            "parity",
            "--d",
            "4",
            "--trials",
            "5",
            "--seed",
            "1",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .env("QMLBK_SEED", "42")
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = std::fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(v["seed"], 42);
}

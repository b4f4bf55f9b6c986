//! End-to-end checks of the binary: reference values, determinism,
//! config handling, and exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasiqec"))
}

#[test]
fn recover_reports_the_reference_value() {
    let out = bin()
        .args([
            "recover",
            "--family",
            "holographic",
            "-d",
            "2",
            "-N",
            "10",
            "-t",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let analytic: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((analytic - 0.01875).abs() < 1e-15, "row: {row}");
}

#[test]
fn threshold_matches_the_binomial_sum() {
    let out = bin()
        .args(["threshold", "-N", "3", "-t", "1", "-p", "0.1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let success: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((success - 0.972).abs() < 1e-12);
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let run = |jobs: &str| {
        let out = bin()
            .args([
                "threshold", "-N", "31", "-t", "3", "-p", "0.05,0.1", "--mc-samples", "20000",
                "--seed", "9", "--jobs", jobs,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn config_file_drives_a_run_and_flags_override() {
    let dir = std::env::temp_dir().join("quasiqec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"command": "threshold", "N": 3, "t": 1, "p_grid": [0.1]}"#,
    )
    .unwrap();
    let out = bin().args(["--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("9.72"));

    // flag overrides the config's N
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "threshold", "-N", "4"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    // P[X ≤ 1] for Binomial(4, 0.1) = 0.9477
    assert!(text.contains("9.477"), "got {text}");
}

#[test]
fn unknown_config_keys_and_bad_domains_exit_with_usage_errors() {
    let dir = std::env::temp_dir().join("quasiqec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"command": "threshold", "bogus": 1}"#).unwrap();
    let out = bin().args(["--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["recover", "--family", "bulk", "-d", "2", "-N", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn explicit_error_configurations_emit_json() {
    let out = bin()
        .args([
            "recover",
            "-d",
            "2",
            "-N",
            "12",
            "--error",
            "bond:a=1,n=5,+",
            "--error",
            "bond:a=2,n=9,+",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["links"], serde_json::json!([5, 9]));
    let trace = doc["trace"].as_f64().unwrap();
    assert!(trace > 1.0 && trace < 1.01);
}

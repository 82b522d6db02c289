//! The `nlsmass` binary: determinism, output layout and exit codes.

use std::path::Path;
use std::process::Command;

fn nlsmass(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nlsmass")).args(args).output().expect("binary runs")
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn without_timing(mut v: serde_json::Value) -> serde_json::Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let cfg = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(cfg.path(), r#"{"spec": {"N": 2, "family": "pure_power"}, "seed": 11, "params": {"random_profiles": 20}}"#)
        .unwrap();
    let cfg = cfg.path().to_str().unwrap();
    for command in [&["verify-identities"][..], &["b-lambda", "--samples", "5"], &["path", "--kind", "ray"]] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [&a, &b] {
            let mut args = command.to_vec();
            args.extend(["--config", cfg, "--out", dir.path().to_str().unwrap()]);
            let out = nlsmass(&args);
            assert!(out.status.success(), "{command:?}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let ra = report(a.path());
        assert_eq!(without_timing(ra.clone()), without_timing(report(b.path())));
        for name in ra["artifacts"].as_array().unwrap() {
            let name = name.as_str().unwrap();
            assert_eq!(
                std::fs::read(a.path().join(name)).unwrap(),
                std::fs::read(b.path().join(name)).unwrap(),
                "{command:?}: {name} differs"
            );
        }
    }
}

#[test]
fn every_verdict_carries_a_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlsmass(&["d-of-m", "--mass-ratio", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let r = report(dir.path());
    assert_eq!(r["command"], "d-of-m");
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    for v in r["verdicts"].as_array().unwrap() {
        assert!(v["tolerance"].is_number(), "{v}");
        assert!(v["pass"].as_bool().unwrap(), "{v}");
    }
}

#[test]
fn csv_out_names_the_solution_file() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.csv");
    let out = nlsmass(&["ground-state", "--mu", "2", "--out", sol.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (u, side) = nlsmass::grid::read_radial_csv(&sol).unwrap();
    assert_eq!(side.mu, Some(2.0));
    // the pure critical power keeps mass m₁ at every μ
    assert!((u.mass().unwrap() - 5.850448262280896).abs() < 1e-6);
    assert_eq!(report(dir.path())["artifacts"], serde_json::json!(["sol.csv", "sol.json"]));
}

#[test]
fn exit_codes_separate_config_from_numerics() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"spec": {"N": 2, "family": "pure_power"}, "tolerance": 1e-6}"#).unwrap();
    assert_eq!(nlsmass(&["ground-state", "--config", bad.to_str().unwrap(), "--out", out_dir]).status.code(), Some(2));
    assert_eq!(nlsmass(&["ground-state", "--mu", "-1", "--out", out_dir]).status.code(), Some(2));
    assert_eq!(nlsmass(&["ground-state", "--config", "/nonexistent.json"]).status.code(), Some(2));
    // the certificate needs (ρ1), which the pure power does not satisfy
    assert_eq!(nlsmass(&["check-nonexistence", "--out", out_dir]).status.code(), Some(3));
}

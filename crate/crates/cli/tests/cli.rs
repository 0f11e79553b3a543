use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainqec"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chainqec-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_json(args: &[&str]) -> Value {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn code_info_reports_minimal_code() {
    let v = run_json(&["code-info"]);
    assert_eq!(v["n_qubits"], 15);
    assert_eq!(v["independent_generators"], 14);
    assert_eq!(v["logical_qubits"], 1);
    let shor = run_json(&["code-info", "--code", "shor-4"]);
    assert_eq!(shor["parity_condition"], true);
}

#[test]
fn transfer_check_finds_half_pi() {
    let v = run_json(&["transfer-check", "--code", "repetition-3x3"]);
    let t0 = v["transfer"]["transfer_time"].as_f64().unwrap();
    assert!((t0 - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert!(v["excitation_fidelity"].as_f64().unwrap() > 1.0 - 1e-10);
}

#[test]
fn timing_sweep_writes_csv_and_manifest_and_resumes() {
    let dir = scratch("timing");
    let out = dir.to_str().unwrap();
    let args = ["timing-sweep", "--code", "repetition-3x3", "--grid", "0,0.01,0.02,0.03", "--out", out];
    let v = run_json(&args);
    assert_eq!(v["manifest"]["version"], env!("CARGO_PKG_VERSION"));
    let csv_path = dir.join("timing.csv");
    let full = std::fs::read_to_string(&csv_path).unwrap();
    assert!(full.starts_with("delta_t,delta_t_times_lambda_max,success_probability\n"));
    assert_eq!(full.lines().count(), 5);
    assert!(dir.join("timing.manifest.json").exists());

    // Cut the file after two data rows and resume.
    let kept: String = full.lines().take(3).map(|l| format!("{l}\n")).collect();
    std::fs::write(&csv_path, kept).unwrap();
    run_json(&args);
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), full);
}

#[test]
fn json_format_writes_json() {
    let dir = scratch("json");
    let v = run_json(&["single-z", "--code", "repetition-3x3", "--samples", "3", "--format", "json", "--out", dir.to_str().unwrap()]);
    assert!(v["min_success"].as_f64().unwrap() > 1.0 - 1e-9);
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("single_z.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
}

#[test]
fn failures_emit_error_json() {
    let out = bin().args(["code-info", "--code", "nonsense"]).output().unwrap();
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "parse");

    let out = bin().args(["dephasing", "--sites", "9", "--out", scratch("big").to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "resource-limit");

    let out = bin().args(["no-such-command"]).output().unwrap();
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mixedopt::params;
use mixedopt_cli::presets;
use serde_json::Value;

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate")).args(args).output().expect("binary runs")
}

fn run_preset(name: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", name, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    simulate(&args)
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error");
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_preset("fig2a", dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["omega_p_over_Delta_b", "r"]);
    assert_eq!(reader.records().count(), 500);
    let m = manifest(dir.path());
    assert_eq!(m["outputs"][0]["file"], "sweep.csv");
    assert_eq!(m["outputs"][0]["rows"], 500);
    assert_eq!(m["scenario"]["kind"], "param-sweep");
    assert!(m["convergence"].is_null());
}

#[test]
fn closed_run_is_deterministic_and_records_derived_values() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run_preset("fig4a3", dir.path(), &[]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv_a = fs::read(a.path().join("fidelity_closed.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.path().join("fidelity_closed.csv")).unwrap());
    assert!(String::from_utf8_lossy(&csv_a).starts_with("t_times_Delta_b,F_c\n"));

    let m = manifest(a.path());
    let d = params::effective_params(&presets::preset("fig4a3").unwrap().params.resolve().unwrap()).unwrap();
    for (key, fresh) in [("g1", d.g1), ("g2", d.g2), ("g2p", d.g2p), ("omega_b_eff", d.omega_b_eff), ("r", d.r)] {
        let recorded = m["derived"][key].as_f64().unwrap();
        assert!((recorded - fresh).abs() <= 1e-14 * fresh.abs().max(1.0), "{key}: {recorded} vs {fresh}");
    }
    let conv = &m["convergence"];
    assert_eq!(conv["n_b_rerun"].as_u64().unwrap(), conv["n_b"].as_u64().unwrap() + 20);
    assert!(conv["max_abs_diff"].as_f64().unwrap() < 1e-6);
    assert!(m["summary"]["min_F_c"].as_f64().unwrap() > 0.96);
}

#[test]
fn scenario_files_round_trip_through_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&["presets", "--export", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), presets::names().len());

    let run_dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2e.json");
    let out = run_preset(path.to_str().unwrap(), run_dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(run_dir.path().join("sweep.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["delta_r", "N_ss", "re_M_ss", "im_M_ss"]);
}

#[test]
fn derive_prints_couplings() {
    let out = simulate(&["derive", "fig5a", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["g1_over_omega_b"].as_f64().unwrap() - 2.378).abs() < 5e-3);
    assert!((v["g2_over_omega_b"].as_f64().unwrap() - 0.125).abs() < 1e-12);
}

#[test]
fn unknown_suite_and_preset_fail_with_json_errors() {
    let out = simulate(&["check", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "unknown-suite");

    let dir = tempfile::tempdir().unwrap();
    let out = run_preset("fig9z", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "unknown-preset");
}

#[test]
fn malformed_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut s: Value = serde_json::from_str(&presets::preset("fig2a").unwrap().to_json()).unwrap();
    s["params"]["kapa_b"] = 0.1.into();
    fs::write(&path, s.to_string()).unwrap();
    let out = run_preset(path.to_str().unwrap(), &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "invalid-scenario");
}

#[test]
fn small_cutoff_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_preset("fig4a3", dir.path(), &["--nb", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "cutoff-insufficient");
}

#[test]
fn bath_check_passes() {
    let out = simulate(&["check", "bath"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

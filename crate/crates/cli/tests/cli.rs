use std::path::{Path, PathBuf};
use std::process::Command;

use hfb_cli::report::Report;
use hfb_cli::spec::{parse_hamiltonian, HamiltonianSpec};
use hfb_cli::{certify_report, minimize_report, verify_report, CliError, MinimizeSettings};
use hfb_core::variational::Mode;
use tempfile::TempDir;

const SQUEEZED: &str = r#"{
  "statistics": "bose",
  "modes": 1,
  "terms": [
    {"creation": [1], "annihilation": [1], "coeff": [1.0, 0.0]},
    {"creation": [1, 1], "coeff": [0.3, 0.0]},
    {"annihilation": [1, 1], "coeff": [0.3, 0.0]}
  ]
}"#;

const BCS: &str = r#"{
  "statistics": "fermi",
  "modes": 2,
  "terms": [
    {"creation": [1], "annihilation": [1], "coeff": [1.0, 0.0]},
    {"creation": [2], "annihilation": [2], "coeff": [1.0, 0.0]},
    {"creation": [1, 2], "coeff": [0.5, 0.0]}
  ],
  "options": {"hermitian_complete": true}
}"#;

const QUARTIC: &str = r#"{
  "statistics": "bose",
  "modes": 1,
  "terms": [
    {"creation": [1], "annihilation": [1], "coeff": [1.0, 0.0]},
    {"creation": [1, 1], "annihilation": [1, 1], "coeff": [0.1, 0.0]}
  ]
}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(path: &Path, mode: Mode) -> Report {
    let (spec, h) = parse_hamiltonian(path, false).unwrap();
    minimize_report(&spec, &h, &MinimizeSettings { mode, ..MinimizeSettings::default() })
}

fn hfb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hfb"))
}

#[test]
fn spec_round_trips_through_polynomial() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [("sq.json", SQUEEZED), ("bcs.json", BCS), ("q.json", QUARTIC)] {
        let (spec, h) = parse_hamiltonian(&write(&dir, name, text), false).unwrap();
        let again = HamiltonianSpec::from_json(&spec.to_json(), "again").unwrap();
        assert_eq!(again, spec);
        let canonical = HamiltonianSpec::from_polynomial(&h, Default::default());
        let h2 = canonical.to_polynomial(false).unwrap();
        assert_eq!(h2, h);
    }
}

#[test]
fn squeezed_report() {
    let dir = TempDir::new().unwrap();
    let r = run(&write(&dir, "sq.json", SQUEEZED), Mode::BoseEven);
    assert_eq!(r.status, "converged");
    assert!((r.energy.unwrap() + 0.1).abs() < 1e-10);
    let spectrum = r.d_spectrum.as_ref().unwrap();
    assert!((spectrum[0] - 0.8).abs() < 1e-8);
    assert!(r.residual_o.unwrap() < 1e-8);
    assert!(r.certification.as_ref().unwrap().passed);
    let oracle = r.oracle.as_ref().unwrap();
    assert!(oracle.gap < 1e-6 && oracle.gap > -1e-6, "{oracle:?}");
}

#[test]
fn bcs_report() {
    let dir = TempDir::new().unwrap();
    let r = run(&write(&dir, "bcs.json", BCS), Mode::FermiEven);
    assert_eq!(r.status, "converged");
    let exact = 1.0 - 1.25f64.sqrt();
    assert!((r.energy.unwrap() - exact).abs() < 1e-10);
    let cert = r.certification.as_ref().unwrap();
    assert!(cert.passed && cert.quadratic_check.is_none());
    assert!(r.oracle.as_ref().unwrap().gap.abs() < 1e-10);
}

#[test]
fn positive_quartic_stays_at_vacuum() {
    let dir = TempDir::new().unwrap();
    let r = run(&write(&dir, "q.json", QUARTIC), Mode::BoseFull);
    assert_eq!(r.status, "converged");
    assert!(r.energy.unwrap().abs() < 1e-12);
}

#[test]
fn wrong_statistics_is_reported_not_raised() {
    let dir = TempDir::new().unwrap();
    let r = run(&write(&dir, "sq.json", SQUEEZED), Mode::FermiEven);
    assert_eq!(r.status, "error");
    assert!(r.error.as_ref().unwrap().contains("statistics"));
    assert!(r.map.is_none());
}

#[test]
fn odd_hamiltonian_rejected_in_even_mode() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"statistics":"bose","modes":1,"terms":[
        {"creation":[1],"annihilation":[1],"coeff":[1,0]},
        {"creation":[1],"coeff":[0.2,0]}],"options":{"hermitian_complete":true}}"#;
    let r = run(&write(&dir, "odd.json", text), Mode::BoseEven);
    assert_eq!(r.status, "error");
    let full = run(&write(&dir, "odd.json", text), Mode::BoseFull);
    assert_eq!(full.status, "converged");
    assert!((full.energy.unwrap() + 0.04).abs() < 1e-10);
}

#[test]
fn non_hermitian_input_needs_completion() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "nh.json", r#"{"statistics":"bose","modes":1,"terms":[{"creation":[1,1],"coeff":[0.3,0]}]}"#);
    assert!(matches!(parse_hamiltonian(&path, false), Err(CliError::NotHermitian { .. })));
    assert!(parse_hamiltonian(&path, true).is_ok());
}

#[test]
fn verify_and_certify_stored_report() {
    let dir = TempDir::new().unwrap();
    let r = run(&write(&dir, "bcs.json", BCS), Mode::FermiEven);
    let stored = Report::from_json(&r.to_json(), "stored").unwrap();
    assert_eq!(stored, r);
    let v = verify_report(&stored).unwrap();
    assert!(v.consistent, "{v:?}");
    assert_eq!(v.reported_energy, Some(v.engine_energy));
    let c = certify_report(&stored, 1e-3).unwrap();
    assert!(c.passed);
}

#[test]
fn binary_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "sq.json", SQUEEZED);
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let status = hfb()
            .args(["minimize", spec.to_str().unwrap(), "--mode", "bose-even", "--seed", "7", "--report"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let mut value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        value.as_object_mut().unwrap().remove("timestamp");
        outputs.push(value.to_string());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn binary_subcommands_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bcs.json", BCS);
    let report = dir.path().join("r.json");
    let ok = hfb()
        .args(["minimize", spec.to_str().unwrap(), "--mode", "fermi-even", "--report"])
        .arg(&report)
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));

    let verify = hfb().arg("verify").arg(&report).output().unwrap();
    assert_eq!(verify.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&verify.stdout).unwrap();
    assert_eq!(v["consistent"], true);

    let certify = hfb().args(["certify", "--fd-step", "1e-3"]).arg(&report).output().unwrap();
    assert_eq!(certify.status.code(), Some(0));
    let c: serde_json::Value = serde_json::from_slice(&certify.stdout).unwrap();
    assert_eq!(c["passed"], true);

    // a run that ends in an error status exits with 2 and still prints a report
    let wrong = hfb().args(["minimize", spec.to_str().unwrap(), "--mode", "bose-even"]).output().unwrap();
    assert_eq!(wrong.status.code(), Some(2));
    let r: serde_json::Value = serde_json::from_slice(&wrong.stdout).unwrap();
    assert_eq!(r["status"], "error");

    let broken = write(&dir, "broken.json", "{\n\"statistics\": \"bose\",\n\"modes\": 1,\n\"terms\": [\n  {\"creation\": [2], \"coeff\": [1, 0]}\n]\n}");
    let bad = hfb().args(["minimize", broken.to_str().unwrap(), "--mode", "bose-full"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("terms[0].creation[0]"));

    let usage = hfb().args(["minimize", spec.to_str().unwrap(), "--mode", "sideways"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    assert_eq!(hfb().arg("--help").status().unwrap().code(), Some(0));
}

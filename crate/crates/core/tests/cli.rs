use std::path::Path;
use std::process::{Command, Output};

use optodark::cli::{ClassifyRow, Document, DualityRow, SpectrumRow, VerifyRow, EXIT_ASSUMPTION, EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION};
use optodark::darkstates::ClassVariant;

fn optodark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optodark")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn default_spectrum_round_trips_byte_for_byte() {
    let out = optodark(&["spectrum"]);
    assert_eq!(code(&out), EXIT_OK);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: Document<SpectrumRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.rows.len(), 1);
    let e = doc.rows[0].energies.unwrap();
    assert!(e[0] < e[1] && e[1] < e[2]);
    let again = serde_json::to_string_pretty(&doc).unwrap();
    assert_eq!(text.trim_end(), again);
}

#[test]
fn config_file_sets_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"omega_a": 1.0, "omega_b": 1.0, "omega_c": 1.0, "lambda": 0.2, "xi": 0.05, "kappa": [0.2, 0.0]}"#,
    );
    let out = optodark(&["classify", "--config", &cfg]);
    assert_eq!(code(&out), EXIT_OK);
    let doc: Document<ClassifyRow> = serde_json::from_slice(&out.stdout).unwrap();
    let dark: Vec<_> = doc.rows.iter().filter(|r| r.class == Some(ClassVariant::Dark)).collect();
    assert_eq!(dark.len(), 1);
    assert!((dark[0].energy.unwrap() - 0.95).abs() < 1e-12);
    assert!(dark[0].photon_amp.unwrap() < 1e-9);
    let bright = doc.rows.iter().filter(|r| r.class == Some(ClassVariant::Bright)).count();
    assert_eq!(bright, 2);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"omega_a": 1.0, "gamma": 3.0}"#);
    let out = optodark(&["spectrum", "--config", &cfg]);
    assert_eq!(code(&out), EXIT_CONFIG);
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_config_file_and_bad_flags_are_config_errors() {
    assert_eq!(code(&optodark(&["spectrum", "--config", "/nonexistent/run.json"])), EXIT_CONFIG);
    assert_eq!(code(&optodark(&["spectrum", "--tol", "bogus=1e-3"])), EXIT_CONFIG);
    assert_eq!(code(&optodark(&["spectrum", "--set", "omega_z=1"])), EXIT_CONFIG);
    assert_eq!(code(&optodark(&["spectrum", "--format", "xml"])), EXIT_CONFIG);
    assert_eq!(code(&optodark(&["scan"])), EXIT_CONFIG);
    assert_eq!(code(&optodark(&["--help"])), EXIT_OK);
}

#[test]
fn assumption_violation_exits_two() {
    let out = optodark(&["spectrum", "--set", "kappa=1.5"]);
    assert_eq!(code(&out), EXIT_ASSUMPTION);
    let doc: Document<SpectrumRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.rows[0].ass1, Some(false));
}

#[test]
fn verify_passes_on_fixture_and_fails_at_zero_tolerance() {
    let out = optodark(&["verify"]);
    assert_eq!(code(&out), EXIT_OK);
    let doc: Document<VerifyRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc.rows[0].passed && doc.rows[0].assumptions_hold);

    let strict = optodark(&["verify", "--tol", "check=0"]);
    assert_eq!(code(&strict), EXIT_VALIDATION);
}

#[test]
fn output_flag_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = optodark(&["spectrum", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(out.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(&header[..4], ["point", "omega_a", "omega_b", "omega_c"]);
    assert!(header.contains(&"e1".to_owned()) && header.contains(&"ass4".to_owned()));
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let e1: f64 = rows[0][header.iter().position(|h| h == "e1").unwrap()].parse().unwrap();
    assert_eq!(e1, 0.7930295020247187);
}

#[test]
fn scan_is_deterministic_and_grid_major() {
    let args = ["scan", "spectrum", "--scan", "lambda=0.1:0.3:3", "--scan", "xi=0.0:0.1:2"];
    let a = optodark(&args);
    let b = optodark(&args);
    assert_eq!(code(&a), EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let doc: Document<SpectrumRow> = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc.rows.len(), 6);
    let grid: Vec<(f64, f64)> = doc.rows.iter().map(|r| (r.params.lambda.re, r.params.xi.re)).collect();
    assert_eq!(grid[0], (0.1, 0.0));
    assert_eq!(grid[1], (0.1, 0.1));
    assert_eq!(grid[5], (0.3, 0.1));
    assert!(doc.rows.iter().enumerate().all(|(i, r)| r.point == i));
}

#[test]
fn scan_axes_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scan": [{"param": "kappa", "start": 0.0, "stop": 0.2, "steps": 5}], "tol": {"duality": 1e-9}}"#,
    );
    let out = optodark(&["scan", "duality", "--config", &cfg]);
    assert_eq!(code(&out), EXIT_OK, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Document<DualityRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.rows.len(), 5);
    // kappa = 0 violates the resonant-real assumptions; a scan records it per row
    assert!(doc.rows[0].report.is_none());
    assert!(doc.rows[0].error.as_deref().unwrap().contains("kappa"));
    for row in &doc.rows[1..] {
        let rep = row.report.as_ref().expect("positive kappa points have a report");
        assert!(rep.passed, "point {}: mismatch {}", row.point, rep.max_mismatch);
        assert_eq!(rep.tol, 1e-9);
    }
}

#[test]
fn duality_report_on_fixture() {
    let out = optodark(&["duality", "--normalized"]);
    assert_eq!(code(&out), EXIT_OK);
    let doc: Document<DualityRow> = serde_json::from_slice(&out.stdout).unwrap();
    let rep = doc.rows[0].report.as_ref().unwrap();
    assert!(rep.passed);
    assert!(rep.max_mismatch <= 1e-10);
    assert_eq!(rep.energies.len(), 3);
    assert!(rep.normalized.is_some());
}

#[test]
fn duality_off_resonance_is_an_assumption_error() {
    let out = optodark(&["duality", "--set", "omega_c=1.3"]);
    assert_eq!(code(&out), EXIT_ASSUMPTION);
    let doc: Document<DualityRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc.rows[0].report.is_none() && doc.rows[0].error.is_some());
}

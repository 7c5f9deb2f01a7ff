use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_thermo-lindblad");

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/configs").join(name)
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("config.json");
    fs::write(&path, text).unwrap();
    path
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> (i32, String) {
    let mut out_arg = out.as_os_str().to_owned();
    out_arg.push("/");
    let output = Command::new(BIN)
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out_arg)
        .args(extra)
        .output()
        .unwrap();
    (output.status.code().unwrap(), String::from_utf8_lossy(&output.stderr).into_owned())
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn minimal_validate_passes() {
    let dir = TempDir::new().unwrap();
    let (code, stderr) = run("validate", &config_path("minimal_qubit.json"), dir.path(), &[]);
    assert_eq!(code, 0, "{stderr}");
    let r = report(dir.path());
    assert_eq!(r["overall"], true);
    assert_eq!(r["experiment"], "validate");
    assert!(r["version"].is_string());
    assert!(r["config"]["system"].is_object());
    for name in ["commutation", "cptp", "spohn_slack", "theorem1", "tau_slope"] {
        assert!(r["tolerances"][name].is_number(), "missing tolerance {name}");
    }
}

#[test]
fn negative_rate_exits_3_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"hamiltonian": "qubit(1.0)"},
            "baths": [{"beta": 1.0, "rates": {"explicit": {"1->0": -1.0}}}]}"#,
    );
    let (code, stderr) = run("validate", &config, &dir.path().join("out"), &[]);
    assert_eq!(code, 3);
    assert!(stderr.contains("baths[0].rates.explicit.1->0"), "{stderr}");
}

#[test]
fn non_hermitian_hamiltonian_exits_3() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"hamiltonian": [[0, 1], [0, 1]]}, "baths": [{"beta": 1.0, "rates": {"flat": 1.0}}]}"#,
    );
    let (code, stderr) = run("build", &config, &dir.path().join("out"), &[]);
    assert_eq!(code, 3, "{stderr}");
}

#[test]
fn parse_and_schema_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let config = write_config(&dir, "{ not json");
    assert_eq!(run("validate", &config, &out, &[]).0, 2);

    let config = write_config(
        &dir,
        r#"{"system": {"hamiltonian": "qubit(1.0)"}, "baths": [], "colour": "blue"}"#,
    );
    let (code, stderr) = run("validate", &config, &out, &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("colour"), "{stderr}");

    assert_eq!(run("validate", &config_path("minimal_qubit.json"), &out, &["--tol", "no_such=1"]).0, 2);
    assert_eq!(run("validate", &config_path("tau_scan_strict.json"), &out, &[]).0, 2);
    assert_eq!(run("validate", Path::new("/nonexistent/config.json"), &out, &[]).0, 2);
}

#[test]
fn failed_check_exits_1_and_still_writes_report() {
    let dir = TempDir::new().unwrap();
    let (code, _) = run("theorem1", &config_path("theorem1_nonconserving.json"), dir.path(), &[]);
    assert_eq!(code, 1);
    let r = report(dir.path());
    assert_eq!(r["overall"], false);
    assert!(check(&r, "theorem1")["defect"].as_f64().unwrap() > 1e-3);
}

#[test]
fn tolerance_override_is_applied_and_echoed() {
    let dir = TempDir::new().unwrap();
    let (code, _) = run(
        "theorem1",
        &config_path("theorem1_nonconserving.json"),
        dir.path(),
        &["--tol", "theorem1=10"],
    );
    assert_eq!(code, 0);
    assert_eq!(report(dir.path())["tolerances"]["theorem1"].as_f64(), Some(10.0));
}

#[test]
fn tau_scan_writes_eight_rows() {
    let dir = TempDir::new().unwrap();
    let (code, stderr) = run("tau-scan", &config_path("tau_scan_sigma_x.json"), dir.path(), &[]);
    assert_eq!(code, 0, "{stderr}");
    let csv = fs::read_to_string(dir.path().join("tauscan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "tau,defect");
    assert_eq!(lines.len(), 9);
    let slope = report(dir.path())["results"]["scan"]["fitted_slope"].as_f64().unwrap();
    assert!((slope - 3.0).abs() < 0.05);
}

#[test]
fn evolve_writes_trajectory() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"hamiltonian": "qubit(1.0)"},
            "baths": [{"beta": 1.0, "rates": {"flat": 1.0}}],
            "params": {"times": {"start": 0, "stop": 5, "points": 11}, "initial_state": "excited"}}"#,
    );
    let out = dir.path().join("out");
    let (code, stderr) = run("evolve", &config, &out, &[]);
    assert_eq!(code, 0, "{stderr}");
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,rho_re_00,rho_im_00,rho_re_01,rho_im_01,rho_re_10,rho_im_10,rho_re_11,rho_im_11,S_rel,trace_defect"
    );
    assert_eq!(lines.len(), 12);
    // Excited-state population relaxes toward 1/(1 + e) at unit rates.
    let last: Vec<f64> = lines[11].split(',').map(|x| x.parse().unwrap()).collect();
    let p_excited = 1.0 / (1.0 + 1.0f64.exp());
    let expected = p_excited + (1.0 - p_excited) * (-(1.0 + (-1.0f64).exp()) * 5.0).exp();
    assert!((last[7] - expected).abs() < 1e-10, "{} vs {expected}", last[7]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(run("theorem1", &config_path("theorem1_strict_qutrit.json"), out, &[]).0, 0);
    }
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(b.join("report.json")).unwrap());
}

#[test]
fn sequential_and_parallel_reports_match() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run("tau-scan", &config_path("tau_scan_sigma_x.json"), &a, &[]).0, 0);
    assert_eq!(run("tau-scan", &config_path("tau_scan_sigma_x.json"), &b, &["--sequential"]).0, 0);
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(b.join("report.json")).unwrap());
}

#[test]
fn seed_changes_random_models() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let config = config_path("theorem1_nonconserving.json");
    run("theorem1", &config, &a, &[]);
    run("theorem1", &config, &b, &["--seed", "1000"]);
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(rb["seed"], 1000);
    assert_ne!(ra["results"]["max_defect"], rb["results"]["max_defect"]);
}

#[test]
fn transport_without_temperature_gradient_fails_direction_check() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"hamiltonian": "qutrit(0, 1, 3)"},
            "baths": [{"label": "A", "beta": 1.0, "rates": {"explicit": {"1->0": 1.0}}},
                      {"label": "B", "beta": 0.5, "rates": {"explicit": {"2->0": 1.0}}}]}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run("transport", &config, &out, &[]).0, 1);
    let r = report(&out);
    assert_eq!(check(&r, "coherence")["passed"], true);
    assert_eq!(check(&r, "first_law")["passed"], true);
    assert_eq!(check(&r, "heat_flow_direction")["passed"], false);
}

#[test]
fn run_uses_the_configured_experiment() {
    let dir = TempDir::new().unwrap();
    let (code, _) = run("run", &config_path("transport_hot_cold.json"), dir.path(), &[]);
    assert_eq!(code, 0);
    assert_eq!(report(dir.path())["experiment"], "transport");
}

#[test]
fn build_reports_spectrum() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        r#"{"system": {"hamiltonian": "qubit(1.0)"}, "baths": [{"beta": 1.0, "rates": {"flat": 1.0}}]}"#,
    );
    let out = dir.path().join("out");
    let (code, stderr) = run("build", &config, &out, &["--tol", "hermiticity=1e-10"]);
    assert_eq!(code, 0, "{stderr}");
    let r = report(&out);
    let freqs: Vec<f64> =
        r["results"]["bohr_frequencies"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(freqs.len(), 2);
    assert!(freqs.iter().any(|w| (w - 1.0).abs() < 1e-12));
    assert_eq!(r["results"]["generator"]["eigenvalues"].as_array().unwrap().len(), 4);
}

#[test]
fn prefix_output_names_files_with_underscore() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("scan");
    let status = Command::new(BIN)
        .args(["tau-scan", "--config"])
        .arg(config_path("tau_scan_strict.json"))
        .arg("--out")
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(dir.path().join("scan_report.json").exists());
    assert!(dir.path().join("scan_tauscan.csv").exists());
}

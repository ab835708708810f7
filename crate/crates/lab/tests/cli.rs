use std::path::Path;
use std::process::Command;

fn lab(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("RAMSEY_LAB_OUT")
        .output()
        .unwrap()
}

#[test]
fn noise_budget_writes_outputs() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(d.path(), &["noise-budget", "--paper-defaults"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "config.toml", "sweep.csv", "sweep.svg"] {
        assert!(d.path().join("noise-budget").join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("noise-budget/report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "noise-budget");
}

#[test]
fn config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(d.path(), &["two-mode", "--twomode.atom_number", "-5"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let o = lab(d.path(), &["two-mode", "--set", "twomode.no_such_key=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lab(d.path(), &["fit", "--model", "cubic"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(lab(d.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(lab(d.path(), &["imaging-sim", "--noise", "maybe"]).status.code(), Some(2));
}

#[test]
fn missing_files_exit_1() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(d.path(), &["fit", "--data", "/nonexistent/data.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lab(d.path(), &["two-mode", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    std::fs::write(&cfg, "[squeezing]\natom_number = 5000.0\nphase_points = 11\n").unwrap();
    let o = lab(d.path(), &["squeeze-sensitivity", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let written = std::fs::read_to_string(d.path().join("squeeze-sensitivity/config.toml")).unwrap();
    assert!(written.contains("atom_number = 5000.0"));
    let csv = std::fs::read_to_string(d.path().join("squeeze-sensitivity/sensitivity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

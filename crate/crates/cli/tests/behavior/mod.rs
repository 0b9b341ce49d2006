//! Exit codes, validation messages and output files of the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn perpot(command: &str, config: &str, dir: &Path) -> (Output, PathBuf) {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_perpot"))
        .args([command, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--workers", "1"])
        .output()
        .unwrap();
    (output, out)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const LAPLACE_SOLVE: &str = r#"
[cell]
lengths = [1.0, 1.0]
[kernel]
family = "laplace"
[geometry]
shape = "circle"
params = [0.25]
resolution = 64
[data]
expression = "sources"
sources = [[0.55, 0.5], [0.45, 0.53]]
charges = [1.0, -1.0]
[controls]
points = [[0.05, 0.1], [0.9, 0.5]]
"#;

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = perpot("solve", &format!("{LAPLACE_SOLVE}\nbogus = 1\n"), dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("bogus"));
    assert!(!out.exists());
}

#[test]
fn lame_parameter_out_of_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[cell]
lengths = [1.0, 1.0, 1.0]
[kernel]
family = "lame"
omega = -1.0
[controls]
points = [[0.1, 0.2, 0.3]]
"#;
    let (o, _) = perpot("eval-green", cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega"), "{}", stderr(&o));
}

#[test]
fn command_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = perpot("jump-check", &format!("command = \"solve\"\n{LAPLACE_SOLVE}"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn all_errors_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[cell]
lengths = [1.0, 1.0]
[kernel]
family = "helmholtz"
split_factor = -1.0
[geometry]
shape = "circle"
params = [0.25]
resolution = 2
"#;
    let (o, _) = perpot("solve", cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.matches("config:").count() >= 3, "{err}");
}

#[test]
fn resonant_helmholtz_solve_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[cell]
lengths = [1.0, 1.0, 1.0]
[kernel]
family = "helmholtz"
k = 6.283185307179586
[geometry]
shape = "sphere"
params = [0.2]
resolution = 6
[data]
expression = "one"
[controls]
points = [[0.1, 0.1, 0.1]]
"#;
    let (o, _) = perpot("solve", cfg, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("resonan"), "{}", stderr(&o));
}

#[test]
fn solve_writes_tables_summary_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = perpot("solve", LAPLACE_SOLVE, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS") || l.is_empty()), "{stdout}");

    let solve = std::fs::read_to_string(out.join("solve.csv")).unwrap();
    let mut lines = solve.lines();
    assert_eq!(lines.next().unwrap(), "x0,x1,u_re,u_im,exact_re,exact_im,rel_error");
    assert_eq!(lines.count(), 2);
    let density = std::fs::read_to_string(out.join("density.csv")).unwrap();
    assert_eq!(density.lines().count(), 65);

    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "solve");
    assert_eq!(summary["passed"], true);

    // the resolved config is a complete, valid config for the same run
    let resolved = std::fs::read_to_string(out.join("config.resolved.toml")).unwrap();
    assert!(resolved.contains("tolerance"));
    let again = dir.path().join("again");
    std::fs::create_dir(&again).unwrap();
    let (o2, out2) = perpot("solve", &resolved, &again);
    assert_eq!(o2.status.code(), Some(0), "{}", stderr(&o2));
    assert_eq!(std::fs::read(out.join("solve.csv")).unwrap(), std::fs::read(out2.join("solve.csv")).unwrap());
}

#[test]
fn failed_threshold_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{LAPLACE_SOLVE}\n[acceptance]\nmax_solution_error = 1e-300\n");
    let (o, out) = perpot("solve", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert!(out.join("summary.json").exists());
}

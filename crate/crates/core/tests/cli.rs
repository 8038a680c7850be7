use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phi_calderon::discrete::matrix_from_text;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phi-calderon"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("spawn phi-calderon")
}

#[test]
fn verify_symbol_suite_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "symbol"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["symbol.csv", "summary.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().next().unwrap().ends_with(",build"), "{name}");
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("PASS dn-symbol")), "{stdout}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_and_corrupt_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    let out = run(&["symbol", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let text = std::fs::read_to_string(config("strip_laplacian.json")).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text.replace("\"order\": 2", "\"order\": \"two\"")).unwrap();
    let out = run(&["normal", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.order"));
}

#[test]
fn discrete_run_exports_a_readable_projector() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("halfline_toy.json");
    let out = run(&["discrete", "--config", cfg.to_str().unwrap(), "--S", "5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("projector.txt")).unwrap();
    let c = matrix_from_text(&text).unwrap();
    assert_eq!(c.nrows(), c.ncols());
    assert!(((&c * &c) - &c).norm() < 1e-6 * c.norm());
    assert!(dir.path().join("discrete.csv").exists());
}

#[test]
fn symbol_and_normal_run_on_the_strip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("strip_laplacian.json");
    for cmd in ["symbol", "normal"] {
        let out = run(&[cmd, "--config", cfg.to_str().unwrap(), "--tau-steps", "5"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

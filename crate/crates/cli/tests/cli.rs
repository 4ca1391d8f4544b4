//! End-to-end runs of the binary: exit codes, output formats, determinism.

use std::path::Path;
use std::process::{Command, Output};

use hashrep_cli::ResultTable;

fn hashrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hashrep")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const NTO1: &str = "[sweep]\nfidelities = [0.95]\nn = { start = 150, stop = 170, step = 1 }\n";

#[test]
fn success_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", NTO1);
    let out = dir.path().join("o.csv");
    let r = hashrep(&["nto1", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let first = text
        .lines()
        .skip(1)
        .find(|l| l.ends_with(",true"))
        .unwrap();
    assert!(first.starts_with("0.95,164,"), "{first}");
    let meta = std::fs::read_to_string(dir.path().join("o.meta.json")).unwrap();
    assert!(meta.contains("\"config_hash\""));
}

#[test]
fn json_output_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", NTO1);
    let r = hashrep(&["nto1", "--config", &cfg, "--format", "json", "--seed", "9"]);
    assert_eq!(r.status.code(), Some(0));
    let t: ResultTable = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(t.metadata.seed, 9);
    assert_eq!(t.metadata.command, "nto1");
    assert_eq!(t.columns[0], "fidelity_in");
    assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "trials = 200\n[sweep]\nfidelities = [0.95]\nn = [10, 60]\n",
    );
    let a = hashrep(&["mc-validate", "--config", &cfg, "--seed", "5"]);
    let b = hashrep(&["mc-validate", "--config", &cfg, "--seed", "5"]);
    let c = hashrep(&["mc-validate", "--config", &cfg, "--seed", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "[scenario]\nfidelty_in = 0.9\n");
    let r = hashrep(&["rates", "--config", &unknown]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("fidelty_in"));

    let range = write(dir.path(), "r.toml", "[scenario]\neta = 1.5\n");
    assert_eq!(hashrep(&["rates", "--config", &range]).status.code(), Some(1));

    let wrong = write(dir.path(), "w.toml", "command = \"nmin\"\n");
    assert_eq!(hashrep(&["rates", "--config", &wrong]).status.code(), Some(1));

    assert_eq!(hashrep(&["rates", "--config", "/nonexistent.toml"]).status.code(), Some(1));
    assert_eq!(hashrep(&["no-such-command", "--config", &wrong]).status.code(), Some(1));
}

#[test]
fn computation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[scenario]\nfidelity_in = 0.8\n");
    let r = hashrep(&["rates", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("rates"));
}

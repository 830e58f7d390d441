use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cycsieve")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn primes_reports_counts() {
    let out = run(&["--q", "3", "primes"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["command"], "primes");
    assert_eq!(v["pass"], true);
    assert!(v["config"].is_object());
}

#[test]
fn sieve_run_writes_both_artifacts() {
    let dir = scratch("cli-sieve-run");
    let out = run(&["--out", dir.to_str().unwrap(), "sieve-run"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("sieve-run.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["sieve"]["global_count"], 927);
    let csv = std::fs::read_to_string(dir.join("sieve-run.csv")).unwrap();
    assert!(csv.starts_with("q,delta,n,m,ell,b,"));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn count_matches_the_oracle() {
    let out = run(&["--b", "2", "count"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["report"]["agree"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--n", "1", "count"]).status.code(), Some(2));
    assert_eq!(run(&["--q", "4", "primes"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let dir = scratch("cli-bad-config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"q": 3, "unknown_key": 1}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "primes"]).status.code(), Some(2));
}

#[test]
fn budget_overflow_exits_three() {
    assert_eq!(run(&["--b", "5", "--budget", "1e6", "count"]).status.code(), Some(3));
}

#[test]
fn config_file_sets_the_instance() {
    let dir = scratch("cli-config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("quadric.json");
    std::fs::write(&cfg, r#"{"q": 3, "n": 2, "ell": 2, "form": "X0^2 + X1^2 + X2^2", "b": 3, "delta": 2}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "sieve-run"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["config"]["delta"], 2);
    assert_eq!(v["report"]["sieve"]["local_count"], 5571);
}

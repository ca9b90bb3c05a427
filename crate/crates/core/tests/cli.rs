use std::path::Path;
use std::process::{Command, Output};

fn ris_ra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-ra")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = ris_ra(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn run_prints_one_row_per_policy() {
    let csv = ok(&["--trials", "50", "--policies", "carp,sscp:3,crdsap,irsap", "run"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("policy,K,S,N,"));
    assert!(lines[1].starts_with("carp,10,20,100,"));
}

#[test]
fn sweep_over_devices_covers_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    ok(&[
        "--trials", "20", "--policies", "carp,sscp,crdsap,irsap",
        "--out", out.to_str().unwrap(), "sweep", "--axis", "K", "--values", "2..20:2",
    ]);
    let csv = read(&out);
    assert_eq!(csv.lines().count(), 41);
    let manifest = read(&dir.path().join("k.csv.manifest"));
    assert!(manifest.contains("sweep.values = 2..20:2"));
    assert!(manifest.contains("manifest.command"));
}

#[test]
fn manifest_replay_reproduces_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    ok(&["--trials", "40", "--seed", "3", "--set", "scenario.k=12", "--out", first.to_str().unwrap(), "run"]);
    let manifest = dir.path().join("a.csv.manifest");
    ok(&["--config", manifest.to_str().unwrap(), "--out", second.to_str().unwrap(), "run"]);
    assert_eq!(read(&first), read(&second));
}

#[test]
fn optimal_s_adds_summary_rows() {
    let csv = ok(&["--trials", "20", "--policies", "carp,crdsap", "optimal-s", "--s-values", "1..6"]);
    assert!(csv.lines().any(|l| l.starts_with("carp@best_G,")));
    assert!(csv.lines().any(|l| l.starts_with("crdsap@best_ee,")));
    // CRDSAP cannot run at S = 1, so it gets one row fewer.
    assert_eq!(csv.lines().filter(|l| l.starts_with("carp,")).count(), 6);
    assert_eq!(csv.lines().filter(|l| l.starts_with("crdsap,")).count(), 5);
}

#[test]
fn validate_accepts_defaults_and_rejects_bad_settings() {
    assert!(ris_ra(&["validate"]).status.success());

    let bad = ris_ra(&["--set", "policy.kind=sscp", "--set", "policy.sscp_s=30", "validate"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("sscp_s"));

    let unknown = ris_ra(&["--set", "scenario.q=1", "validate"]);
    assert!(!unknown.status.success());

    let parse = ris_ra(&["--set", "scenario.k=ten", "run"]);
    assert!(!parse.status.success());
}

#[test]
fn config_file_sets_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.conf");
    std::fs::write(&cfg, "# small scenario\nscenario.k = 4\nscenario.s = 8\nsim.trials = 10\n").unwrap();
    let csv = ok(&["--config", cfg.to_str().unwrap(), "--policies", "irsap", "run"]);
    assert!(csv.lines().nth(1).unwrap().starts_with("irsap,4,8,100,"));
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn specdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specdisc"))
        .args(args)
        .env_remove("SPECDISC_THREADS")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn prop16_report() {
    let out = specdisc(&["verify", "prop16", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["details"]["disc"], 3);
    assert_eq!(v["details"]["sigma_sq"], 3);
}

#[test]
fn solve_mercedes_benz() {
    let out = specdisc(&["solve", "--instance", &fixture("mb3.json")]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let brute = v["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["solver"] == "bruteforce")
        .unwrap();
    assert!((brute["value"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    let three = v["bounds"]["three_sigma"].as_f64().unwrap();
    assert!((three - 3.0 * 1.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn solve_single_solver_and_csv() {
    let out = specdisc(&[
        "solve",
        "--instance",
        &fixture("three_vectors.json"),
        "--solver",
        "greedy",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,lhs,rhs,slack,tol,pass\n"));
    assert!(text.contains("greedy <= three_sigma"));
}

#[test]
fn failing_check_exits_one_and_still_reports() {
    // d = n = 1 Bernoulli: Disc_2 = min(t, 1−t)|a| always exceeds t(1−t)|a|
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = specdisc(&[
        "verify",
        "schatten",
        "--gen",
        "d=1;n=1;rv=bernoulli;count=5",
        "--mc-samples",
        "1000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
    let failing: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|n| n.contains("sigma_F")), "{failing:?}");
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(specdisc(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        specdisc(&["verify", "thm13", "--gen", "d=0..2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        specdisc(&["solve", "--instance", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        specdisc(&["verify", "thm13", "--root-tol", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        specdisc(&["frames", "gen", "--n", "3"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 3\nthreds = 2\n").unwrap();
    let out = specdisc(&["verify", "prop16", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 2\nseed = 5\n").unwrap();
    let out = specdisc(&["verify", "prop16", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["details"]["disc"], 2);
    let out = specdisc(&[
        "verify",
        "prop16",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "1",
    ]);
    assert_eq!(json(&out)["details"]["disc"], 1);
}

#[test]
fn generated_frame_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let out = specdisc(&[
        "frames",
        "gen",
        "--n",
        "5",
        "--d",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = specdisc(&["solve", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let tf = v["bounds"]["tight_frame"].as_f64().unwrap();
    assert!((tf - 5.0 / 3.0).abs() < 1e-9);
}

#[test]
fn replay_and_list() {
    let out = specdisc(&["replay", "--instance", &fixture("three_vectors.json")]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["trace"]["lambda_max"].as_f64().unwrap() <= 3.0 + 1e-9);

    let out = specdisc(&["verify", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "thm13",
        "thm15",
        "prop16",
        "thm41",
        "alexandrov",
        "schatten",
        "lyapunov",
    ] {
        assert!(text.contains(name), "{name} missing from registry");
    }
}

#[test]
fn bench_emits_csv() {
    let out = specdisc(&["bench", "--count", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,d,n,solver,value,sigma,millis\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2);
}

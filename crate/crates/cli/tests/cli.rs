//! End-to-end checks of the binary: exit codes, output shapes, and the
//! parse -> solve -> re-serialize -> re-parse -> re-solve round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn wcrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcrisk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn worst_case_prints_value_kappa_and_epsilon() {
    let out = wcrisk(&[
        "risk",
        "worst-case",
        "--mean",
        "0",
        "--std",
        "1",
        "--spectrum",
        "cvar:0.05",
    ]);
    let v = stdout_json(&out);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 19f64.sqrt()).abs() <= 1e-12);
    assert!((value - 4.358899).abs() <= 1e-6);
    assert_eq!(v["equivalent_epsilon"].as_f64().unwrap(), 0.05);
}

#[test]
fn worst_case_degenerate_sigma() {
    let out = wcrisk(&[
        "risk",
        "worst-case",
        "--mean",
        "5",
        "--std",
        "0",
        "--spectrum",
        "cvar:0.1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["value"].as_f64().unwrap(), 5.0);
}

#[test]
fn worst_case_set_reports_attaining_member() {
    let set = fixture("set.json");
    let out = wcrisk(&[
        "risk",
        "worst-case",
        "--mean",
        "0",
        "--std",
        "1",
        "--set",
        set.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["value"].as_f64().unwrap(), 3.0);
    assert_eq!(v["attaining_spectrum_index"].as_u64().unwrap(), 0);
}

#[test]
fn eval_is_the_tail_average() {
    let dist = fixture("dist.json");
    let spec = fixture("spectrum_cvar.json");
    let out = wcrisk(&[
        "risk",
        "eval",
        "--dist",
        dist.to_str().unwrap(),
        "--spectrum",
        spec.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    // Top atom holds 15% of the mass, so the worst 5% tail averages to it.
    assert_eq!(v["value"].as_f64().unwrap(), 0.09);
}

#[test]
fn malformed_files_exit_2() {
    for args in [
        vec![
            "portfolio",
            "solve",
            "--problem",
            fixture("malformed.json").to_str().unwrap(),
        ],
        vec!["risk", "worst-case", "--mean", "0", "--std", "1", "--spectrum", "cvar:1.5"],
        vec![
            "risk",
            "eval",
            "--dist",
            fixture("malformed.json").to_str().unwrap(),
            "--spectrum",
            "uniform",
        ],
    ] {
        let out = wcrisk(&args.iter().map(|s| *s).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
        assert!(!out.stderr.is_empty(), "diagnostics go to stderr");
    }
}

#[test]
fn infeasible_problems_exit_3() {
    let out = wcrisk(&[
        "portfolio",
        "solve",
        "--problem",
        fixture("infeasible.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_suites_exit_0() {
    for suite in ["sandwich", "schur"] {
        let out = wcrisk(&["verify", "--suite", suite]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "suite {suite} stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.lines().all(|l| l.split('\t').count() >= 3));
        assert!(text.contains("pass"));
    }
}

#[test]
fn frontier_is_a_flat_table() {
    let out = wcrisk(&[
        "portfolio",
        "frontier",
        "--problem",
        fixture("problem2.json").to_str().unwrap(),
        "--eps-grid",
        "0.5,0.05",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3); // header + 2 points
    assert!(lines[0].starts_with("epsilon\tkappa\tobjective"));
    let obj = |line: &str| -> f64 { line.split('\t').nth(2).unwrap().parse().unwrap() };
    // kappa is monotone decreasing in eps, so the 0.05 row dominates.
    assert!(obj(lines[2]) >= obj(lines[1]));
}

#[test]
fn estimate_reproduces_stored_moments_exactly() {
    let out = wcrisk(&[
        "portfolio",
        "estimate",
        "--returns",
        fixture("returns.csv").to_str().unwrap(),
    ]);
    let got = stdout_json(&out);
    let stored: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("moments.json")).unwrap()).unwrap();
    assert_eq!(got, stored, "CSV ingestion must reproduce the fixture bit for bit");
}

fn solve_objective_bits(problem: &Path) -> u64 {
    let out = wcrisk(&["portfolio", "solve", "--problem", problem.to_str().unwrap()]);
    let v = stdout_json(&out);
    v["objective"].as_f64().unwrap().to_bits()
}

#[test]
fn problem_files_round_trip_to_identical_objectives() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["problem2.json", "problem3.json", "problem_polytopic.json"] {
        let original = fixture(name);
        let first = solve_objective_bits(&original);

        // Re-serialize through the typed schema and solve again.
        let text = std::fs::read_to_string(&original).unwrap();
        let parsed: wcrisk_cli::formats::ProblemFile = serde_json::from_str(&text).unwrap();
        let rewritten = dir.path().join(name);
        std::fs::write(&rewritten, serde_json::to_string(&parsed).unwrap()).unwrap();
        let second = solve_objective_bits(&rewritten);
        assert_eq!(first, second, "{name}: objective changed across round trip");
    }
}

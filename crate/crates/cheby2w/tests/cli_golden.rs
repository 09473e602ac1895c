//! Golden tests: the installed binary must agree with direct library
//! calls, emit exactly one JSON object per invocation, and honor the
//! documented exit codes.

use cheby2w::chebyshev::{self, ChebDegree};
use cheby2w::degree_solver;
use cheby2w::residue_forms;
use cheby2w::ring2w::RingElem;
use serde_json::Value;
use std::process::{Command, Output};

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cheby2w"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(output: &Output) -> Value {
    let stdout = String::from_utf8(output.stdout.clone()).expect("utf-8 stdout");
    let trimmed = stdout.trim_end_matches('\n');
    assert!(
        !trimmed.contains('\n'),
        "expected a single JSON line, got: {stdout:?}"
    );
    serde_json::from_str(trimmed).expect("stdout is one JSON object")
}

fn payload(args: &[&str]) -> (Value, i32) {
    let output = run_cli(args);
    let code = output.status.code().expect("exit code");
    let value = json_of(&output);
    (value["payload"].clone(), code)
}

#[test]
fn eval_matches_library() {
    for (degree, x, w) in [(13u64, 97u64, 11u32), (2, 7, 11), (3, 5, 7), (39, 7, 11)] {
        let expected = chebyshev::eval(
            &ChebDegree::from_u64(degree),
            &RingElem::from_u64(x, w).unwrap(),
        );
        let (p, code) = payload(&[
            "eval",
            "--degree",
            &degree.to_string(),
            "--x",
            &x.to_string(),
            "--width",
            &w.to_string(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(p["value"].as_str().unwrap(), expected.to_string());
    }
}

#[test]
fn result_envelope_has_status_and_timing() {
    let output = run_cli(&["eval", "--degree", "3", "--x", "5", "--width", "7"]);
    let v = json_of(&output);
    assert_eq!(v["status"], "ok");
    assert!(v["timing_ns"].as_u64().is_some());
    assert_eq!(v["payload"]["value"], "101");
}

#[test]
fn classify_matches_library() {
    let (p, code) = payload(&["classify", "--x", "5", "--width", "7"]);
    assert_eq!(code, 0);
    assert_eq!(p["kind"], "odd_near");
    assert_eq!(p["a"], "1");
    assert_eq!(p["k"], 2);
    assert_eq!(p["sign"], 1);
    let (p, _) = payload(&["classify", "--x", "12", "--width", "8"]);
    assert_eq!(p["kind"], "even_form");
    assert_eq!(p["k"], 2);
}

#[test]
fn orbit_period_matches_library() {
    let expected = residue_forms::orbital_period_closed(
        &RingElem::from_u64(5, 7).unwrap(),
        &ChebDegree::from_u64(3),
    )
    .unwrap();
    let (p, code) = payload(&[
        "orbit-period",
        "--x",
        "5",
        "--degree",
        "3",
        "--width",
        "7",
        "--brute",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        p["period"].as_u64().unwrap().to_string(),
        expected.to_string()
    );
    assert_eq!(p["period"], 4);
    assert_eq!(p["brute_period"], 4);
}

#[test]
fn degree_period_matches_library() {
    let (p, code) = payload(&["degree-period", "--x", "5", "--width", "6", "--brute"]);
    assert_eq!(code, 0);
    assert_eq!(p["period"], 8);
    assert_eq!(p["brute_period"], 8);
}

#[test]
fn solve_matches_library() {
    let x = RingElem::from_u64(7, 11).unwrap();
    let y = RingElem::from_u64(865, 11).unwrap();
    let expected = degree_solver::solve(&x, &y);
    let (p, code) = payload(&["solve", "--x", "7", "--y", "865", "--width", "11"]);
    assert_eq!(code, 0);
    let degrees: Vec<String> = p["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_str().unwrap().to_string())
        .collect();
    let lib_degrees: Vec<String> = expected.degrees().iter().map(|d| d.to_string()).collect();
    assert_eq!(degrees, lib_degrees);
    assert_eq!(p["solutions"][0]["shift"], 1);
    assert_eq!(p["solutions"][0]["odd_factor"], "29");
}

#[test]
fn solve_no_solution_exits_one() {
    let output = run_cli(&["solve", "--x", "7", "--y", "2", "--width", "11"]);
    assert_eq!(output.status.code(), Some(1));
    let v = json_of(&output);
    assert_eq!(v["status"], "no_solution");
}

#[test]
fn verify_matches_library() {
    let (p, _) = payload(&[
        "verify", "--x", "7", "--y", "865", "--degree", "58", "--width", "11",
    ]);
    assert_eq!(p["valid"], true);
    let (p, code) = payload(&[
        "verify", "--x", "7", "--y", "865", "--degree", "26", "--width", "11",
    ]);
    assert_eq!(p["valid"], false);
    assert_eq!(code, 0, "a computed false is still a successful run");
}

#[test]
fn rivest_check_matches_library() {
    let (p, _) = payload(&["rivest-check", "--poly", "0,-3,0,4", "--width", "8"]);
    assert_eq!(p["is_permutation"], true);
    let (p, _) = payload(&["rivest-check", "--poly", "0,0,1", "--width", "8"]);
    assert_eq!(p["is_permutation"], false);
}

#[test]
fn generic_attack_roundtrip_and_exit_codes() {
    let (p, code) = payload(&[
        "generic-attack",
        "--poly",
        "1,1",
        "--x",
        "0",
        "--y",
        "13",
        "--width",
        "8",
    ]);
    assert_eq!(code, 0);
    assert_eq!(p["j"], "13");
    // unreachable target: x -> x + 2 keeps parity, so odd y is unreachable
    let output = run_cli(&[
        "generic-attack",
        "--poly",
        "2,1",
        "--x",
        "0",
        "--y",
        "5",
        "--width",
        "8",
    ]);
    assert_eq!(output.status.code(), Some(1));
    // closed-form oracle route
    let (p, code) = payload(&[
        "generic-attack",
        "--cheb-degree",
        "3",
        "--x",
        "7",
        "--y",
        "7",
        "--width",
        "11",
    ]);
    assert_eq!(code, 0);
    assert_eq!(p["j"], "0");
}

#[test]
fn kex_demo_breaks_the_exchange_deterministically() {
    let (first, code) = payload(&["kex-demo", "--width", "32", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(first["key_match"], true);
    assert_eq!(first["shared_key"], first["recovered_key"]);
    assert_eq!(first["transcript"]["w"], 32);
    let (second, _) = payload(&["kex-demo", "--width", "32", "--seed", "5"]);
    assert_eq!(first, second, "same seed must reproduce the same run");
    let (other, _) = payload(&["kex-demo", "--width", "32", "--seed", "6"]);
    assert_ne!(first["shared_key"], other["shared_key"]);
}

#[test]
fn verify_theorems_sweeps_cleanly() {
    let (p, code) = payload(&["verify-theorems", "--width", "6", "--threads", "2"]);
    assert_eq!(code, 0);
    assert_eq!(p["clean"], true);
    assert_eq!(p["orbital"]["cells"], 64 * 32);
    assert_eq!(p["orbital"]["mismatches"], 0);
    assert_eq!(p["degree"]["cells"], 64);
    assert_eq!(p["degree"]["mismatches"], 0);
}

#[test]
fn bench_emits_exact_csv_shape() {
    let output = run_cli(&["bench", "--widths", "8,12", "--runs", "9", "--seed", "2"]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = stdout.trim_end().lines().collect();
    assert_eq!(lines[0], "width,median_ns,runs");
    assert_eq!(lines.len(), 3);
    for (line, width) in lines[1..].iter().zip([8u32, 12]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3);
        assert_eq!(cols[0].parse::<u32>().unwrap(), width);
        assert!(cols[1].parse::<u64>().unwrap() > 0);
        assert_eq!(cols[2].parse::<u32>().unwrap(), 9);
    }
}

#[test]
fn usage_errors_exit_two() {
    // width outside [5, 4096]
    let output = run_cli(&["eval", "--degree", "3", "--x", "5", "--width", "4"]);
    assert_eq!(output.status.code(), Some(2));
    // table oracle above the width cap
    let output = run_cli(&[
        "generic-attack",
        "--poly",
        "1,1",
        "--x",
        "0",
        "--y",
        "1",
        "--width",
        "23",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let v = json_of(&output);
    assert_eq!(v["status"], "error");
    // malformed residue
    let output = run_cli(&["eval", "--degree", "3", "--x", "zzz", "--width", "8"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let output = run_cli(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("eval"));
    assert!(stdout.contains("kex-demo"));
}

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermatlines"))
        .args(args)
        .env_remove("FERMATLINES_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn charsum_jacobi_endpoint() {
    let out = run(&["charsum", "--p", "7", "--c", "0", "--tuple", "1,1,1,5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("S = 7\n"));
}

#[test]
fn charsum_json_reports_realness() {
    let v = json(&[
        "charsum", "--p", "7", "--c", "3", "--tuple", "1,1,1,5", "--format", "json",
    ]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["is_real"], true);
    // 4 + 6(z - z^3) = 4 + 6 sqrt 2
    assert_eq!(v["integer"], Value::Null);
    assert_eq!(v["value"], serde_json::json!([4, 6, 0, -6]));
}

#[test]
fn charsum_rejects_c_outside_fq() {
    let out = run(&["charsum", "--p", "7", "--c", "0,1", "--tuple", "1,1,1,5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("subfield"));
}

#[test]
fn charsum_rejects_bad_tuple() {
    let out = run(&["charsum", "--p", "7", "--c", "2", "--tuple", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn survey_counts() {
    for (p, n) in [("7", 3), ("11", 6)] {
        let v = json(&["survey", "--p", p, "--order", "4", "--format", "json"]);
        assert_eq!(v["n"], n);
        assert_eq!(v["bound_holds"], true);
    }
}

#[test]
fn survey_needs_extended_for_large_q() {
    assert_eq!(
        run(&["survey", "--p", "7", "--k", "3", "--order", "4"]).status.code(),
        Some(2)
    );
    let v = json(&[
        "survey",
        "--p",
        "7",
        "--k",
        "3",
        "--order",
        "4",
        "--extended",
        "--format",
        "json",
    ]);
    assert_eq!(v["n"], 255);
}

#[test]
fn survey_rejects_bad_order() {
    assert_eq!(run(&["survey", "--p", "7", "--order", "3"]).status.code(), Some(2));
    assert_eq!(run(&["survey", "--p", "7", "--order", "2"]).status.code(), Some(2));
}

#[test]
fn point_thm1_at_q7() {
    let out = run(&["point", "--p", "7", "--thm1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("P_x = (t^14 + t^13 + 2*t^12"));
    assert!(s.contains(")/(t^8 - t^7 + 2*t^6"));
    assert!(s.contains("P_y = (-t^21 - t^20 + t^19"));
    assert!(s.contains("on curve: true"));
}

#[test]
fn point_translate_is_on_curve() {
    let v = json(&["point", "--p", "7", "--thm1", "--translate", "3", "--format", "json"]);
    assert_eq!(v["on_curve"], true);
    assert_eq!(v["translate"], 3);
    assert_eq!(v["point"]["x"]["num"].as_array().unwrap().len(), 15);
}

#[test]
fn point_explicit_line_matches_thm1() {
    let a = json(&["point", "--p", "7", "--a", "3", "--b", "0,2", "--format", "json"]);
    let b = json(&["point", "--p", "7", "--thm1", "--format", "json"]);
    assert_eq!(a["point"], b["point"]);
}

#[test]
fn point_rejects_invalid_line() {
    assert_eq!(
        run(&["point", "--p", "7", "--a", "1", "--b", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["point", "--p", "11", "--thm1"]).status.code(), Some(2));
    assert_eq!(run(&["point", "--p", "7"]).status.code(), Some(2));
}

#[test]
fn certify_verdicts() {
    let v = json(&["certify", "--p", "7", "--format", "json"]);
    assert_eq!(v["verdict"], "FULL_RANK_CERTIFIED");
    assert_eq!(v["expected_rank"], 7);
    assert_eq!(v["lines_used"], 1);
    let v = json(&["certify", "--p", "13", "--format", "json"]);
    assert_eq!(v["verdict"], "FULL_RANK_CERTIFIED");
    assert!(v["lines_used"].as_u64().unwrap() <= 3);
    let v = json(&["certify", "--p", "11", "--format", "json"]);
    assert_eq!(v["verdict"], "NOT_CERTIFIED");
}

#[test]
fn rank_and_usage_errors() {
    let v = json(&["rank", "--p", "11", "--format", "json"]);
    assert_eq!(v["rank"], 9);
    assert_eq!(v["dim_w"], 10);
    assert_eq!(run(&["rank", "--p", "9"]).status.code(), Some(2));
    assert_eq!(run(&["rank"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", "--p", "7"]).status.code(), Some(2));
}

#[test]
fn csv_has_one_column_per_coefficient() {
    let out = run(&["lines", "--p", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    let header = s.lines().next().unwrap();
    // phi(6) = 2 coefficients for S and for the inner product
    assert_eq!(header, "a,b,tuple,nonzero,denominator,s0,s1,ip0,ip1");
    assert_eq!(s.lines().count(), 1 + 4 * 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["lines", "--p", "7", "--format", "json"][..],
        &["certify", "--p", "13", "--format", "json"][..],
        &["survey", "--p", "19", "--order", "4", "--format", "csv"][..],
    ] {
        let a = run(args);
        let b = Command::new(env!("CARGO_BIN_EXE_fermatlines"))
            .args(args)
            .env("FERMATLINES_THREADS", "1")
            .output()
            .unwrap();
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn thread_env_must_be_numeric() {
    let out = Command::new(env!("CARGO_BIN_EXE_fermatlines"))
        .args(["rank", "--p", "7"])
        .env("FERMATLINES_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

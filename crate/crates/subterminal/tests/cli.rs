//! Black-box tests of the installed binary: output text, streams, and exit
//! codes per error class.

use std::process::Command;

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_subterminal"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
        out.status.code().expect("exit code"),
    )
}

fn answer(args: &[&str]) -> String {
    let (stdout, stderr, code) = run(args);
    assert_eq!(code, 0, "command {args:?} failed: {stderr}");
    stdout.trim_end().to_string()
}

#[test]
fn answers_go_to_stdout() {
    assert_eq!(answer(&["hom", "Z/12", "Z/4"]), "true");
    assert_eq!(answer(&["hom", "Z/4", "Z/12"]), "false");
    assert_eq!(answer(&["normalize", "Z/1"]), "0");
    assert_eq!(answer(&["normalize", "Z/3 x Z[1/{3}]"]), "Z[1/{3}] x Z/3");
    assert_eq!(answer(&["union", "Z[1/{2}]", "Z/4"]), "Z[1/{2}] x Z/4");
    assert_eq!(answer(&["localize", "Z/12", "{2}"]), "Z/3");
    assert_eq!(answer(&["stalk", "Z", "line(7)"]), "Z_(7)");
}

#[test]
fn exit_code_one_for_malformed_input() {
    let (stdout, stderr, code) = run(&["normalize", "Z//4"]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    assert!(stderr.contains("parse error"), "{stderr}");

    let (_, stderr, code) = run(&["normalize", "Z[1/{4}]"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("not a prime"), "{stderr}");

    // Usage errors from the argument parser count as malformed input.
    let (_, _, code) = run(&["frobnicate"]);
    assert_eq!(code, 1);
    let (_, _, code) = run(&["hom", "Z"]);
    assert_eq!(code, 1);
}

#[test]
fn exit_code_two_for_constraint_violations() {
    let (stdout, stderr, code) = run(&["normalize", "Z x Z"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("constraint violation"), "{stderr}");

    let (_, stderr, code) = run(&["normalize", "Z[1/{3}] x Z/4"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("not in the inverted set"), "{stderr}");

    let (_, stderr, code) = run(&["symdiff", "Z/4", "Z/2"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("incompatible charts"), "{stderr}");
}

#[test]
fn exit_code_three_when_charts_cannot_coexist() {
    let (stdout, stderr, code) = run(&["symdiff", "Z", "Q"]);
    assert_eq!(code, 3);
    assert!(stdout.is_empty());
    assert!(stderr.contains("infinite"), "{stderr}");

    let (_, _, code) = run(&["union", "Z", "Q"]);
    assert_eq!(code, 3);
}

#[test]
fn help_and_version_succeed() {
    let (stdout, _, code) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("normalize") && stdout.contains("audit"));
    let (stdout, _, code) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("subterminal"));
}

#[test]
fn json_flag_switches_the_encoding() {
    let (stdout, _, code) = run(&["--json", "classify", "Z/12"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).expect("valid json");
    assert_eq!(v["kind"], "scheme");
    assert_eq!(v["generic"], false);

    let (stdout, _, code) = run(&["--json", "normalize", "Z/12"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout.trim(),
        r#"{"factors":[[2,2],[3,1]],"kind":"cyclic","n":12}"#
    );
}

#[test]
fn spec_prints_a_diagram_unless_told_not_to() {
    let (stdout, _, code) = run(&["spec", "Z[1/{2}] x Z/4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("points: pts(Q=1, line=P\\{2}, tors={2})"), "{stdout}");
    assert!(stdout.contains("- Q"), "{stdout}");
    assert!(stdout.contains("Z/4"), "{stdout}");

    let (stdout, _, _) = run(&["spec", "--no-diagram", "Z[1/{2}] x Z/4"]);
    assert!(!stdout.contains("- Q"), "{stdout}");
}

#[test]
fn audit_subcommand_reports() {
    let (stdout, _, code) = run(&["audit", "--max-order", "5", "--samples", "3", "--seed", "9"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("violations: none"), "{stdout}");
    assert!(stdout.contains("audit passed"), "{stdout}");
}

//! End-to-end tests of the binary: exit codes, file round-trips, and the
//! shapes of the JSON reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_realfn"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("realfn-cli-{}-{}", std::process::id(), name));
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn scramble_then_test_round_trip() {
    let inst = tmp("round.json");
    let out = run(&[
        "scramble",
        "--degree",
        "3",
        "--tau",
        "conj",
        "--class",
        "real",
        "--seed",
        "42",
        "--json-out",
        inst.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let combined: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(combined["truth"]["class"], "real");

    let out = run(&["test", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 0);
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["verdict"], "real");
    assert!(verdict["g"].is_array());
    assert!(verdict["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(verdict["lambda_sign"], 1);
    std::fs::remove_file(inst).ok();
}

#[test]
fn pseudoreal_round_trip() {
    let inst = tmp("pseudo.json");
    let out = run(&[
        "scramble",
        "--degree",
        "1",
        "--tau",
        "antipodal",
        "--class",
        "pseudoreal",
        "--seed",
        "7",
        "--json-out",
        inst.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let out = run(&["test", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 0);
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["verdict"], "pseudoreal");
    assert_eq!(verdict["lambda_sign"], -1);
    std::fs::remove_file(inst).ok();
}

#[test]
fn not_equivalent_reports_witness() {
    let inst = tmp("twisted.json");
    // z³ − 3iz against conj
    std::fs::write(
        &inst,
        r#"{
            "numerator": [
                {"re": "0", "im": "0"},
                {"re": "0", "im": "-3"},
                {"re": "0", "im": "0"},
                {"re": "1", "im": "0"}
            ],
            "denominator": [{"re": "1", "im": "0"}],
            "tau": "conj",
            "mode": "float"
        }"#,
    )
    .unwrap();
    let out = run(&["test", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 0);
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["verdict"], "not_equivalent");
    assert!(verdict["g"].is_null());
    assert!(verdict["stability"]["failure"]["point"].is_object());
    std::fs::remove_file(inst).ok();
}

#[test]
fn exact_mode_instance() {
    let inst = tmp("exact.json");
    std::fs::write(
        &inst,
        r#"{
            "numerator": [
                {"re": "0", "im": "0"},
                {"re": "-3", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "1/1", "im": "0"}
            ],
            "denominator": [{"re": "1", "im": "0"}],
            "tau": "conj",
            "mode": "exact"
        }"#,
    )
    .unwrap();
    let out = run(&["test", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 0);
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["verdict"], "real");
    // exact points serialize as rational strings
    let sigma = verdict["sigma_divisor"].as_array().unwrap();
    assert!(!sigma.is_empty());
    std::fs::remove_file(inst).ok();
}

#[test]
fn invalid_inputs_exit_two() {
    // malformed JSON
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_exit(&run(&["test", "--input", bad.to_str().unwrap()]), 2);

    // bad coefficient with index in the message
    std::fs::write(
        &bad,
        r#"{"numerator": [{"re": "x", "im": "0"}], "denominator": [{"re": "1", "im": "0"}], "tau": "conj", "mode": "float"}"#,
    )
    .unwrap();
    let out = run(&["test", "--input", bad.to_str().unwrap()]);
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerator[0]"));

    // scramble parameter violations
    assert_exit(
        &run(&[
            "scramble",
            "--degree",
            "2",
            "--tau",
            "antipodal",
            "--class",
            "pseudoreal",
        ]),
        2,
    );
    assert_exit(
        &run(&[
            "scramble",
            "--degree",
            "2",
            "--tau",
            "conj",
            "--class",
            "pseudoreal",
        ]),
        2,
    );
    std::fs::remove_file(bad).ok();
}

#[test]
fn divisor_report_of_cubic() {
    let inst = tmp("cubic.json");
    std::fs::write(
        &inst,
        r#"{
            "numerator": [
                {"re": "0", "im": "0"},
                {"re": "-3", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "1", "im": "0"}
            ],
            "denominator": [{"re": "1", "im": "0"}],
            "tau": "conj",
            "mode": "float"
        }"#,
    )
    .unwrap();
    let out = run(&["divisor", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["degree"], 3);
    assert_eq!(report["critical_values"].as_array().unwrap().len(), 3);
    let sigma = report["sigma_divisor"].as_array().unwrap();
    assert_eq!(sigma.len(), 5);
    let total: u64 = sigma
        .iter()
        .map(|e| e["multiplicity"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 9);
    std::fs::remove_file(inst).ok();
}

#[test]
fn constant_instance_gets_translating_certificate() {
    let inst = tmp("constant.json");
    std::fs::write(
        &inst,
        r#"{
            "numerator": [{"re": "5", "im": "1"}],
            "denominator": [{"re": "1", "im": "0"}],
            "tau": "conj",
            "mode": "exact"
        }"#,
    )
    .unwrap();
    let out = run(&["test", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 0);
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["verdict"], "real");
    assert!(verdict["sigma_divisor"].as_array().unwrap().is_empty());
    std::fs::remove_file(inst).ok();
}

#[test]
fn unresolvable_instance_exits_three() {
    // a 1e-3 kick of a quintic twist of z^5: its divisor structure dissolves
    // below the float matching radius, and the library refuses to guess
    let inst = tmp("unresolvable.json");
    std::fs::write(
        &inst,
        r#"{
            "numerator": [
                {"re": "0.5747856830198669", "im": "-0.09578899134349372"},
                {"re": "0", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "0.0007641189366157171", "im": "-0.0006450753837384169"},
                {"re": "1", "im": "0"}
            ],
            "denominator": [
                {"re": "0.7994754050401711", "im": "-0.35034243839160456"},
                {"re": "0", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "0", "im": "0"},
                {"re": "0.40966316313361556", "im": "0.09807516163687172"}
            ],
            "tau": "antipodal",
            "mode": "float"
        }"#,
    )
    .unwrap();
    let out = run(&["test", "--input", inst.to_str().unwrap()]);
    assert_exit(&out, 3);
    std::fs::remove_file(inst).ok();
}

#[test]
fn selfcheck_exits_zero() {
    let out = run(&[
        "selfcheck",
        "--count",
        "3",
        "--max-degree",
        "3",
        "--seed",
        "5",
    ]);
    assert_exit(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0 mismatches"), "{}", text);
}

#[test]
fn monodromy_commands() {
    let c = tmp("constellation.json");
    std::fs::write(
        &c,
        r#"{"degree": 4, "permutations": [[[1,2,3,4]], [[1,4,3,2]]]}"#,
    )
    .unwrap();
    let out = run(&["monodromy", "validate", "--input", c.to_str().unwrap()]);
    assert_exit(&out, 0);

    let out = run(&["monodromy", "genus", "--input", c.to_str().unwrap()]);
    assert_exit(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["genus"], 0);

    let out = run(&[
        "monodromy",
        "blocks",
        "--input",
        c.to_str().unwrap(),
        "--word",
        "1,1",
    ]);
    assert_exit(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["blocks"], serde_json::json!([[1, 3], [2, 4]]));

    let out = run(&[
        "monodromy",
        "quotient",
        "--input",
        c.to_str().unwrap(),
        "--word",
        "1,1",
    ]);
    assert_exit(&out, 0);
    let quotient: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(quotient["degree"], 2);

    // the quotient output parses back as a constellation file
    let qpath = tmp("quotient.json");
    std::fs::write(&qpath, &out.stdout).unwrap();
    let out = run(&["monodromy", "validate", "--input", qpath.to_str().unwrap()]);
    assert_exit(&out, 0);

    // invariant violations exit 2
    std::fs::write(&c, r#"{"degree": 2, "permutations": [[[1,2]]]}"#).unwrap();
    assert_exit(
        &run(&["monodromy", "validate", "--input", c.to_str().unwrap()]),
        2,
    );
    std::fs::remove_file(c).ok();
    std::fs::remove_file(qpath).ok();
}

#[test]
fn verdict_files_parse_back() {
    let inst = tmp("parse-back.json");
    let verdict_path = tmp("verdict.json");
    run(&[
        "scramble",
        "--degree",
        "2",
        "--tau",
        "conj",
        "--class",
        "real",
        "--seed",
        "9",
        "--json-out",
        inst.to_str().unwrap(),
    ]);
    let out = run(&[
        "test",
        "--input",
        inst.to_str().unwrap(),
        "--json-out",
        verdict_path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let text = std::fs::read_to_string(&verdict_path).unwrap();
    // parse and re-serialize: no information is lost
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, reparsed);
    // a second run writes byte-identical output
    let second = tmp("verdict2.json");
    let out = run(&[
        "test",
        "--input",
        inst.to_str().unwrap(),
        "--json-out",
        second.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    assert_eq!(text, std::fs::read_to_string(&second).unwrap());
    std::fs::remove_file(inst).ok();
    std::fs::remove_file(verdict_path).ok();
    std::fs::remove_file(second).ok();
}

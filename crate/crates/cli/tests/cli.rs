use std::process::{Command, Output};

use serde_json::Value;

fn mk3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mk3")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn no_bare_numbers(v: &Value) -> bool {
    match v {
        Value::Number(_) => false,
        Value::Array(a) => a.iter().all(no_bare_numbers),
        Value::Object(m) => m.values().all(no_bare_numbers),
        _ => true,
    }
}

#[test]
fn count_over_f7() {
    let v = json_of(&mk3(&["count", "--family", "6,-468,-4330,1", "--p", "7", "--n", "1"]));
    assert_eq!(v["N"], "43");
    assert_eq!(v["schema_version"], "1");
}

#[test]
fn h1_of_pic_u() {
    let v = json_of(&mk3(&["h1", "--builtin", "picU"]));
    assert_eq!(v["group"], serde_json::json!(["2", "2", "2", "2", "2"]));
}

#[test]
fn bm_unmet_hypotheses_and_strict() {
    let plain = mk3(&["bm", "--ell", "2"]);
    assert_eq!(plain.status.code(), Some(0));
    assert_eq!(json_of(&plain)["verdict"], "hypotheses_unmet");
    let strict = mk3(&["bm", "--ell", "2", "--strict"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn every_json_subcommand_has_schema_and_string_numbers() {
    let cases: &[&[&str]] = &[
        &["smooth", "--family", "6,-468,-4330,1", "--p", "7"],
        &["nondegen", "--coeffs", "1,-1,2,2,-6"],
        &["count", "--coeffs", "1,2,3,4,5", "--p", "5", "--n", "2"],
        &["zeta"],
        &["picard-bound"],
        &["lattice", "--builtin", "S"],
        &["h1", "--builtin", "caseSprime"],
        &["local", "--k", "1"],
        &["bm", "--ell", "3"],
        &["ec", "--ell", "-12", "--n", "2"],
        &["orbit", "--family", "6,-468,-4330,1", "--steps", "20"],
        &["integral", "--coeffs", "1,-1,3,2,-3"],
    ];
    for args in cases {
        let v = json_of(&mk3(args));
        assert_eq!(v["schema_version"], "1", "{args:?}");
        assert_eq!(v["command"], args[0], "{args:?}");
        assert!(no_bare_numbers(&v), "{args:?} emitted a JSON number");
    }
}

#[test]
fn picard_bound_of_published_counts() {
    let v = json_of(&mk3(&["picard-bound"]));
    assert_eq!(v["picard_bound"]["bound"], "8");
}

#[test]
fn count_output_is_identical_across_thread_counts() {
    let base = ["count", "--family", "6,-468,-4330,1", "--p", "7", "--n", "3"];
    let one = mk3(&[&base[..], &["--threads", "1"]].concat());
    let four = mk3(&[&base[..], &["--threads", "4"]].concat());
    let default = mk3(&base);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);
    assert_eq!(json_of(&one)["N"], "113191");
}

#[test]
fn resume_file_round_trip() {
    let path = std::env::temp_dir().join(format!("mk3-cli-resume-{}.json", std::process::id()));
    let _ = std::fs::remove_file(&path);
    let args = ["count", "--family", "6,-468,-4330,1", "--p", "7", "--n", "2", "--resume", path.to_str().unwrap()];
    let first = mk3(&args);
    assert!(path.exists());
    let second = mk3(&args);
    assert_eq!(json_of(&first)["N"], "2843");
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("mk3-cli-out-{}.json", std::process::id()));
    let out = mk3(&["h1", "--builtin", "picU", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["group"].as_array().unwrap().len(), 5);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn survey_emits_csv() {
    let out = mk3(&["survey", "--M", "1000,1000000", "--modulus", "24"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "M,count_local,count_obstructed");
    assert!(lines[1].starts_with("1000,42,"));
    assert!(lines[2].starts_with("1000000,41667,"));
}

#[test]
fn usage_errors_exit_2_and_name_the_flag() {
    let bad_len = mk3(&["count", "--family", "6,-468", "--p", "7", "--n", "1"]);
    assert_eq!(bad_len.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_len.stderr).contains("--family"));

    let both = mk3(&["nondegen", "--family", "6,-468,-4330,1", "--coeffs", "1,2,3,4,5"]);
    assert_eq!(both.status.code(), Some(2));

    let bad_int = mk3(&["bm", "--ell", "two"]);
    assert_eq!(bad_int.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_int.stderr).contains("--ell"));
}

#[test]
fn large_counts_need_slow() {
    let out = mk3(&["count", "--family", "6,-468,-4330,1", "--p", "7", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--slow") && err.contains("estimated"), "{err}");
}

#[test]
fn computation_errors_exit_3() {
    assert_eq!(mk3(&["integral", "--coeffs", "0,1,2,3,4"]).status.code(), Some(3));
    assert_eq!(mk3(&["smooth", "--coeffs", "1,2,3,4,5", "--p", "4"]).status.code(), Some(3));
}

#[test]
fn smooth_strict_flags_singular_reduction() {
    // x²y²z² = 0 is singular along the coordinate planes.
    let out = mk3(&["smooth", "--coeffs", "1,0,0,0,0", "--p", "3", "--strict"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["smooth"], false);
    assert_eq!(out.status.code(), Some(1));
}

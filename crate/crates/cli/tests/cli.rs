use std::process::Command;

use serde_json::Value as Json;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dmshift(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_dmshift")).args(args).output().expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json_of(out: &Output) -> Json {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", out.stdout))
}

const UNIFORM_ALPHA: &str =
    r#"{"type":"pushforward","gamma":"alpha","inner":{"type":"bernoulli","ambient":"sigma_alpha","weights":"uniform"}}"#;
const UNIFORM_BETA: &str =
    r#"{"type":"pushforward","gamma":"beta","inner":{"type":"bernoulli","ambient":"sigma_beta","weights":"uniform"}}"#;

#[test]
fn reduce_prints_normal_forms() {
    assert_eq!(dmshift(&["reduce", "A1 B2"]).stdout.trim(), "ZERO");
    assert_eq!(dmshift(&["reduce", "A1 B1"]).stdout.trim(), "IDENTITY");
    assert_eq!(dmshift(&["reduce", "B1 A1 A2 B2 U1 A2"]).stdout.trim(), "B1 | A1 A2");
}

#[test]
fn malformed_tokens_exit_2() {
    let out = dmshift(&["reduce", "A1 Q7"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    let out = dmshift(&["reduce", "A3"]);
    assert_eq!(out.code, 2, "bracket index above M");
}

#[test]
fn classify_and_count() {
    assert_eq!(dmshift(&["classify", "A1 B1 U1"]).stdout.split_whitespace().next(), Some("Neutral"));
    assert_eq!(dmshift(&["classify", "A1 B2"]).stdout.split_whitespace().next(), Some("Inadmissible"));
    assert_eq!(dmshift(&["--M", "2", "--N", "0", "count", "3"]).stdout.trim(), "48");
    let out = dmshift(&["--M", "2", "--N", "0", "enumerate", "2"]);
    assert_eq!(out.stdout.lines().count(), 14);
}

#[test]
fn entropy_table_is_csv() {
    let out = dmshift(&["--M", "2", "--N", "0", "entropy", "--n-max", "3"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "n,count,estimate");
    assert!(lines[1].starts_with("1,4,"));
    assert!(lines[3].starts_with("3,48,"));
    assert_eq!(*lines.last().unwrap(), "log(M+N+1),,1.098612");
}

#[test]
fn entropy_limit_exit_3() {
    assert_eq!(dmshift(&["entropy", "--n-max", "41"]).code, 3);
}

#[test]
fn small_bracket_count_rejected() {
    assert_eq!(dmshift(&["--M", "1", "count", "3"]).code, 2);
}

#[test]
fn embedding_round_trip() {
    let out = dmshift(&["embed", "collapse", "--gamma", "alpha", "A1 A2 B2"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.trim(), "A1 A2 B*");
    let back = dmshift(&["embed", "reconstruct", "--gamma", "alpha", out.stdout.trim()]);
    assert_eq!(back.stdout.trim(), "A1 A2 B2");
}

#[test]
fn cylinder_of_uniform_transports() {
    let a = json_of(&dmshift(&["measure", "cylinder", "--spec", UNIFORM_ALPHA, "A1"]));
    assert_eq!(a["value"]["fraction"], "1/4");
    let b = json_of(&dmshift(&["measure", "cylinder", "--spec", UNIFORM_BETA, "A1"]));
    assert_eq!(b["value"]["fraction"], "1/8");
}

#[test]
fn distance_separates_the_two_transports() {
    let out = dmshift(&["measure", "distance", "--spec", UNIFORM_ALPHA, "--other", UNIFORM_BETA, "--max-len", "1"]);
    assert_eq!(out.code, 0);
    let v = json_of(&out);
    assert!(v.to_string().contains("exact"));
    assert_ne!(v["distance"]["decimal"].as_f64(), Some(0.0));
}

#[test]
fn transport_condition_failure_exit_4() {
    let spec = r#"{"type":"co","ambient":"sigma_alpha","cycle":"B*"}"#;
    let out = dmshift(&["--format", "json", "measure", "transport", "--spec", spec, "--gamma", "alpha"]);
    assert_eq!(out.code, 4);
    let err: Json = serde_json::from_str(out.stderr.trim()).unwrap();
    assert_eq!(err["exit_code"], 4);
    assert_eq!(err["error"], "transport_condition");
}

#[test]
fn malformed_spec_exit_2() {
    assert_eq!(dmshift(&["measure", "entropy", "--spec", "{not json"]).code, 2);
    assert_eq!(dmshift(&["measure", "entropy", "--spec", r#"{"type":"nope"}"#]).code, 2);
    assert_eq!(dmshift(&["measure", "entropy", "--spec", "/nonexistent/spec.json"]).code, 2);
}

#[test]
fn approx_needs_a_seed() {
    assert_eq!(dmshift(&["approx", "--spec", UNIFORM_ALPHA, "--n", "10"]).code, 2);
    let out = dmshift(&["--seed", "3", "approx", "--spec", UNIFORM_ALPHA, "--n", "20"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let again = dmshift(&["--seed", "3", "approx", "--spec", UNIFORM_ALPHA, "--n", "20"]);
    assert_eq!(out.stdout, again.stdout, "same seed, same output");
}

#[test]
fn optimize_indicator() {
    let f = r#"{"radius":1,"entries":[{"word":"A1 B1 A1","value":1}]}"#;
    let out = dmshift(&["optimize", "--fn", f, "--p", "6"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json_of(&out);
    assert_eq!(v["lower_bound"], "1/2");
    assert_eq!(v["argmax_orbits"][0], "A1 B1");
}

#[test]
fn optimize_cap_exit_5_with_partial_result() {
    let f = r#"{"radius":1,"entries":[{"word":"A1 B1 A1","value":1}]}"#;
    let out = dmshift(&["optimize", "--fn", f, "--p", "12", "--node-cap", "50"]);
    assert_eq!(out.code, 5);
    assert_eq!(json_of(&out)["partial"], true);
}

#[test]
fn path_between_orbit_and_transport() {
    let plus = r#"{"type":"co","ambient":"sigma_d","cycle":"A1"}"#;
    let dir = std::env::temp_dir().join(format!("dmshift-path-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let saved = dir.join("path.json");
    let saved_str = saved.to_str().unwrap();
    let out = dmshift(&["--seed", "2", "path", "--plus", plus, "--minus", UNIFORM_ALPHA, "--grid", "17", "--save", saved_str]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let header = out.stdout.lines().next().unwrap();
    assert!(header.starts_with("t,"), "{header}");
    assert_eq!(out.stdout.lines().count(), 18);
    let replay = dmshift(&["path", "--replay", saved_str, "--grid", "17"]);
    assert_eq!(replay.code, 0, "{}", replay.stderr);
    assert_eq!(replay.stdout, out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn path_with_equal_endpoints_exit_2() {
    let plus = r#"{"type":"co","ambient":"sigma_d","cycle":"A1"}"#;
    assert_eq!(dmshift(&["--seed", "2", "path", "--plus", plus, "--minus", plus]).code, 2);
}

//! Drives the installed binary end to end: output lines, exit codes, CSV
//! and JSON emission, determinism, and the step-cap escape hatch.

use std::path::PathBuf;
use std::process::{Command, Output};

fn thermflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermflow"))
}

fn run(args: &[&str]) -> Output {
    thermflow().args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn scene_file(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenes")
        .join(name);
    path.to_str().unwrap().to_owned()
}

#[test]
fn sim_prints_one_line_per_sample_with_exact_digits() {
    let out = run(&["sim", "--scene", "builtin:cs1", "--until", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1001);
    assert!(lines[0].starts_with("time=0.0000000000 coffee.temp=70.0000000000"));
    let last = lines.last().unwrap();
    assert!(last.starts_with("time=1000.0000000000"), "{last}");
    assert!(last.contains("coffee.temp=21.6767974687"), "{last}");
    assert!(last.contains("room.temp=21.1390469168"), "{last}");
    assert!(last.contains("crConduct.qdot=0.0044820616"), "{last}");
    assert!(last.contains("crConvect.qdot=0.0000543280"), "{last}");
}

#[test]
fn missing_required_arguments_exit_with_usage_code() {
    let out = run(&["sim", "--scene", "builtin:cs1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--until"));
}

#[test]
fn mc_reports_holds_with_success_code() {
    let out = run(&[
        "mc",
        "--scene",
        "builtin:cs3",
        "--until",
        "1500",
        "--formula",
        "[](temp-ok -> []temp-ok)",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "holds\n");
}

#[test]
fn mc_reports_violations_with_a_counterexample() {
    let out = run(&[
        "mc",
        "--scene",
        "builtin:cs3",
        "--until",
        "20",
        "--formula",
        "<>temp-ok",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("violated\n"), "{text}");
    assert!(text.lines().count() > 1, "counterexample states expected");
}

#[test]
fn search_with_no_matches_reports_no_solution() {
    let out = run(&[
        "search",
        "--scene",
        "builtin:cs1",
        "--until",
        "5",
        "--pred",
        "temp(coffee) >= 100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no solution\n");
}

#[test]
fn find_earliest_prints_the_melting_onset() {
    let out = run(&[
        "find-earliest",
        "--scene",
        "builtin:cs2",
        "--until",
        "100",
        "--pred",
        "phaseIs(coffee, melting)",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("time=12.0000000000"), "{text}");
    assert!(lines[0].contains("coffee.temp=0.7945354449"), "{text}");
}

#[test]
fn an_unreadable_or_invalid_scene_file_is_a_usage_error() {
    let out = run(&["sim", "--scene", "does-not-exist.scene", "--until", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"), "{}", stderr(&out));

    let bad = std::env::temp_dir().join("thermflow-bad-scene-test.scene");
    std::fs::write(&bad, "[entity x]\nmass = banana\n").unwrap();
    let out = run(&["sim", "--scene", bad.to_str().unwrap(), "--until", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));
    std::fs::remove_file(&bad).ok();
}

#[test]
fn csv_flag_writes_a_header_and_every_sample() {
    let path = std::env::temp_dir().join("thermflow-cli-test.csv");
    let out = run(&[
        "sim",
        "--scene",
        "builtin:cs1",
        "--until",
        "3",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "time,coffee.temp,room.temp,crConduct.qdot,crConvect.qdot"
    );
    assert_eq!(lines.len(), 1 + 4, "header plus four samples");
    std::fs::remove_file(&path).ok();
}

#[test]
fn json_flag_emits_parseable_json() {
    let out = run(&[
        "sim",
        "--scene",
        "builtin:cs1",
        "--until",
        "2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let samples = value["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 3);
    assert_eq!(samples[0]["coffee.temp"], "70.0000000000");
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let args = ["sim", "--scene", "builtin:cs2", "--until", "30"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn step_cap_environment_variable_is_honored_and_flag_wins() {
    let mut cmd = thermflow();
    cmd.args([
        "find-earliest",
        "--scene",
        "builtin:cs2",
        "--until",
        "100",
        "--pred",
        "phaseIs(coffee, melting)",
    ])
    .env("THERMFLOW_STEP_CAP", "10");
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("inconclusive"), "{}", stderr(&out));

    let mut cmd = thermflow();
    cmd.args([
        "find-earliest",
        "--scene",
        "builtin:cs2",
        "--until",
        "100",
        "--pred",
        "phaseIs(coffee, melting)",
        "--step-cap",
        "100000",
    ])
    .env("THERMFLOW_STEP_CAP", "10");
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn a_closed_stdout_pipe_ends_the_run_quietly() {
    use std::io::{BufRead, BufReader};
    use std::process::Stdio;

    // 2001 output lines overflow the pipe buffer, so the writer is still
    // alive when the reader hangs up after one line.
    let mut child = thermflow()
        .args(["sim", "--scene", "builtin:cs1", "--until", "2000"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut reader = BufReader::new(child.stdout.take().unwrap());
    let mut first = String::new();
    reader.read_line(&mut first).unwrap();
    assert!(first.starts_with("time=0.0000000000"), "{first}");
    drop(reader);

    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(141), "conventional SIGPIPE status");
    let mut err = String::new();
    std::io::Read::read_to_string(&mut child.stderr.take().unwrap(), &mut err).unwrap();
    assert!(err.is_empty(), "no panic on a closed pipe, got: {err}");
}

#[test]
fn scene_files_load_and_match_their_builtin_twins() {
    let from_file = run(&["sim", "--scene", &scene_file("cs1.scene"), "--until", "5"]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    let from_builtin = run(&["sim", "--scene", "builtin:cs1", "--until", "5"]);
    assert_eq!(from_file.stdout, from_builtin.stdout);
}

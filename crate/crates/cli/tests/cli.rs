//! The binary end to end: files, exit codes, and agreement between the two
//! map formats.

use std::io::Write;
use std::process::{Command, Stdio};

use implicit_core::GradingMatrix;
use serde_json::Value;

fn implicit(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_implicit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn grading_out_feeds_back_in() {
    let dir = tempfile::tempdir().unwrap();
    let grading = dir.path().join("gr4.grading");
    let report = dir.path().join("report.json");
    let (_, map, _) = implicit(&["examples", "grassmannian", "4"], "");
    let (code, first, _) = implicit(
        &[
            "run",
            "-d",
            "2",
            "--grading-out",
            grading.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ],
        &map,
    );
    assert_eq!(code, 0);
    let matrix = GradingMatrix::from_text(&std::fs::read_to_string(&grading).unwrap()).unwrap();
    assert_eq!((matrix.rank(), matrix.n()), (4, 6));
    let (code, second, _) = implicit(
        &["run", "-d", "2", "--grading", grading.to_str().unwrap()],
        &map,
    );
    assert_eq!(code, 0);
    assert_eq!(first, second);

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["grading_rank"], 4);
    assert_eq!(report["options"]["max_degree"], 2);
    for level in report["levels"].as_array().unwrap() {
        let parts: u64 = ["skipped_matroid", "skipped_prescreen", "solved"]
            .iter()
            .map(|k| level[k].as_u64().unwrap())
            .sum();
        assert_eq!(parts, level["multidegrees"].as_u64().unwrap());
    }
}

#[test]
fn json_and_text_maps_agree() {
    let (_, text_map, _) = implicit(&["examples", "cusp"], "");
    let (_, json_map, _) = implicit(&["examples", "cusp", "--json"], "");
    assert!(json_map.trim_start().starts_with('{'));
    let (_, a, _) = implicit(&["run", "-q", "-d", "3", "--output", "json"], &text_map);
    let (_, b, _) = implicit(
        &["run", "-q", "-d", "3", "--output", "json", "--map", "-"],
        &json_map,
    );
    assert_eq!(a, b);
    let parsed: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(parsed["generator_count"], 1);
}

#[test]
fn naive_mode_matches() {
    let (_, map, _) = implicit(&["examples", "grassmannian", "5"], "");
    let (code, naive, err) = implicit(&["run", "-d", "2", "--naive"], &map);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("(naive)"));
    let (_, fast, _) = implicit(&["run", "-d", "2"], &map);
    let lines = |s: &str| {
        let mut v: Vec<String> = s
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        v.sort();
        v
    };
    assert_eq!(lines(&naive).len(), 5);
    assert_eq!(lines(&naive), lines(&fast));
}

#[test]
fn exit_codes() {
    assert_eq!(
        implicit(&["run", "-d", "2"], "codomain: s\nx = s\ny = 1\n").0,
        3
    );
    assert_eq!(implicit(&["run", "-d", "2"], "codomain: s\nx = s +\n").0, 1);
    assert_eq!(implicit(&["run", "-d", "2"], "{\"domain_vars\": [").0, 1);
    assert_eq!(implicit(&["run", "-d", "2", "--threads", "many"], "").0, 2);
    assert_eq!(implicit(&["run"], "").0, 2);
    assert_eq!(implicit(&["--version"], "").0, 0);
}

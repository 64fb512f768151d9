mod common;

use std::fs;
use std::path::Path;

use common::*;
use serde_json::Value;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assess_args(
    report: impl AsRef<Path>,
    app: impl AsRef<Path>,
    out: impl AsRef<Path>,
) -> Vec<String> {
    [
        "assess",
        "--report",
        s(report.as_ref()),
        "--app",
        s(app.as_ref()),
        "--out",
        s(out.as_ref()),
    ]
    .map(String::from)
    .to_vec()
}

fn push(args: &mut Vec<String>, extra: &[&str]) {
    args.extend(extra.iter().map(|a| a.to_string()));
}

fn only_json(dir: &Path) -> Value {
    let files = files_in(dir);
    assert_eq!(files.len(), 1, "{files:?}");
    serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap()
}

#[test]
fn fixture_run_writes_both_artifacts() {
    let out = tempfile::tempdir().unwrap();
    let r = reprolint(&assess_args(
        report_path("complete"),
        app_path(),
        out.path(),
    ));
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    let files = files_in(out.path());
    assert_eq!(files.len(), 2);
    let json = files
        .iter()
        .find(|p| p.extension().unwrap() == "json")
        .unwrap();
    let html = files
        .iter()
        .find(|p| p.extension().unwrap() == "html")
        .unwrap();
    assert_eq!(fs::read_to_string(json).unwrap(), golden("complete"));
    let page = fs::read_to_string(html).unwrap();
    assert!(page.starts_with("<!DOCTYPE html>"));
    assert!(page.contains("class=\"modal\""));
    let printed = String::from_utf8(r.stdout).unwrap();
    assert_eq!(printed.lines().count(), 2);
}

#[test]
fn every_fixture_matches_its_golden_report() {
    for name in [
        "missing_two",
        "ambiguous",
        "fix_sorting",
        "restore_backup",
        "ob_only",
    ] {
        let out = tempfile::tempdir().unwrap();
        let mut args = assess_args(report_path(name), app_path(), out.path());
        push(&mut args, &["--format", "json"]);
        assert_eq!(reprolint(&args).status.code(), Some(0), "{name}");
        let file = &files_in(out.path())[0];
        assert_eq!(fs::read_to_string(file).unwrap(), golden(name), "{name}");
    }
}

#[test]
fn json_format_writes_one_artifact() {
    let out = tempfile::tempdir().unwrap();
    let mut args = assess_args(report_path("complete"), app_path(), out.path());
    push(&mut args, &["--format", "json"]);
    assert_eq!(reprolint(&args).status.code(), Some(0));
    let v = only_json(out.path());
    assert_eq!(v["configEcho"]["depth"], 6);
}

#[test]
fn html_format_writes_one_page() {
    let out = tempfile::tempdir().unwrap();
    let mut args = assess_args(report_path("complete"), app_path(), out.path());
    push(&mut args, &["--format", "html"]);
    assert_eq!(reprolint(&args).status.code(), Some(0));
    let files = files_in(out.path());
    assert_eq!(files.len(), 1);
    assert_eq!(files[0].extension().unwrap(), "html");
}

#[test]
fn missing_inputs_are_validation_errors() {
    let out = tempfile::tempdir().unwrap();
    let missing = out.path().join("nope.json");
    let r = reprolint(&assess_args(report_path("complete"), &missing, out.path()));
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("nope.json"));
    let r = reprolint(&assess_args(&missing, app_path(), out.path()));
    assert_eq!(r.status.code(), Some(2));
    assert!(files_in(out.path()).is_empty());
}

#[test]
fn schema_violations_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad_app = dir.path().join("bad.app.json");
    fs::write(
        &bad_app,
        r#"{"version":1,"appName":"X","initialScreen":"Nowhere","screens":[]}"#,
    )
    .unwrap();
    let r = reprolint(&assess_args(report_path("complete"), &bad_app, &out));
    assert_eq!(r.status.code(), Some(2));

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "  \n").unwrap();
    assert_eq!(
        reprolint(&assess_args(&empty, app_path(), &out))
            .status
            .code(),
        Some(2)
    );

    let labels = dir.path().join("labels.txt");
    fs::write(&labels, "B\n").unwrap();
    let mut args = assess_args(report_path("complete"), app_path(), &out);
    push(&mut args, &["--labels", s(&labels)]);
    assert_eq!(reprolint(&args).status.code(), Some(2));

    let lexicon = dir.path().join("lexicon.json");
    fs::write(&lexicon, r#"{"version": 1}"#).unwrap();
    let mut args = assess_args(report_path("complete"), app_path(), &out);
    push(&mut args, &["--lexicon", s(&lexicon)]);
    assert_eq!(reprolint(&args).status.code(), Some(2));

    for bad in [["--threshold", "0"], ["--rand-steps", "0"]] {
        let mut args = assess_args(report_path("complete"), app_path(), &out);
        push(&mut args, &bad);
        assert_eq!(reprolint(&args).status.code(), Some(2), "{bad:?}");
    }
    assert_eq!(reprolint(&["assess", "--report"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let r = reprolint(&assess_args(report_path("complete"), app_path(), &blocker));
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"depth": 2, "seed": 5}"#).unwrap();

    let from_file = dir.path().join("a");
    let mut args = assess_args(report_path("complete"), app_path(), &from_file);
    push(&mut args, &["--format", "json", "--config", s(&config)]);
    assert_eq!(reprolint(&args).status.code(), Some(0));
    let echo = only_json(&from_file)["configEcho"].clone();
    assert_eq!(
        (echo["depth"].as_u64(), echo["seed"].as_u64()),
        (Some(2), Some(5))
    );

    let with_flag = dir.path().join("b");
    let mut args = assess_args(report_path("complete"), app_path(), &with_flag);
    push(
        &mut args,
        &[
            "--format",
            "json",
            "--config",
            s(&config),
            "--depth",
            "4",
            "--threshold",
            "0.6",
        ],
    );
    assert_eq!(reprolint(&args).status.code(), Some(0));
    let echo = only_json(&with_flag)["configEcho"].clone();
    assert_eq!(
        (echo["depth"].as_u64(), echo["seed"].as_u64()),
        (Some(4), Some(5))
    );
    assert_eq!(echo["similarityThreshold"].as_f64(), Some(0.6));
}

#[test]
fn sidecar_labels_replace_the_labeler() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.txt");
    fs::write(&report, "Open the app.\nTap the add entry button.").unwrap();
    let labels = dir.path().join("r.labels");
    fs::write(&labels, "B\nO\n").unwrap();
    let out = dir.path().join("out");
    let mut args = assess_args(&report, app_path(), &out);
    push(&mut args, &["--format", "json", "--labels", s(&labels)]);
    assert_eq!(reprolint(&args).status.code(), Some(0));
    let v = only_json(&out);
    assert_eq!(v["configEcho"]["labeler"], "sidecar");
    assert_eq!(v["s2rs"].as_array().unwrap().len(), 1);
}

#[test]
fn graph_cache_is_created_then_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("graph.json");
    let first = dir.path().join("first");
    let mut args = assess_args(report_path("missing_two"), app_path(), &first);
    push(&mut args, &["--format", "json", "--graph-cache", s(&cache)]);
    assert_eq!(reprolint(&args).status.code(), Some(0));
    let cached = fs::read_to_string(&cache).unwrap();

    let second = dir.path().join("second");
    let mut args = assess_args(report_path("missing_two"), app_path(), &second);
    push(&mut args, &["--format", "json", "--graph-cache", s(&cache)]);
    assert_eq!(reprolint(&args).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&cache).unwrap(), cached);
    assert_eq!(
        fs::read_to_string(&files_in(&second)[0]).unwrap(),
        golden("missing_two")
    );

    fs::write(&cache, "{}").unwrap();
    let mut args = assess_args(report_path("missing_two"), app_path(), &second);
    push(&mut args, &["--graph-cache", s(&cache)]);
    assert_eq!(reprolint(&args).status.code(), Some(2));
}

fn vertex_count(cache: &Path) -> usize {
    let v: Value = serde_json::from_str(&fs::read_to_string(cache).unwrap()).unwrap();
    v["vertices"].as_array().unwrap().len()
}

#[test]
fn explore_builds_the_fixture_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("g.json");
    let r = reprolint(&[
        "explore",
        "--app",
        s(&app_path()),
        "--budget",
        "200",
        "--out",
        s(&cache),
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(vertex_count(&cache), 11);
    let first = fs::read(&cache).unwrap();
    let r = reprolint(&[
        "explore",
        "--app",
        s(&app_path()),
        "--budget",
        "200",
        "--out",
        s(&cache),
        "--seed",
        "3",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(fs::read(&cache).unwrap(), first);
}

#[test]
fn explore_with_budget_one_reaches_the_initial_screen() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("g.json");
    let r = reprolint(&[
        "explore",
        "--app",
        s(&app_path()),
        "--budget",
        "1",
        "--out",
        s(&cache),
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(vertex_count(&cache), 2);
}

#[test]
fn explore_rejects_invalid_models() {
    let dir = tempfile::tempdir().unwrap();
    let app = dir.path().join("x.json");
    fs::write(&app, "not json").unwrap();
    let cache = dir.path().join("g.json");
    let r = reprolint(&[
        "explore",
        "--app",
        s(&app),
        "--budget",
        "5",
        "--out",
        s(&cache),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!cache.exists());
}

//! CLI contract tests: pipeline smoke, exit codes, determinism, and
//! input immutability.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_migranet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output, context: &str) {
    assert!(
        out.status.success(),
        "{context} failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn manifest_hashes(dir: &Path) -> BTreeMap<String, String> {
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| {
            (
                a["name"].as_str().unwrap().to_string(),
                a["sha256"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

fn synth_args(out: &Path) -> Vec<String> {
    vec![
        "synth".into(),
        "--out".into(),
        out.display().to_string(),
        "--set".into(),
        "synth_users=400".into(),
        "--set".into(),
        "synth_tweets_per_user=15".into(),
        "--set".into(),
        "synth_p_in=0.05".into(),
        "--set".into(),
        "synth_p_out=0.005".into(),
    ]
}

#[test]
fn synth_label_compare_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let args: Vec<String> = synth_args(out);
    let argrefs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_ok(&run(&argrefs), "synth");

    let users = out.join("users.jsonl");
    let tweets = out.join("tweets.jsonl");
    let edges = out.join("edges.jsonl");
    assert_ok(
        &run(&[
            "label",
            "--users",
            users.to_str().unwrap(),
            "--tweets",
            tweets.to_str().unwrap(),
            "--edges",
            edges.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        "label",
    );
    assert_ok(
        &run(&[
            "features",
            "--users",
            users.to_str().unwrap(),
            "--tweets",
            tweets.to_str().unwrap(),
            "--edges",
            edges.to_str().unwrap(),
            "--labels",
            out.join("labels.jsonl").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        "features",
    );
    assert_ok(
        &run(&[
            "compare",
            "--features",
            out.join("features.csv").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        "compare",
    );

    let hashes = manifest_hashes(out);
    assert!(
        hashes.len() >= 3,
        "manifest should list at least 3 artifacts, got {}",
        hashes.len()
    );
    assert!(hashes.contains_key("labels.jsonl"));
    assert!(hashes.contains_key("comparisons.json"));
}

#[test]
fn graph_without_labels_is_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "graph",
        "--edges",
        dir.path().join("edges.jsonl").to_str().unwrap(),
        "--labels",
        dir.path().join("labels.jsonl").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "missing input exit code");
    let record: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("machine-readable error record");
    assert_eq!(record["kind"], "missing_input");
    assert_eq!(record["exit_code"], 2);
}

#[test]
fn invalid_config_key_is_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "synth",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "no_such_key=1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["kind"], "schema");
}

#[test]
fn rerun_reproduces_identical_hashes() {
    let run_pipeline = |out: &Path| {
        let args = synth_args(out);
        let argrefs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_ok(&run(&argrefs), "synth");
        assert_ok(
            &run(&[
                "label",
                "--users",
                out.join("users.jsonl").to_str().unwrap(),
                "--tweets",
                out.join("tweets.jsonl").to_str().unwrap(),
                "--edges",
                out.join("edges.jsonl").to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]),
            "label",
        );
        manifest_hashes(out)
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    assert_eq!(run_pipeline(dir_a.path()), run_pipeline(dir_b.path()));
}

#[test]
fn subcommands_do_not_mutate_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let args = synth_args(out);
    let argrefs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_ok(&run(&argrefs), "synth");

    let fingerprint = |path: &Path| std::fs::read(path).unwrap();
    let users = out.join("users.jsonl");
    let tweets = out.join("tweets.jsonl");
    let edges = out.join("edges.jsonl");
    let before = (
        fingerprint(&users),
        fingerprint(&tweets),
        fingerprint(&edges),
    );
    assert_ok(
        &run(&[
            "label",
            "--users",
            users.to_str().unwrap(),
            "--tweets",
            tweets.to_str().unwrap(),
            "--edges",
            edges.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        "label",
    );
    let after = (
        fingerprint(&users),
        fingerprint(&tweets),
        fingerprint(&edges),
    );
    assert_eq!(before, after, "label must not touch its inputs");
}

#[test]
fn config_file_env_and_flags_layer_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.conf");
    std::fs::write(&config_path, "synth_users = 100\nseed = 1\n").unwrap();

    // File only.
    let out_a = dir.path().join("a");
    let out = bin()
        .args([
            "--config",
            config_path.to_str().unwrap(),
            "synth",
            "--out",
            out_a.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_ok(&out, "synth with config file");
    let count = std::fs::read_to_string(out_a.join("users.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(count, 100);

    // Environment overrides the file; --set overrides the environment.
    let out_b = dir.path().join("b");
    let out = bin()
        .env("MIGRANET_SYNTH_USERS", "150")
        .args([
            "--config",
            config_path.to_str().unwrap(),
            "synth",
            "--out",
            out_b.to_str().unwrap(),
            "--set",
            "synth_tweets_per_user=12",
        ])
        .output()
        .unwrap();
    assert_ok(&out, "synth with env override");
    let count = std::fs::read_to_string(out_b.join("users.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(count, 150);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_b.join("manifest.json")).unwrap()).unwrap();
    let echoed = &manifest["artifacts"][0]["config"];
    assert_eq!(echoed["synth_users"], 150);
    assert_eq!(echoed["synth_tweets_per_user"], 12);
}

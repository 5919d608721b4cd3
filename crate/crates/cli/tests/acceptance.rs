//! Acceptance criterion 8: full pipeline at scale, deterministic.
//!
//! A 50,000-user corpus with ~250,000 follow edges runs through every
//! subcommand (sampled betweenness and path lengths kick in automatically
//! above the exact thresholds), must finish well under the budget, produce
//! a complete manifest, and reproduce identical artifact hashes on rerun.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

const BUDGET_SECONDS: u64 = 600;

fn run(args: &[&str]) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_migranet"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "`migranet {}` failed: {}\n{}",
        args.join(" "),
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn full_pipeline(out: &Path) -> BTreeMap<String, String> {
    let dir = out.to_str().unwrap();
    let users = out.join("users.jsonl");
    let tweets = out.join("tweets.jsonl");
    let edges = out.join("edges.jsonl");
    let labels = out.join("labels.jsonl");
    let features = out.join("features.csv");

    run(&[
        "synth",
        "--out",
        dir,
        "--set",
        "synth_users=50000",
        "--set",
        "synth_tweets_per_user=15",
        // ~200k within-group and ~50k cross-group directed edges.
        "--set",
        "synth_p_in=0.0004",
        "--set",
        "synth_p_out=0.000025",
        "--set",
        "synth_hashtag_vocab=500",
    ]);
    let (users_s, tweets_s, edges_s, labels_s, features_s) = (
        users.to_str().unwrap(),
        tweets.to_str().unwrap(),
        edges.to_str().unwrap(),
        labels.to_str().unwrap(),
        features.to_str().unwrap(),
    );
    run(&[
        "ingest", "--users", users_s, "--tweets", tweets_s, "--edges", edges_s, "--out", dir,
    ]);
    run(&[
        "label", "--users", users_s, "--tweets", tweets_s, "--edges", edges_s, "--out", dir,
    ]);
    run(&[
        "features", "--users", users_s, "--tweets", tweets_s, "--edges", edges_s, "--labels",
        labels_s, "--out", dir,
    ]);
    run(&["compare", "--features", features_s, "--out", dir]);
    run(&[
        "attachment", "--labels", labels_s, "--tweets", tweets_s, "--out", dir,
    ]);
    run(&["graph", "--edges", edges_s, "--labels", labels_s, "--out", dir]);
    run(&["assort", "--edges", edges_s, "--labels", labels_s, "--out", dir]);
    run(&["report", "--labels", labels_s, "--tweets", tweets_s, "--out", dir]);

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
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

#[test]
fn criterion_8_scale_pipeline_within_budget_and_deterministic() {
    let expected_artifacts = [
        "users.jsonl",
        "tweets.jsonl",
        "edges.jsonl",
        "ground_truth.jsonl",
        "ingest_report.json",
        "labels.jsonl",
        "label_report.json",
        "features.csv",
        "features_report.json",
        "comparisons.json",
        "hashtag_table.csv",
        "attachment.csv",
        "attachment_hist.csv",
        "attachment_report.json",
        "summary.json",
        "centrality.csv",
        "centrality_correlations.csv",
        "degree_hist.csv",
        "top_central.csv",
        "global_assortativity.json",
        "local_assortativity.csv",
        "local_assortativity_hist.csv",
        "migration_matrix.csv",
        "migration_matrix_filtered.csv",
        "top_hashtags.csv",
        "report.json",
    ];

    let start = Instant::now();
    let dir_a = tempfile::tempdir().unwrap();
    let hashes_a = full_pipeline(dir_a.path());
    let first_run = start.elapsed();
    assert!(
        first_run.as_secs() < BUDGET_SECONDS,
        "pipeline took {first_run:?}, budget {BUDGET_SECONDS}s"
    );

    for name in expected_artifacts {
        assert!(
            hashes_a.contains_key(name),
            "manifest is missing artifact {name}"
        );
    }

    // Scale sanity: the generated graph is in the intended regime.
    let edge_count = std::fs::read_to_string(dir_a.path().join("edges.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert!(
        (200_000..=300_000).contains(&edge_count),
        "edge count {edge_count} outside the intended 250k regime"
    );
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir_a.path().join("summary.json")).unwrap())
            .unwrap();
    assert!(
        !summary["giant"]["path_exact"].as_bool().unwrap(),
        "50k-node graph must use sampled path lengths"
    );
    assert_eq!(
        summary["giant"]["path_sources"].as_u64().unwrap(),
        2048,
        "sampled path sources"
    );

    // Determinism: a rerun in a fresh directory reproduces every hash.
    let dir_b = tempfile::tempdir().unwrap();
    let hashes_b = full_pipeline(dir_b.path());
    assert_eq!(hashes_a, hashes_b, "rerun must reproduce identical hashes");

    let total = start.elapsed();
    println!(
        "[PASS] criterion 8: 50k-user pipeline ({edge_count} edges) ran in {:.1}s (first pass {:.1}s), complete manifest, rerun hashes identical",
        total.as_secs_f64(),
        first_run.as_secs_f64()
    );
}

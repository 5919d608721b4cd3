//! Subcommand implementations: each stage reads its inputs, computes one
//! slice of the analysis, and emits artifacts through [`ArtifactWriter`].

use crate::config::PipelineConfig;
use crate::manifest::{csv_preamble, ArtifactWriter, SCHEMA_VERSION};
use anyhow::{Context, Result};
use migranet::assortativity::{
    assortativity_histograms, categorical_assortativity, degree_assortativity,
    local_assortativity, DegreeMode, NodeAttribute,
};
use migranet::attachment::{
    attachment_histograms, attachment_scores, build_hashtag_table, native_hashtag_usage,
    top_hashtags,
};
use migranet::corpus::{
    account_age_days, friend_features, ingest_edges, ingest_tweets, ingest_users,
    recent_tweet_features,
};
use migranet::graph::{
    centrality, fit_power_law, status_tally, summarize, top_k, SocialGraph, ALL_MEASURES,
};
use migranet::labeling::{label_corpus, migration_matrix, FlowMatrix, Status, UserLabel};
use migranet::stats::{group_summary, ks_two_sample, GroupSummary};
use migranet::synth::generate;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

const KEEP: [Status; 2] = [Status::Migrant, Status::Native];

fn load_labels(path: &Path) -> Result<Vec<UserLabel>> {
    let file = std::fs::File::open(path).map_err(|source| migranet::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut labels = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| migranet::Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let label: UserLabel = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed label record", path.display(), lineno + 1))?;
        labels.push(label);
    }
    if labels.is_empty() {
        anyhow::bail!(migranet::Error::EmptyStore {
            path: path.to_path_buf()
        });
    }
    Ok(labels)
}

fn build_giant(
    edges_path: &Path,
    labels_path: &Path,
) -> Result<(SocialGraph, migranet::graph::BuildStats, f64)> {
    let (edges, _) = ingest_edges(edges_path)?;
    let labels = load_labels(labels_path)?;
    let (graph, stats) = SocialGraph::build(&edges, &labels, &KEEP)?;
    let (giant, share) = graph.giant_component();
    Ok((giant, stats, share))
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_json<F: Serialize>(s: &GroupSummary<F>) -> serde_json::Value {
    serde_json::to_value(s).expect("summary serializes")
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub fn run_synth(out: &Path, config: &PipelineConfig) -> Result<()> {
    let synth_config = config.synth()?;
    let corpus = generate(&synth_config)?;
    let mut writer = ArtifactWriter::new(out, "synth", config)?;

    fn dump<T: Serialize>(items: &[T], out: &mut Vec<u8>) -> Result<()> {
        for item in items {
            serde_json::to_writer(&mut *out, item)?;
            out.push(b'\n');
        }
        Ok(())
    }
    writer.write("users.jsonl", |out| dump(&corpus.users, out))?;
    writer.write("tweets.jsonl", |out| dump(&corpus.tweets, out))?;
    writer.write("edges.jsonl", |out| dump(&corpus.edges, out))?;
    writer.write("ground_truth.jsonl", |out| dump(&corpus.truth, out))?;
    writer.finalize()?;
    eprintln!(
        "synth: {} users, {} tweets, {} edges -> {}",
        corpus.users.len(),
        corpus.tweets.len(),
        corpus.edges.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

pub fn run_ingest(
    users: &Path,
    tweets: &Path,
    edges: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let (user_store, user_stats) = ingest_users(users)?;
    let (tweet_store, tweet_stats) = ingest_tweets(tweets)?;
    let (edge_list, edge_stats) = ingest_edges(edges)?;

    let mut writer = ArtifactWriter::new(out, "ingest", config)?;
    writer.write("ingest_report.json", |buf| {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "users": { "count": user_store.len(), "stats": user_stats },
            "tweets": { "count": tweet_store.len(), "tweeting_users": tweet_store.n_users(), "stats": tweet_stats },
            "edges": { "count": edge_list.len(), "stats": edge_stats },
        });
        serde_json::to_writer_pretty(buf, &report)?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// label
// ---------------------------------------------------------------------------

pub fn run_label(
    users: &Path,
    tweets: &Path,
    edges: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let (user_store, _) = ingest_users(users)?;
    let (mut tweet_store, _) = ingest_tweets(tweets)?;
    let (edge_list, _) = ingest_edges(edges)?;
    tweet_store.register_users(&user_store);

    let labels = label_corpus(&user_store, &tweet_store, &edge_list, &config.labeling())?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for label in &labels {
        *counts.entry(label.status.to_string()).or_insert(0) += 1;
    }

    let mut writer = ArtifactWriter::new(out, "label", config)?;
    writer.write("labels.jsonl", |buf| {
        for label in &labels {
            serde_json::to_writer(&mut *buf, label)?;
            buf.push(b'\n');
        }
        Ok(())
    })?;
    writer.write("label_report.json", |buf| {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "users": labels.len(),
            "status_counts": counts,
        });
        serde_json::to_writer_pretty(buf, &report)?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// attachment
// ---------------------------------------------------------------------------

pub fn run_attachment(
    labels_path: &Path,
    tweets: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let labels = load_labels(labels_path)?;
    let (tweet_store, _) = ingest_tweets(tweets)?;

    let usages = native_hashtag_usage(&labels, &tweet_store);
    let table = build_hashtag_table::<f64>(&usages, config.entropy_threshold, config.min_support);
    let (scores, skipped_unknown) = attachment_scores(&labels, &tweet_store, &table);

    let mut writer = ArtifactWriter::new(out, "attachment", config)?;
    let config_line = writer.config_line();

    writer.write("hashtag_table.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["hashtag", "country", "entropy", "support"])?;
        for (tag, entry) in table.iter() {
            csv.write_record([
                tag,
                &fmt_opt(entry.country),
                &entry.entropy.to_string(),
                &entry.support.to_string(),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("attachment.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["user_id", "status", "ha", "da", "labeled_occurrences"])?;
        for score in &scores {
            csv.write_record([
                score.user_id.as_str(),
                &score.status.to_string(),
                &fmt_opt(score.ha),
                &fmt_opt(score.da),
                &score.labeled_occurrences.to_string(),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })?;

    let migrant_hist = attachment_histograms(&scores, Status::Migrant, config.bins)?;
    let native_hist = attachment_histograms(&scores, Status::Native, config.bins)?;
    writer.write("attachment_hist.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["status", "index", "bin_lo", "bin_hi", "count"])?;
        for hist in [&migrant_hist, &native_hist] {
            for (name, h) in [("ha", &hist.ha), ("da", &hist.da)] {
                for (i, &count) in h.counts.iter().enumerate() {
                    csv.write_record([
                        &hist.status.to_string(),
                        name,
                        &h.edges[i].to_string(),
                        &h.edges[i + 1].to_string(),
                        &count.to_string(),
                    ])?;
                }
            }
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("attachment_report.json", |buf| {
        let labeled_tags = table.iter().filter(|(_, e)| e.country.is_some()).count();
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "hashtags": table.len(),
            "labeled_hashtags": labeled_tags,
            "scored_users": scores.len(),
            "skipped_unknown_status": skipped_unknown,
            "means": {
                "migrant": { "ha": migrant_hist.ha_mean, "da": migrant_hist.da_mean },
                "native": { "ha": native_hist.ha_mean, "da": native_hist.da_mean },
            },
        });
        serde_json::to_writer_pretty(buf, &report)?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

pub fn run_features(
    users: &Path,
    tweets: &Path,
    edges: &Path,
    labels_path: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let (user_store, _) = ingest_users(users)?;
    let (mut tweet_store, _) = ingest_tweets(tweets)?;
    let (edge_list, _) = ingest_edges(edges)?;
    let labels = load_labels(labels_path)?;
    tweet_store.register_users(&user_store);

    let reference = chrono::NaiveDate::from_ymd_opt(config.year, 12, 31)
        .context("invalid reference year")?;
    let window = config.recent_window().map_err(|e| {
        anyhow::Error::from(migranet::Error::Validation(format!("{e:#}")))
    })?;

    let mut skipped_missing_profile = 0usize;
    let mut skipped_age = 0usize;
    let mut rows: Vec<[String; 11]> = Vec::new();
    for label in &labels {
        if label.status == Status::Unknown {
            continue;
        }
        let Some(profile) = user_store.get(&label.user_id) else {
            skipped_missing_profile += 1;
            continue;
        };
        let age = match account_age_days(profile, reference) {
            Ok(age) => age,
            Err(_) => {
                skipped_age += 1;
                continue;
            }
        };
        let (tweet_countries, tweet_languages) =
            recent_tweet_features(&tweet_store, &label.user_id, &window)?;
        let friends = friend_features(&tweet_store, &edge_list, &label.user_id, &window)?;
        rows.push([
            label.user_id.clone(),
            label.status.to_string(),
            age.to_string(),
            profile.followers_count.to_string(),
            profile.friends_count.to_string(),
            profile.statuses_count.to_string(),
            u8::from(profile.verified).to_string(),
            tweet_countries.to_string(),
            tweet_languages.to_string(),
            friends.n_countries.to_string(),
            friends.n_languages.to_string(),
        ]);
    }

    let mut writer = ArtifactWriter::new(out, "features", config)?;
    let config_line = writer.config_line();
    writer.write("features.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record([
            "user_id",
            "status",
            "account_age_days",
            "followers",
            "friends",
            "statuses",
            "verified",
            "tweet_countries",
            "tweet_languages",
            "friend_countries",
            "friend_languages",
        ])?;
        for row in &rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
        Ok(())
    })?;
    writer.write("features_report.json", |buf| {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "rows": rows.len(),
            "skipped_missing_profile": skipped_missing_profile,
            "skipped_account_age_errors": skipped_age,
        });
        serde_json::to_writer_pretty(buf, &report)?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// graph
// ---------------------------------------------------------------------------

pub fn run_graph(
    edges: &Path,
    labels_path: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let (giant, build_stats, share) = build_giant(edges, labels_path)?;
    let summary = summarize::<f64>(&giant, config.path_mode(giant.n()), share);

    let centrality_config = config.centrality();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(ALL_MEASURES.len());
    for measure in ALL_MEASURES {
        vectors.push(centrality(&giant, measure, &centrality_config)?);
    }

    let (ins, outs, totals) = giant.degree_sequences();
    let power_law = match fit_power_law::<f64>(&totals) {
        Ok(fit) => json!(fit),
        Err(e) => json!({ "error": e.to_string() }),
    };

    // Top users and their status tallies per measure.
    let mut tallies = BTreeMap::new();
    let mut top_rows: Vec<[String; 5]> = Vec::new();
    for (measure, scores) in ALL_MEASURES.iter().zip(&vectors) {
        let top = top_k(scores, config.top_k);
        let nodes: Vec<u32> = top.iter().map(|(v, _)| *v).collect();
        let (migrants, natives, unknown) = status_tally(&giant, &nodes);
        tallies.insert(
            measure.name(),
            json!({ "migrants": migrants, "natives": natives, "unknown": unknown }),
        );
        for (rank, (node, score)) in top.iter().enumerate() {
            top_rows.push([
                measure.name().to_string(),
                (rank + 1).to_string(),
                giant.user_id(*node).to_string(),
                score.to_string(),
                giant.status(*node).to_string(),
            ]);
        }
    }

    let mut writer = ArtifactWriter::new(out, "graph", config)?;
    let config_line = writer.config_line();

    writer.write("summary.json", |buf| {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "build": build_stats,
            "giant": summary,
            "power_law": power_law,
            "top_status_tallies": tallies,
        });
        serde_json::to_writer_pretty(buf, &doc)?;
        Ok(())
    })?;

    writer.write("centrality.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        let mut header = vec!["user_id".to_string()];
        header.extend(ALL_MEASURES.iter().map(|m| m.name().to_string()));
        csv.write_record(&header)?;
        for v in 0..giant.n() as u32 {
            let mut row = vec![giant.user_id(v).to_string()];
            row.extend(vectors.iter().map(|scores| scores[v as usize].to_string()));
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("centrality_correlations.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let matrix = migranet::graph::centrality_correlations(&vectors);
        let mut csv = csv::Writer::from_writer(buf);
        let mut header = vec!["measure".to_string()];
        header.extend(ALL_MEASURES.iter().map(|m| m.name().to_string()));
        csv.write_record(&header)?;
        for (i, measure) in ALL_MEASURES.iter().enumerate() {
            let mut row = vec![measure.name().to_string()];
            row.extend(matrix[i].iter().map(|r| fmt_opt(*r)));
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("degree_hist.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["kind", "bin_lo", "bin_hi", "count"])?;
        for (kind, degrees) in [("in", &ins), ("out", &outs), ("total", &totals)] {
            let values: Vec<f64> = if config.log_bins {
                degrees.iter().filter(|&&d| d > 0).map(|&d| d as f64).collect()
            } else {
                degrees.iter().map(|&d| d as f64).collect()
            };
            if config.log_bins {
                // Zero-degree nodes cannot appear in log bins; report them
                // as a degenerate [0, 0] row.
                let zeros = degrees.iter().filter(|&&d| d == 0).count();
                csv.write_record([kind, "0", "0", &zeros.to_string()])?;
            }
            let hist = migranet::stats::histogram(&values, config.bins, config.log_bins)?;
            for (i, &count) in hist.counts.iter().enumerate() {
                csv.write_record([
                    kind,
                    &hist.edges[i].to_string(),
                    &hist.edges[i + 1].to_string(),
                    &count.to_string(),
                ])?;
            }
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("top_central.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["measure", "rank", "user_id", "score", "status"])?;
        for row in &top_rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// assort
// ---------------------------------------------------------------------------

pub fn run_assort(
    edges: &Path,
    labels_path: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let (giant, _, _) = build_giant(edges, labels_path)?;

    let degree_out_in: Option<f64> = degree_assortativity(&giant, DegreeMode::OutIn);
    let degree_total: Option<f64> = degree_assortativity(&giant, DegreeMode::Total);
    let by_residence: Option<f64> =
        categorical_assortativity(&giant, NodeAttribute::Residence)?;
    let by_nationality: Option<f64> =
        categorical_assortativity(&giant, NodeAttribute::Nationality)?;
    let by_status: Option<f64> = categorical_assortativity(&giant, NodeAttribute::Status)?;

    let attribute = config.local_attribute()?;
    let local = local_assortativity(&giant, attribute, &config.alpha_grid)?;
    let statuses: Vec<Status> = (0..giant.n() as u32).map(|v| giant.status(v)).collect();
    let stacked = assortativity_histograms(&local.scores, &statuses, config.bins)?;

    let mut writer = ArtifactWriter::new(out, "assort", config)?;
    let config_line = writer.config_line();

    writer.write("global_assortativity.json", |buf| {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "degree_out_in": degree_out_in,
            "degree_total": degree_total,
            "by_residence": by_residence,
            "by_nationality": by_nationality,
            "by_status": by_status,
        });
        serde_json::to_writer_pretty(buf, &doc)?;
        Ok(())
    })?;

    writer.write("local_assortativity.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["user_id", "status", "score"])?;
        for v in 0..giant.n() as u32 {
            csv.write_record([
                giant.user_id(v),
                &giant.status(v).to_string(),
                &local.scores[v as usize].to_string(),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("local_assortativity_hist.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["status", "bin_lo", "bin_hi", "count"])?;
        for (status, counts) in &stacked.per_status {
            for (i, &count) in counts.iter().enumerate() {
                csv.write_record([
                    &status.to_string(),
                    &stacked.edges[i].to_string(),
                    &stacked.edges[i + 1].to_string(),
                    &count.to_string(),
                ])?;
            }
        }
        csv.flush()?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct FeatureRow {
    #[allow(dead_code)]
    user_id: String,
    status: String,
    account_age_days: f64,
    followers: f64,
    friends: f64,
    statuses: f64,
    verified: f64,
    tweet_countries: f64,
    tweet_languages: f64,
    friend_countries: f64,
    friend_languages: f64,
}

pub fn run_compare(features: &Path, out: &Path, config: &PipelineConfig) -> Result<()> {
    let file = std::fs::File::open(features).map_err(|source| migranet::Error::Io {
        path: features.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(std::io::BufReader::new(file));

    let mut migrants: Vec<FeatureRow> = Vec::new();
    let mut natives: Vec<FeatureRow> = Vec::new();
    for row in reader.deserialize::<FeatureRow>() {
        let row = row.with_context(|| format!("malformed row in {}", features.display()))?;
        match row.status.as_str() {
            "migrant" => migrants.push(row),
            "native" => natives.push(row),
            _ => {}
        }
    }

    type Extract = fn(&FeatureRow) -> f64;
    let features_list: [(&str, Extract); 9] = [
        ("account_age_days", |r| r.account_age_days),
        ("followers", |r| r.followers),
        ("friends", |r| r.friends),
        ("statuses", |r| r.statuses),
        ("verified", |r| r.verified),
        ("tweet_countries", |r| r.tweet_countries),
        ("tweet_languages", |r| r.tweet_languages),
        ("friend_countries", |r| r.friend_countries),
        ("friend_languages", |r| r.friend_languages),
    ];

    let mut comparisons = Vec::new();
    for (name, extract) in features_list {
        let a: Vec<f64> = migrants.iter().map(extract).collect();
        let b: Vec<f64> = natives.iter().map(extract).collect();
        let ks = if a.is_empty() || b.is_empty() {
            None
        } else {
            Some(ks_two_sample(&a, &b)?)
        };
        comparisons.push(json!({
            "feature": name,
            "migrant": summary_json(&group_summary(&a)),
            "native": summary_json(&group_summary(&b)),
            "d_statistic": ks.map(|k| k.d_statistic),
            "p_value": ks.map(|k| k.p_value),
        }));
    }

    let mut writer = ArtifactWriter::new(out, "compare", config)?;
    writer.write("comparisons.json", |buf| {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "migrants": migrants.len(),
            "natives": natives.len(),
            "comparisons": comparisons,
        });
        serde_json::to_writer_pretty(buf, &doc)?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

fn write_flow_matrix(buf: &mut Vec<u8>, config_line: &str, matrix: &FlowMatrix) -> Result<()> {
    csv_preamble(buf, config_line)?;
    let mut nationalities: Vec<_> = matrix.counts.keys().map(|(n, _)| *n).collect();
    nationalities.sort();
    nationalities.dedup();
    let mut residences: Vec<_> = matrix.counts.keys().map(|(_, r)| *r).collect();
    residences.sort();
    residences.dedup();

    let mut csv = csv::Writer::from_writer(buf);
    let mut header = vec!["nationality".to_string()];
    header.extend(residences.iter().map(|r| r.to_string()));
    csv.write_record(&header)?;
    for nat in &nationalities {
        let mut row = vec![nat.to_string()];
        for res in &residences {
            let count = matrix.counts.get(&(*nat, *res)).copied().unwrap_or(0);
            row.push(count.to_string());
        }
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn run_report(
    labels_path: &Path,
    tweets: &Path,
    out: &Path,
    config: &PipelineConfig,
) -> Result<()> {
    let labels = load_labels(labels_path)?;
    let (tweet_store, _) = ingest_tweets(tweets)?;

    let flows = migration_matrix(&labels);
    let filtered = flows.filtered(config.min_count);

    // Hashtag occurrence counts per status group.
    let mut group_counts: BTreeMap<Status, BTreeMap<String, u64>> = BTreeMap::new();
    for label in &labels {
        if label.status == Status::Unknown {
            continue;
        }
        let Ok(usage) = migranet::corpus::hashtag_usage(&tweet_store, &label.user_id) else {
            continue;
        };
        let group = group_counts.entry(label.status).or_default();
        for (tag, count) in usage {
            *group.entry(tag).or_insert(0) += count;
        }
    }

    let mut status_counts: BTreeMap<String, usize> = BTreeMap::new();
    for label in &labels {
        *status_counts.entry(label.status.to_string()).or_insert(0) += 1;
    }

    let mut writer = ArtifactWriter::new(out, "report", config)?;
    let config_line = writer.config_line();

    writer.write("migration_matrix.csv", |buf| {
        write_flow_matrix(buf, &config_line, &flows)
    })?;
    writer.write("migration_matrix_filtered.csv", |buf| {
        write_flow_matrix(buf, &config_line, &filtered)
    })?;

    writer.write("top_hashtags.csv", |buf| {
        csv_preamble(buf, &config_line)?;
        let mut csv = csv::Writer::from_writer(buf);
        csv.write_record(["status", "rank", "hashtag", "scaled_count"])?;
        for (status, counts) in &group_counts {
            let top: Vec<(String, f64)> = top_hashtags(counts, config.top_k);
            for (rank, (tag, scaled)) in top.iter().enumerate() {
                csv.write_record([
                    &status.to_string(),
                    &(rank + 1).to_string(),
                    tag,
                    &scaled.to_string(),
                ])?;
            }
        }
        csv.flush()?;
        Ok(())
    })?;

    writer.write("report.json", |buf| {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": serde_json::to_value(config)?,
            "status_counts": status_counts,
            "migration_flow_total": flows.total(),
            "migration_flow_pairs": flows.counts.len(),
            "migration_flow_pairs_filtered": filtered.counts.len(),
        });
        serde_json::to_writer_pretty(buf, &doc)?;
        Ok(())
    })?;
    writer.finalize()?;
    Ok(())
}

//! Command-line pipeline over the migranet library.

mod config;
mod manifest;
mod stages;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::PipelineConfig;
use std::path::PathBuf;

const EXIT_CODES_HELP: &str = "\
Configuration resolves in order: defaults, --config file (flat `key = value`
lines), MIGRANET_<KEY> environment variables, then --set KEY=VALUE flags.

Exit codes:
  0  success
  2  missing or unreadable input
  3  configuration or input schema violation
  4  numeric failure (non-convergence or degenerate input)
  1  any other error";

#[derive(Parser)]
#[command(
    name = "migranet",
    version,
    about = "Migrant/native labeling, attachment indices, and social-graph analysis for geo-tagged tweet corpora",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one configuration key (repeatable), e.g. --set beta=0.7.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Cap worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic synthetic corpus with planted labels.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Generator seed (shorthand for --set seed=N).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate corpus files and report ingest diagnostics.
    Ingest {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Infer residence/nationality labels and migrant/native status.
    Label {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label hashtags with countries and score home/destination attachment.
    Attachment {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract per-user profile and tweet features for labeled users.
    Features {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the follow graph and compute structural metrics and centralities.
    Graph {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Global and multiscale local assortativity.
    Assort {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kolmogorov-Smirnov battery over extracted features.
    Compare {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate reports: migration flows and top hashtags.
    Report {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            let (kind, code) = classify(&err);
            let record = serde_json::json!({
                "error": format!("{err:#}"),
                "kind": kind,
                "exit_code": code,
            });
            eprintln!("{record}");
            std::process::exit(code);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = PipelineConfig::load(cli.config.as_deref())
        .map_err(schema_error)?;
    for pair in &cli.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| schema_error(anyhow::anyhow!("--set expects KEY=VALUE, got `{pair}`")))?;
        config
            .set(key.trim(), value.trim())
            .map_err(schema_error)?;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .ok();
    }

    match &cli.command {
        Command::Synth { out, seed } => {
            if let Some(seed) = seed {
                config.seed = *seed;
            }
            stages::run_synth(out, &config)
        }
        Command::Ingest {
            users,
            tweets,
            edges,
            out,
        } => stages::run_ingest(users, tweets, edges, out, &config),
        Command::Label {
            users,
            tweets,
            edges,
            out,
        } => stages::run_label(users, tweets, edges, out, &config),
        Command::Attachment {
            labels,
            tweets,
            out,
        } => stages::run_attachment(labels, tweets, out, &config),
        Command::Features {
            users,
            tweets,
            edges,
            labels,
            out,
        } => stages::run_features(users, tweets, edges, labels, out, &config),
        Command::Graph { edges, labels, out } => stages::run_graph(edges, labels, out, &config),
        Command::Assort { edges, labels, out } => stages::run_assort(edges, labels, out, &config),
        Command::Compare { features, out } => stages::run_compare(features, out, &config),
        Command::Report {
            labels,
            tweets,
            out,
        } => stages::run_report(labels, tweets, out, &config),
    }
}

/// Tag a configuration/schema problem so it maps to exit code 3.
fn schema_error(err: anyhow::Error) -> anyhow::Error {
    match err.downcast::<migranet::Error>() {
        Ok(inner) => anyhow::Error::from(inner),
        Err(err) => anyhow::Error::from(migranet::Error::Validation(format!("{err:#}"))),
    }
}

fn classify(err: &anyhow::Error) -> (&'static str, i32) {
    use migranet::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Io { .. } | E::EmptyStore { .. } => ("missing_input", 2),
                E::Validation(_) | E::UnknownUser(_) => ("schema", 3),
                E::Degenerate(_) | E::NoConvergence { .. } => ("numeric", 4),
            };
        }
        if let Some(io) = cause.downcast_ref::<std::io::Error>() {
            if io.kind() == std::io::ErrorKind::NotFound {
                return ("missing_input", 2);
            }
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return ("schema", 3);
        }
        if cause.downcast_ref::<csv::Error>().is_some() {
            return ("schema", 3);
        }
    }
    ("other", 1)
}

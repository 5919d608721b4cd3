//! Pipeline configuration: defaults, flat key-value file, environment
//! overrides.
//!
//! Precedence, lowest to highest: built-in defaults, config file, `MIGRANET_*`
//! environment variables, command-line flags. Every run echoes the resolved
//! configuration into its artifacts' metadata.

use anyhow::{bail, Context, Result};
use migranet::country::CountryCode;
use migranet::synth::SynthConfig;
use serde::Serialize;
use std::path::Path;

/// Every knob of the pipeline, resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    // labeling
    pub year: i32,
    pub min_residence_days: u32,
    pub beta: f64,
    pub min_nationality_evidence: u32,
    // attachment
    pub entropy_threshold: f64,
    pub min_support: u64,
    // features
    pub recent_k: usize,
    /// Optional RFC 3339 bounds applied before the recent-k window.
    pub recent_since: Option<String>,
    pub recent_until: Option<String>,
    // graph
    pub betweenness_exact_threshold: usize,
    pub betweenness_sources: usize,
    pub path_exact_threshold: usize,
    pub path_sources: usize,
    pub pagerank_damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub eigenvector_tol: f64,
    pub eigenvector_max_iter: usize,
    pub closeness_outgoing: bool,
    // assortativity
    pub alpha_grid: Vec<f64>,
    pub local_attribute: String,
    // reporting
    pub min_count: u64,
    pub top_k: usize,
    pub bins: usize,
    pub log_bins: bool,
    // misc
    pub seed: u64,
    pub threads: usize,
    // synthetic corpus
    pub synth_users: usize,
    pub synth_migrant_fraction: f64,
    pub synth_countries: Vec<String>,
    pub synth_p_in: f64,
    pub synth_p_out: f64,
    pub synth_tweets_per_user: usize,
    pub synth_hashtag_vocab: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let synth = SynthConfig::default();
        PipelineConfig {
            year: 2018,
            min_residence_days: 10,
            beta: 0.5,
            min_nationality_evidence: 5,
            entropy_threshold: 0.5,
            min_support: 5,
            recent_k: 200,
            recent_since: None,
            recent_until: None,
            betweenness_exact_threshold: 10_000,
            betweenness_sources: 2048,
            path_exact_threshold: 10_000,
            path_sources: 2048,
            pagerank_damping: 0.85,
            pagerank_tol: 1e-10,
            pagerank_max_iter: 1_000,
            eigenvector_tol: 1e-10,
            eigenvector_max_iter: 1_000,
            closeness_outgoing: false,
            alpha_grid: (0..10).map(|i| i as f64 / 10.0).collect(),
            local_attribute: "nationality".to_string(),
            min_count: 10,
            top_k: 10,
            bins: 50,
            log_bins: false,
            seed: 42,
            threads: 0,
            synth_users: synth.n_users,
            synth_migrant_fraction: synth.migrant_fraction,
            synth_countries: synth.countries.iter().map(|c| c.to_string()).collect(),
            synth_p_in: synth.p_in,
            synth_p_out: synth.p_out,
            synth_tweets_per_user: synth.tweets_per_user,
            synth_hashtag_vocab: synth.hashtag_vocab,
        }
    }
}

impl PipelineConfig {
    /// Resolve from an optional file plus the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut config = PipelineConfig::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!(
                        "{}:{}: expected `key = value`, got `{line}`",
                        path.display(),
                        lineno + 1
                    );
                };
                config
                    .set(key.trim(), value.trim())
                    .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
            }
        }
        config.apply_env()?;
        Ok(config)
    }

    /// Apply `MIGRANET_<KEY>` environment overrides.
    fn apply_env(&mut self) -> Result<()> {
        for (key, value) in std::env::vars() {
            if let Some(name) = key.strip_prefix("MIGRANET_") {
                self.set(&name.to_lowercase(), &value)
                    .with_context(|| format!("environment variable {key}"))?;
            }
        }
        Ok(())
    }

    /// Set one key from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| anyhow::anyhow!("invalid value `{value}` for `{key}`: {e}"))
        }
        match key {
            "year" => self.year = parse(key, value)?,
            "min_residence_days" => self.min_residence_days = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "min_nationality_evidence" => self.min_nationality_evidence = parse(key, value)?,
            "entropy_threshold" => self.entropy_threshold = parse(key, value)?,
            "min_support" => self.min_support = parse(key, value)?,
            "recent_k" => self.recent_k = parse(key, value)?,
            "recent_since" => self.recent_since = non_empty(value),
            "recent_until" => self.recent_until = non_empty(value),
            "betweenness_exact_threshold" => {
                self.betweenness_exact_threshold = parse(key, value)?
            }
            "betweenness_sources" => self.betweenness_sources = parse(key, value)?,
            "path_exact_threshold" => self.path_exact_threshold = parse(key, value)?,
            "path_sources" => self.path_sources = parse(key, value)?,
            "pagerank_damping" => self.pagerank_damping = parse(key, value)?,
            "pagerank_tol" => self.pagerank_tol = parse(key, value)?,
            "pagerank_max_iter" => self.pagerank_max_iter = parse(key, value)?,
            "eigenvector_tol" => self.eigenvector_tol = parse(key, value)?,
            "eigenvector_max_iter" => self.eigenvector_max_iter = parse(key, value)?,
            "closeness_outgoing" => self.closeness_outgoing = parse(key, value)?,
            "alpha_grid" => self.alpha_grid = parse_list(key, value)?,
            "local_attribute" => self.local_attribute = value.to_string(),
            "min_count" => self.min_count = parse(key, value)?,
            "top_k" => self.top_k = parse(key, value)?,
            "bins" => self.bins = parse(key, value)?,
            "log_bins" => self.log_bins = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "synth_users" => self.synth_users = parse(key, value)?,
            "synth_migrant_fraction" => self.synth_migrant_fraction = parse(key, value)?,
            "synth_countries" => {
                self.synth_countries = value.split(',').map(|s| s.trim().to_string()).collect()
            }
            "synth_p_in" => self.synth_p_in = parse(key, value)?,
            "synth_p_out" => self.synth_p_out = parse(key, value)?,
            "synth_tweets_per_user" => self.synth_tweets_per_user = parse(key, value)?,
            "synth_hashtag_vocab" => self.synth_hashtag_vocab = parse(key, value)?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    pub fn recent_window(&self) -> Result<migranet::corpus::RecentWindow> {
        let parse_bound = |bound: &Option<String>, key: &str| -> Result<_> {
            bound
                .as_deref()
                .map(|text| {
                    chrono::DateTime::parse_from_rfc3339(text)
                        .map(|dt| dt.with_timezone(&chrono::Utc))
                        .map_err(|e| anyhow::anyhow!("invalid RFC 3339 value for `{key}`: {e}"))
                })
                .transpose()
        };
        Ok(migranet::corpus::RecentWindow {
            k: self.recent_k,
            since: parse_bound(&self.recent_since, "recent_since")?,
            until: parse_bound(&self.recent_until, "recent_until")?,
        })
    }

    pub fn labeling(&self) -> migranet::labeling::LabelingConfig {
        migranet::labeling::LabelingConfig {
            year: self.year,
            min_residence_days: self.min_residence_days,
            beta: self.beta,
            min_nationality_evidence: self.min_nationality_evidence,
        }
    }

    pub fn centrality(&self) -> migranet::graph::CentralityConfig {
        migranet::graph::CentralityConfig {
            betweenness_exact_threshold: self.betweenness_exact_threshold,
            betweenness_sources: self.betweenness_sources,
            seed: self.seed,
            pagerank_damping: self.pagerank_damping,
            pagerank_tol: self.pagerank_tol,
            pagerank_max_iter: self.pagerank_max_iter,
            eigenvector_tol: self.eigenvector_tol,
            eigenvector_max_iter: self.eigenvector_max_iter,
            closeness_outgoing: self.closeness_outgoing,
        }
    }

    pub fn path_mode(&self, n: usize) -> migranet::graph::PathMode {
        if n <= self.path_exact_threshold {
            migranet::graph::PathMode::Exact
        } else {
            migranet::graph::PathMode::Sampled {
                sources: self.path_sources,
                seed: self.seed,
            }
        }
    }

    pub fn synth(&self) -> Result<SynthConfig> {
        let countries: Result<Vec<CountryCode>> = self
            .synth_countries
            .iter()
            .map(|c| CountryCode::new(c).map_err(|e| anyhow::anyhow!("{e}")))
            .collect();
        Ok(SynthConfig {
            n_users: self.synth_users,
            migrant_fraction: self.synth_migrant_fraction,
            countries: countries?,
            p_in: self.synth_p_in,
            p_out: self.synth_p_out,
            tweets_per_user: self.synth_tweets_per_user,
            hashtag_vocab: self.synth_hashtag_vocab,
            seed: self.seed,
        })
    }

    pub fn local_attribute(&self) -> Result<migranet::assortativity::NodeAttribute> {
        match self.local_attribute.as_str() {
            "nationality" => Ok(migranet::assortativity::NodeAttribute::Nationality),
            "residence" => Ok(migranet::assortativity::NodeAttribute::Residence),
            "status" => Ok(migranet::assortativity::NodeAttribute::Status),
            other => bail!("local_attribute must be nationality|residence|status, got `{other}`"),
        }
    }
}

fn non_empty(value: &str) -> Option<String> {
    let trimmed = value.trim();
    (!trimmed.is_empty()).then(|| trimmed.to_string())
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| anyhow::anyhow!("invalid entry `{s}` in `{key}`: {e}"))
        })
        .collect()
}

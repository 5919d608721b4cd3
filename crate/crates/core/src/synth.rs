//! Deterministic synthetic corpus generation.
//!
//! Users get a planted nationality (round-robin over the country list) and
//! migrants additionally a different residence. Tweets land on distinct
//! 2018 days, mostly in the residence country with a home-country minority
//! for migrants, so the labeling stage can recover the planted truth.
//! Edges follow a planted-homophily block model over nationality groups.
//! Everything derives from the single seed.

use crate::corpus::{FollowEdge, Tweet, UserProfile};
use crate::country::CountryCode;
use crate::error::{Error, Result};
use crate::labeling::Status;
use chrono::{NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_users: usize,
    pub migrant_fraction: f64,
    pub countries: Vec<CountryCode>,
    /// Directed edge probability within a nationality group.
    pub p_in: f64,
    /// Directed edge probability across nationality groups.
    pub p_out: f64,
    /// Tweets per user; each lands on a distinct 2018 day.
    pub tweets_per_user: usize,
    /// Hashtag vocabulary size (0 disables hashtags).
    pub hashtag_vocab: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 1_000,
            migrant_fraction: 0.02,
            countries: ["IT", "DE", "FR", "GB", "ES"]
                .iter()
                .map(|c| CountryCode::new(c).expect("valid code"))
                .collect(),
            p_in: 0.01,
            p_out: 0.001,
            tweets_per_user: 40,
            hashtag_vocab: 200,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::validation("n_users must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.migrant_fraction) {
            return Err(Error::validation("migrant_fraction must lie in [0, 1]"));
        }
        if self.countries.is_empty() {
            return Err(Error::validation("need at least one country"));
        }
        if self.migrant_fraction > 0.0 && self.countries.len() < 2 {
            return Err(Error::validation(
                "migrants need at least two countries to differ on",
            ));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.tweets_per_user == 0 || self.tweets_per_user > 365 {
            return Err(Error::validation(
                "tweets_per_user must lie in 1..=365 (distinct 2018 days)",
            ));
        }
        Ok(())
    }
}

/// Planted labels emitted alongside the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub user_id: String,
    pub residence: CountryCode,
    pub nationality: CountryCode,
    pub status: Status,
}

/// A generated corpus, in memory.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub users: Vec<UserProfile>,
    pub tweets: Vec<Tweet>,
    pub edges: Vec<FollowEdge>,
    pub truth: Vec<GroundTruth>,
}

/// Share of a migrant's tweet days spent in the residence country; most of
/// the rest land in the home country.
const MIGRANT_RESIDENCE_SHARE: f64 = 0.70;
const MIGRANT_HOME_SHARE: f64 = 0.25;
/// Share of a native's tweet days spent at home.
const NATIVE_HOME_SHARE: f64 = 0.90;

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = config.countries.len();
    let n = config.n_users;
    let width = n.to_string().len().max(4);

    // Planted labels: nationality round-robin, migrants scattered by rng.
    let n_migrants = (n as f64 * config.migrant_fraction).round() as usize;
    let mut is_migrant = vec![false; n];
    if n_migrants > 0 {
        for idx in rand::seq::index::sample(&mut rng, n, n_migrants) {
            is_migrant[idx] = true;
        }
    }

    let mut truth = Vec::with_capacity(n);
    let mut users = Vec::with_capacity(n);
    let epoch = NaiveDate::from_ymd_opt(2007, 1, 1).expect("valid date");
    for (i, &migrant) in is_migrant.iter().enumerate() {
        let user_id = format!("u{i:0width$}");
        let nationality = config.countries[i % k];
        let residence = if migrant {
            // Uniform over the other countries.
            let offset = rng.random_range(1..k);
            config.countries[(i % k + offset) % k]
        } else {
            nationality
        };
        let status = if migrant {
            Status::Migrant
        } else {
            Status::Native
        };
        truth.push(GroundTruth {
            user_id: user_id.clone(),
            residence,
            nationality,
            status,
        });

        let created_at = epoch + chrono::Duration::days(rng.random_range(0..4_000));
        // Heavy-tailed counts via an exponentiated uniform.
        let heavy = |rng: &mut ChaCha8Rng, scale: f64| -> u64 {
            let u: f64 = rng.random();
            (scale * (6.0 * u).exp_m1()) as u64
        };
        users.push(UserProfile {
            user_id,
            created_at,
            followers_count: heavy(&mut rng, 25.0),
            friends_count: heavy(&mut rng, 20.0),
            statuses_count: heavy(&mut rng, 60.0),
            verified: rng.random_bool(0.04),
        });
    }

    let tweets = generate_tweets(config, &truth, &mut rng, width);
    let edges = generate_edges(config, &mut rng, width);

    Ok(SynthCorpus {
        users,
        tweets,
        edges,
        truth,
    })
}

fn generate_tweets(
    config: &SynthConfig,
    truth: &[GroundTruth],
    rng: &mut ChaCha8Rng,
    width: usize,
) -> Vec<Tweet> {
    let k = config.countries.len();
    let pools = TagPools::new(config);
    let mut tweets = Vec::with_capacity(truth.len() * config.tweets_per_user);
    for (i, user) in truth.iter().enumerate() {
        let mut days = rand::seq::index::sample(rng, 365, config.tweets_per_user).into_vec();
        days.sort_unstable();
        for day in days {
            let roll: f64 = rng.random();
            let country = if user.status == Status::Migrant {
                if roll < MIGRANT_RESIDENCE_SHARE {
                    user.residence
                } else if roll < MIGRANT_RESIDENCE_SHARE + MIGRANT_HOME_SHARE {
                    user.nationality
                } else {
                    config.countries[rng.random_range(0..k)]
                }
            } else if roll < NATIVE_HOME_SHARE {
                user.residence
            } else {
                config.countries[rng.random_range(0..k)]
            };
            let timestamp = Utc
                .with_ymd_and_hms(2018, 1, 1, 0, 0, 0)
                .unwrap()
                + chrono::Duration::days(day as i64)
                + chrono::Duration::seconds(rng.random_range(0..86_400));
            let hashtags = pools.sample(config, user, rng);
            tweets.push(Tweet {
                tweet_id: format!("t{i:0width$}d{day:03}"),
                user_id: user.user_id.clone(),
                timestamp,
                country: Some(country),
                language: Some(country.as_str().to_lowercase()),
                hashtags,
            });
        }
    }
    tweets
}

/// Hashtag `tag-i` is homed in country `i % k`, except every seventh tag,
/// which is global. Users favor tags homed where they live and, for
/// migrants, where they come from.
struct TagPools {
    global: Vec<usize>,
    per_country: Vec<Vec<usize>>,
}

impl TagPools {
    fn new(config: &SynthConfig) -> Self {
        let vocab = config.hashtag_vocab;
        let k = config.countries.len();
        TagPools {
            global: (0..vocab).filter(|i| i % 7 == 0).collect(),
            per_country: (0..k)
                .map(|c| (0..vocab).filter(|i| i % 7 != 0 && i % k == c).collect())
                .collect(),
        }
    }

    fn sample(&self, config: &SynthConfig, user: &GroundTruth, rng: &mut ChaCha8Rng) -> Vec<String> {
        if config.hashtag_vocab == 0 {
            return Vec::new();
        }
        let count = match rng.random_range(0..10u32) {
            0..=4 => 0,
            5..=7 => 1,
            _ => 2,
        };
        let country_index = |c: CountryCode| {
            config
                .countries
                .iter()
                .position(|&x| x == c)
                .expect("country from config")
        };
        (0..count)
            .map(|_| {
                let roll: f64 = rng.random();
                let pool = if roll < 0.2 {
                    &self.global
                } else if user.status == Status::Migrant && roll < 0.6 {
                    &self.per_country[country_index(user.nationality)]
                } else {
                    &self.per_country[country_index(user.residence)]
                };
                // Rank-skewed pick inside the pool.
                let u: f64 = rng.random();
                let skew = u * u;
                let tag = if pool.is_empty() {
                    0
                } else {
                    pool[(skew * pool.len() as f64) as usize % pool.len()]
                };
                format!("tag-{tag:04}")
            })
            .collect()
    }
}

/// Planted-homophily directed edges: probability `p_in` inside a
/// nationality group, `p_out` across, sampled by geometric skipping.
fn generate_edges(config: &SynthConfig, rng: &mut ChaCha8Rng, width: usize) -> Vec<FollowEdge> {
    let k = config.countries.len();
    let n = config.n_users;
    let user_id = |i: usize| format!("u{i:0width$}");
    // Group g holds users with index ≡ g (mod k).
    let group_size = |g: usize| (n + k - 1 - g) / k;
    let member = |g: usize, j: usize| g + j * k;

    let mut edges = Vec::new();
    for g in 0..k {
        for h in 0..k {
            let p = if g == h { config.p_in } else { config.p_out };
            if p <= 0.0 {
                continue;
            }
            let rows = group_size(g);
            let cols = group_size(h);
            let cells = rows as u64 * cols as u64;
            if cells == 0 {
                continue;
            }
            let mut cursor: u64 = 0;
            if p >= 1.0 {
                while cursor < cells {
                    push_edge(&mut edges, g, h, cursor, cols, member, &user_id);
                    cursor += 1;
                }
                continue;
            }
            let log_q = (1.0 - p).ln();
            loop {
                let u: f64 = rng.random();
                let skip = ((1.0 - u).ln() / log_q).floor() as u64;
                cursor = match cursor.checked_add(skip) {
                    Some(c) => c,
                    None => break,
                };
                if cursor >= cells {
                    break;
                }
                push_edge(&mut edges, g, h, cursor, cols, member, &user_id);
                cursor += 1;
            }
        }
    }
    edges
}

fn push_edge(
    edges: &mut Vec<FollowEdge>,
    g: usize,
    h: usize,
    cell: u64,
    cols: usize,
    member: impl Fn(usize, usize) -> usize,
    user_id: &impl Fn(usize) -> String,
) {
    let row = (cell / cols as u64) as usize;
    let col = (cell % cols as u64) as usize;
    let src = member(g, row);
    let dst = member(h, col);
    if src == dst {
        return;
    }
    edges.push(FollowEdge {
        src: user_id(src),
        dst: user_id(dst),
    });
}

/// Ground truth as label records, for building graphs over planted
/// attributes.
pub fn truth_labels(truth: &[GroundTruth]) -> Vec<crate::labeling::UserLabel> {
    truth
        .iter()
        .map(|t| crate::labeling::UserLabel {
            user_id: t.user_id.clone(),
            residence: Some(t.residence),
            nationality: Some(t.nationality),
            status: t.status,
            evidence: Default::default(),
        })
        .collect()
}

/// File names produced by [`write_corpus`].
pub const CORPUS_FILES: [&str; 4] = [
    "users.jsonl",
    "tweets.jsonl",
    "edges.jsonl",
    "ground_truth.jsonl",
];

/// Write the corpus as four JSONL files under `dir`. Returns the paths.
pub fn write_corpus(corpus: &SynthCorpus, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let write_all = |name: &str, write: &mut dyn FnMut(&mut dyn Write) -> std::io::Result<()>| {
        let path = dir.join(name);
        let file = std::fs::File::create(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let mut out = std::io::BufWriter::new(file);
        write(&mut out)
            .and_then(|_| out.flush())
            .map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        Ok::<PathBuf, Error>(path)
    };

    fn dump<T: Serialize>(items: &[T]) -> impl FnMut(&mut dyn Write) -> std::io::Result<()> + '_ {
        move |out: &mut dyn Write| {
            for item in items {
                serde_json::to_writer(&mut *out, item)?;
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }

    Ok(vec![
        write_all("users.jsonl", &mut dump(&corpus.users))?,
        write_all("tweets.jsonl", &mut dump(&corpus.tweets))?,
        write_all("edges.jsonl", &mut dump(&corpus.edges))?,
        write_all("ground_truth.jsonl", &mut dump(&corpus.truth))?,
    ])
}

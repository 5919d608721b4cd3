//! Residence/nationality inference and migrant/native classification.
//!
//! Residence is the country where a user spent the most distinct
//! geo-tagged calendar days in the reference year. Nationality mixes the
//! user's own tweet-location history with the inferred residences of the
//! accounts they follow. A user whose two labels differ is a migrant; a
//! user whose labels agree is a native; everyone else stays unknown.

use crate::corpus::{EdgeList, Tweet, TweetStore, UserStore};
use crate::country::CountryCode;
use crate::error::{Error, Result};
use chrono::Datelike;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// Migrant/native classification of one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Migrant,
    Native,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::Migrant => f.write_str("migrant"),
            Status::Native => f.write_str("native"),
            Status::Unknown => f.write_str("unknown"),
        }
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "migrant" => Ok(Status::Migrant),
            "native" => Ok(Status::Native),
            "unknown" => Ok(Status::Unknown),
            other => Err(Error::validation(format!("unknown status `{other}`"))),
        }
    }
}

/// Thresholds and weights for label inference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelingConfig {
    /// Reference year for residence inference.
    pub year: i32,
    /// Minimum distinct geo-tagged days before residence is assigned.
    pub min_residence_days: u32,
    /// Weight of the user's own tweet locations versus friend residences.
    pub beta: f64,
    /// Minimum geo-tagged tweets + labeled friends before nationality is
    /// assigned.
    pub min_nationality_evidence: u32,
}

impl Default for LabelingConfig {
    fn default() -> Self {
        LabelingConfig {
            year: 2018,
            min_residence_days: 10,
            beta: 0.5,
            min_nationality_evidence: 5,
        }
    }
}

impl LabelingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_residence_days == 0 || self.min_nationality_evidence == 0 {
            return Err(Error::validation("labeling thresholds must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::validation("beta must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Inputs that went into a user's labels, kept for audit output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Distinct geo-tagged days per country in the reference year.
    pub active_days: BTreeMap<CountryCode, u32>,
    /// Geo-tagged tweets per country in the reference year (tie-breaks).
    pub year_geo_tweets: BTreeMap<CountryCode, u32>,
    /// Distinct geo-tagged days in the reference year, any country.
    pub distinct_geo_days: u32,
    /// Geo-tagged tweets over the full history.
    pub total_geo_tweets: u32,
    /// Followed accounts with an inferred residence.
    pub labeled_friends: u32,
    /// Nationality score per country.
    pub nationality_scores: BTreeMap<CountryCode, f64>,
}

/// Inferred labels of one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserLabel {
    pub user_id: String,
    pub residence: Option<CountryCode>,
    pub nationality: Option<CountryCode>,
    pub status: Status,
    pub evidence: Evidence,
}

/// Migrant/native status from the two country labels.
pub fn classify(residence: Option<CountryCode>, nationality: Option<CountryCode>) -> Status {
    match (residence, nationality) {
        (Some(r), Some(n)) if r == n => Status::Native,
        (Some(_), Some(_)) => Status::Migrant,
        _ => Status::Unknown,
    }
}

/// Distinct-day counts per country for tweets in `year`, plus the
/// geo-tagged tweet counts used for tie-breaks.
fn residence_evidence(tweets: &[Tweet], year: i32) -> Evidence {
    let mut days_per_country: BTreeMap<CountryCode, BTreeSet<chrono::NaiveDate>> = BTreeMap::new();
    let mut year_geo_tweets: BTreeMap<CountryCode, u32> = BTreeMap::new();
    let mut all_days: BTreeSet<chrono::NaiveDate> = BTreeSet::new();
    let mut total_geo_tweets = 0u32;
    for tweet in tweets {
        let Some(country) = tweet.country else {
            continue;
        };
        total_geo_tweets += 1;
        let date = tweet.timestamp.date_naive();
        if date.year() != year {
            continue;
        }
        days_per_country.entry(country).or_default().insert(date);
        *year_geo_tweets.entry(country).or_insert(0) += 1;
        all_days.insert(date);
    }
    Evidence {
        active_days: days_per_country
            .into_iter()
            .map(|(c, days)| (c, days.len() as u32))
            .collect(),
        year_geo_tweets,
        distinct_geo_days: all_days.len() as u32,
        total_geo_tweets,
        ..Evidence::default()
    }
}

/// Country where the user spent the most distinct geo-tagged days in the
/// reference year. `None` when the user has fewer distinct geo-tagged days
/// than `min_residence_days`. Ties fall to the country with more geo-tagged
/// tweets, then to the smaller country code.
pub fn infer_residence(tweets: &[Tweet], config: &LabelingConfig) -> Option<CountryCode> {
    let evidence = residence_evidence(tweets, config.year);
    residence_from_evidence(&evidence, config)
}

fn residence_from_evidence(evidence: &Evidence, config: &LabelingConfig) -> Option<CountryCode> {
    if evidence.distinct_geo_days < config.min_residence_days {
        return None;
    }
    evidence
        .active_days
        .iter()
        .max_by(|(ca, da), (cb, db)| {
            let ta = evidence.year_geo_tweets.get(ca).copied().unwrap_or(0);
            let tb = evidence.year_geo_tweets.get(cb).copied().unwrap_or(0);
            // BTreeMap iterates in ascending code order, so on full ties
            // max_by keeps the later (larger) entry; compare codes in
            // reverse to make the smaller code win.
            da.cmp(db).then(ta.cmp(&tb)).then(cb.cmp(ca))
        })
        .map(|(country, _)| *country)
}

/// Nationality score: `beta` times the share of the user's geo-tagged
/// tweets (full history) in a country, plus `1 - beta` times the share of
/// labeled friends resident there. `None` without enough combined
/// evidence. Ties break to the smaller country code.
pub fn infer_nationality(
    tweets: &[Tweet],
    friend_residences: &[CountryCode],
    config: &LabelingConfig,
) -> Option<CountryCode> {
    let (nationality, _) = nationality_with_scores(tweets, friend_residences, config);
    nationality
}

fn nationality_with_scores(
    tweets: &[Tweet],
    friend_residences: &[CountryCode],
    config: &LabelingConfig,
) -> (Option<CountryCode>, BTreeMap<CountryCode, f64>) {
    let mut geo_counts: BTreeMap<CountryCode, u32> = BTreeMap::new();
    for tweet in tweets {
        if let Some(country) = tweet.country {
            *geo_counts.entry(country).or_insert(0) += 1;
        }
    }
    let total_geo: u32 = geo_counts.values().sum();
    let mut friend_counts: BTreeMap<CountryCode, u32> = BTreeMap::new();
    for &residence in friend_residences {
        *friend_counts.entry(residence).or_insert(0) += 1;
    }
    let total_friends = friend_residences.len() as u32;

    if total_geo + total_friends < config.min_nationality_evidence {
        return (None, BTreeMap::new());
    }

    let mut scores: BTreeMap<CountryCode, f64> = BTreeMap::new();
    if total_geo > 0 {
        for (country, count) in &geo_counts {
            *scores.entry(*country).or_insert(0.0) +=
                config.beta * f64::from(*count) / f64::from(total_geo);
        }
    }
    if total_friends > 0 {
        for (country, count) in &friend_counts {
            *scores.entry(*country).or_insert(0.0) +=
                (1.0 - config.beta) * f64::from(*count) / f64::from(total_friends);
        }
    }

    // A zero score carries no evidence for the country (possible when one
    // side of the mix is weighted out entirely), so it cannot win.
    let best = scores
        .iter()
        .filter(|(_, s)| **s > 0.0)
        .max_by(|(ca, sa), (cb, sb)| {
            sa.partial_cmp(sb)
                .expect("scores are finite")
                .then(cb.cmp(ca))
        })
        .map(|(country, _)| *country);
    (best, scores)
}

/// Labels for every user in the store, computed in two deterministic
/// passes: residences first, then nationalities against the residences of
/// followed accounts.
pub fn label_corpus(
    users: &UserStore,
    tweets: &TweetStore,
    edges: &EdgeList,
    config: &LabelingConfig,
) -> Result<Vec<UserLabel>> {
    config.validate()?;
    if users.is_empty() {
        return Err(Error::validation("user store is empty"));
    }

    let ids: Vec<&str> = users.user_ids().collect();
    let empty: &[Tweet] = &[];
    let user_tweets: Vec<&[Tweet]> = ids
        .iter()
        .map(|id| tweets.tweets_of(id).unwrap_or(empty))
        .collect();

    // Pass 1: residences.
    let evidences: Vec<Evidence> = user_tweets
        .par_iter()
        .map(|tweets| residence_evidence(tweets, config.year))
        .collect();
    let residences: Vec<Option<CountryCode>> = evidences
        .iter()
        .map(|evidence| residence_from_evidence(evidence, config))
        .collect();
    let residence_of: BTreeMap<&str, CountryCode> = ids
        .iter()
        .zip(&residences)
        .filter_map(|(id, r)| r.map(|r| (*id, r)))
        .collect();

    // Pass 2: nationalities from own tweets plus friends' residences.
    let labels: Vec<UserLabel> = ids
        .par_iter()
        .zip(evidences.into_par_iter())
        .zip(user_tweets.par_iter())
        .zip(residences.par_iter())
        .map(|(((id, mut evidence), tweets), residence)| {
            let friend_residences: Vec<CountryCode> = edges
                .out_neighbors(id)
                .iter()
                .filter_map(|friend| residence_of.get(friend.as_str()).copied())
                .collect();
            let (nationality, scores) =
                nationality_with_scores(tweets, &friend_residences, config);
            evidence.labeled_friends = friend_residences.len() as u32;
            evidence.nationality_scores = scores;
            UserLabel {
                user_id: id.to_string(),
                residence: *residence,
                nationality,
                status: classify(*residence, nationality),
                evidence,
            }
        })
        .collect();

    Ok(labels)
}

/// Counts of migrants per (nationality, residence) pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FlowMatrix {
    /// Keyed by (nationality, residence).
    pub counts: BTreeMap<(CountryCode, CountryCode), u64>,
}

impl FlowMatrix {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Rows (nationalities) and columns (residences) that have at least one
    /// cell >= `min_count` are retained; all cells at kept row/column
    /// intersections survive.
    pub fn filtered(&self, min_count: u64) -> FlowMatrix {
        let mut keep_rows: BTreeSet<CountryCode> = BTreeSet::new();
        let mut keep_cols: BTreeSet<CountryCode> = BTreeSet::new();
        for (&(nat, res), &count) in &self.counts {
            if count >= min_count {
                keep_rows.insert(nat);
                keep_cols.insert(res);
            }
        }
        FlowMatrix {
            counts: self
                .counts
                .iter()
                .filter(|((nat, res), _)| keep_rows.contains(nat) && keep_cols.contains(res))
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }
}

/// Flow matrix over users classified as migrants.
pub fn migration_matrix(labels: &[UserLabel]) -> FlowMatrix {
    let mut counts: BTreeMap<(CountryCode, CountryCode), u64> = BTreeMap::new();
    for label in labels {
        if label.status == Status::Migrant {
            let (Some(nat), Some(res)) = (label.nationality, label.residence) else {
                continue;
            };
            *counts.entry((nat, res)).or_insert(0) += 1;
        }
    }
    FlowMatrix { counts }
}

//! Corpus records and in-memory stores.
//!
//! A corpus is three newline-delimited JSON files: user profiles, tweets,
//! and follow edges (edges may also come as CSV). Stores are immutable
//! after ingest and safe to share across threads.

mod features;
mod ingest;

pub use features::{
    account_age_days, friend_features, hashtag_usage, recent_tweet_features, FriendFeatures,
    RecentWindow, DEFAULT_RECENT_WINDOW, DEFAULT_REFERENCE_DATE,
};
pub use ingest::{ingest_edges, ingest_tweets, ingest_users, IngestStats};

use crate::country::CountryCode;
use crate::error::{Error, Result};
use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Public profile fields of a user account.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    pub created_at: NaiveDate,
    pub followers_count: u64,
    pub friends_count: u64,
    pub statuses_count: u64,
    pub verified: bool,
}

impl UserProfile {
    fn validate(&self) -> Result<()> {
        if self.user_id.is_empty() {
            return Err(Error::validation("user_id must be non-empty"));
        }
        Ok(())
    }
}

/// One tweet, reduced to the fields the analysis needs.
///
/// Hashtags are stored lowercased with the `#` prefix stripped; country
/// and language are normalized to uppercase/lowercase respectively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub tweet_id: String,
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<CountryCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default)]
    pub hashtags: Vec<String>,
}

impl Tweet {
    /// Enforce the record invariants in place.
    ///
    /// Hashtags lose their leading `#` and are Unicode-lowercased; empty
    /// tags are dropped. A tag with interior whitespace, or an empty id,
    /// makes the whole record invalid.
    pub fn normalize(&mut self) -> Result<()> {
        if self.tweet_id.is_empty() || self.user_id.is_empty() {
            return Err(Error::validation("tweet_id and user_id must be non-empty"));
        }
        let mut tags = Vec::with_capacity(self.hashtags.len());
        for raw in self.hashtags.drain(..) {
            let tag = raw.trim_start_matches('#').to_lowercase();
            if tag.is_empty() {
                continue;
            }
            if tag.chars().any(char::is_whitespace) {
                return Err(Error::validation(format!(
                    "hashtag `{raw}` contains whitespace"
                )));
            }
            tags.push(tag);
        }
        self.hashtags = tags;
        if let Some(lang) = &self.language {
            let lang = lang.trim().to_lowercase();
            self.language = if lang.is_empty() { None } else { Some(lang) };
        }
        Ok(())
    }
}

/// Directed follow relation: `src` follows `dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FollowEdge {
    pub src: String,
    pub dst: String,
}

/// Profiles keyed by user id.
#[derive(Debug, Clone, Default)]
pub struct UserStore {
    users: BTreeMap<String, UserProfile>,
}

impl UserStore {
    pub fn from_profiles(profiles: impl IntoIterator<Item = UserProfile>) -> (Self, usize) {
        let mut users = BTreeMap::new();
        let mut duplicates = 0;
        for profile in profiles {
            if users.insert(profile.user_id.clone(), profile).is_some() {
                duplicates += 1;
            }
        }
        (UserStore { users }, duplicates)
    }

    pub fn get(&self, user_id: &str) -> Option<&UserProfile> {
        self.users.get(user_id)
    }

    pub fn contains(&self, user_id: &str) -> bool {
        self.users.contains_key(user_id)
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// Profiles in user-id order.
    pub fn iter(&self) -> impl Iterator<Item = &UserProfile> {
        self.users.values()
    }

    pub fn user_ids(&self) -> impl Iterator<Item = &str> {
        self.users.keys().map(String::as_str)
    }
}

/// Tweets grouped per user, most recent first.
///
/// Within a user the order is (timestamp descending, tweet id ascending),
/// which pins the "most recent k" window across runs.
#[derive(Debug, Clone, Default)]
pub struct TweetStore {
    by_user: BTreeMap<String, Vec<Tweet>>,
}

impl TweetStore {
    pub fn from_tweets(tweets: impl IntoIterator<Item = Tweet>) -> (Self, usize) {
        // Last record wins on duplicate tweet ids.
        let mut by_id: BTreeMap<String, Tweet> = BTreeMap::new();
        let mut duplicates = 0;
        for tweet in tweets {
            if by_id.insert(tweet.tweet_id.clone(), tweet).is_some() {
                duplicates += 1;
            }
        }
        let mut by_user: BTreeMap<String, Vec<Tweet>> = BTreeMap::new();
        for tweet in by_id.into_values() {
            by_user.entry(tweet.user_id.clone()).or_default().push(tweet);
        }
        for tweets in by_user.values_mut() {
            tweets.sort_by(|a, b| {
                b.timestamp
                    .cmp(&a.timestamp)
                    .then_with(|| a.tweet_id.cmp(&b.tweet_id))
            });
        }
        (TweetStore { by_user }, duplicates)
    }

    /// Ensure `user_id` exists in the store, with no tweets if unseen.
    ///
    /// Ingest only learns about users that tweeted; pipelines register the
    /// profile universe so zero-tweet users answer `(0, 0)` instead of
    /// "unknown user".
    pub fn register_user(&mut self, user_id: &str) {
        self.by_user.entry(user_id.to_string()).or_default();
    }

    pub fn register_users(&mut self, users: &UserStore) {
        for id in users.user_ids() {
            self.register_user(id);
        }
    }

    pub fn contains(&self, user_id: &str) -> bool {
        self.by_user.contains_key(user_id)
    }

    /// Tweets of one user, most recent first.
    pub fn tweets_of(&self, user_id: &str) -> Result<&[Tweet]> {
        self.by_user
            .get(user_id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownUser(user_id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.by_user.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_users(&self) -> usize {
        self.by_user.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Tweet])> {
        self.by_user.iter().map(|(id, ts)| (id.as_str(), ts.as_slice()))
    }
}

/// Deduplicated directed edges with no self-loops, plus an out-neighbor
/// index for friend lookups.
#[derive(Debug, Clone, Default)]
pub struct EdgeList {
    edges: Vec<FollowEdge>,
    out: BTreeMap<String, Vec<String>>,
}

impl EdgeList {
    /// Build from raw edges, dropping self-loops and duplicates.
    /// Returns (list, self_loops_dropped, duplicates_dropped).
    pub fn from_edges(raw: impl IntoIterator<Item = FollowEdge>) -> (Self, usize, usize) {
        let mut self_loops = 0;
        let mut seen: std::collections::BTreeSet<(String, String)> = Default::default();
        let mut duplicates = 0;
        for edge in raw {
            if edge.src == edge.dst {
                self_loops += 1;
                continue;
            }
            if !seen.insert((edge.src, edge.dst)) {
                duplicates += 1;
            }
        }
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let edges: Vec<FollowEdge> = seen
            .into_iter()
            .map(|(src, dst)| {
                out.entry(src.clone()).or_default().push(dst.clone());
                FollowEdge { src, dst }
            })
            .collect();
        (EdgeList { edges, out }, self_loops, duplicates)
    }

    pub fn edges(&self) -> &[FollowEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Accounts the user follows, in id order. Empty for unknown users.
    pub fn out_neighbors(&self, user_id: &str) -> &[String] {
        self.out.get(user_id).map(Vec::as_slice).unwrap_or(&[])
    }
}

//! Per-user features extracted from tweets and the follow network.

use super::{EdgeList, TweetStore, UserProfile};
use crate::country::CountryCode;
use crate::error::{Error, Result};
use chrono::{DateTime, NaiveDate, Utc};
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// Size of the "most recent tweets" window used throughout.
pub const DEFAULT_RECENT_WINDOW: usize = 200;

/// Reference date for account age.
pub const DEFAULT_REFERENCE_DATE: NaiveDate = match NaiveDate::from_ymd_opt(2018, 12, 31) {
    Some(d) => d,
    None => unreachable!(),
};

/// Recency window: the `k` most recent tweets, optionally restricted to a
/// timestamp range before the window is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecentWindow {
    pub k: usize,
    pub since: Option<DateTime<Utc>>,
    pub until: Option<DateTime<Utc>>,
}

impl Default for RecentWindow {
    fn default() -> Self {
        RecentWindow {
            k: DEFAULT_RECENT_WINDOW,
            since: None,
            until: None,
        }
    }
}

impl RecentWindow {
    pub fn new(k: usize) -> Self {
        RecentWindow { k, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::validation("recency window k must be >= 1"));
        }
        Ok(())
    }

    /// Most recent tweets of `user_id` inside the window. The store keeps
    /// tweets sorted (timestamp desc, tweet id asc), so this is a filtered
    /// prefix.
    fn select<'a>(
        &self,
        tweets: &'a TweetStore,
        user_id: &str,
    ) -> Result<impl Iterator<Item = &'a super::Tweet>> {
        self.validate()?;
        let all = tweets.tweets_of(user_id)?;
        let since = self.since;
        let until = self.until;
        Ok(all
            .iter()
            .filter(move |t| since.is_none_or(|s| t.timestamp >= s))
            .filter(move |t| until.is_none_or(|u| t.timestamp <= u))
            .take(self.k))
    }
}

/// Distinct country codes and language tags among the user's most recent
/// tweets. Missing fields are skipped, never imputed.
pub fn recent_tweet_features(
    tweets: &TweetStore,
    user_id: &str,
    window: &RecentWindow,
) -> Result<(usize, usize)> {
    let mut countries: BTreeSet<CountryCode> = BTreeSet::new();
    let mut languages: BTreeSet<&str> = BTreeSet::new();
    for tweet in window.select(tweets, user_id)? {
        if let Some(c) = tweet.country {
            countries.insert(c);
        }
        if let Some(lang) = &tweet.language {
            languages.insert(lang);
        }
    }
    Ok((countries.len(), languages.len()))
}

/// Pooled distinct countries/languages over the recent tweets of every
/// account the user follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FriendFeatures {
    pub n_countries: usize,
    pub n_languages: usize,
    /// Number of followed accounts; 0 means the counts are vacuous.
    pub n_friends: usize,
}

pub fn friend_features(
    tweets: &TweetStore,
    edges: &EdgeList,
    user_id: &str,
    window: &RecentWindow,
) -> Result<FriendFeatures> {
    window.validate()?;
    let friends = edges.out_neighbors(user_id);
    let mut countries: BTreeSet<CountryCode> = BTreeSet::new();
    let mut languages: BTreeSet<String> = BTreeSet::new();
    for friend in friends {
        // Friends without stored tweets contribute nothing.
        if !tweets.contains(friend) {
            continue;
        }
        for tweet in window.select(tweets, friend)? {
            if let Some(c) = tweet.country {
                countries.insert(c);
            }
            if let Some(lang) = &tweet.language {
                languages.insert(lang.clone());
            }
        }
    }
    Ok(FriendFeatures {
        n_countries: countries.len(),
        n_languages: languages.len(),
        n_friends: friends.len(),
    })
}

/// Whole days from account creation to `reference`.
pub fn account_age_days(profile: &UserProfile, reference: NaiveDate) -> Result<i64> {
    let days = (reference - profile.created_at).num_days();
    if days < 0 {
        return Err(Error::validation(format!(
            "account {} created {} after reference date {}",
            profile.user_id, profile.created_at, reference
        )));
    }
    Ok(days)
}

/// Every hashtag occurrence of the user, with multiplicity.
pub fn hashtag_usage(tweets: &TweetStore, user_id: &str) -> Result<BTreeMap<String, u64>> {
    let mut usage: BTreeMap<String, u64> = BTreeMap::new();
    for tweet in tweets.tweets_of(user_id)? {
        for tag in &tweet.hashtags {
            *usage.entry(tag.clone()).or_insert(0) += 1;
        }
    }
    Ok(usage)
}

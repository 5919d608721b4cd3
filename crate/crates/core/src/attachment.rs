//! Hashtag country labels and per-user attachment indices.
//!
//! Hashtags acquire a country from the residences of the natives that use
//! them; tags spread too evenly across countries (high normalized entropy)
//! or with too little support stay unlabeled. A user's home attachment is
//! the share of their country-labeled hashtag occurrences pointing at
//! their nationality; destination attachment is the same share for their
//! residence.

use crate::corpus::TweetStore;
use crate::country::CountryCode;
use crate::error::{Error, Result};
use crate::labeling::{Status, UserLabel};
use crate::scalar::Scalar;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Default normalized-entropy cutoff above which a hashtag stays unlabeled.
pub const DEFAULT_ENTROPY_THRESHOLD: f64 = 0.5;
/// Default minimum distinct native users before a hashtag is labeled.
pub const DEFAULT_MIN_SUPPORT: u64 = 5;

/// Country label and diagnostics of one hashtag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HashtagCountryEntry<F> {
    pub country: Option<CountryCode>,
    /// Normalized Shannon entropy of the native-user distribution over
    /// countries: `H / ln(m)` for `m >= 2` observed countries, 0 for one.
    pub entropy: F,
    /// Distinct native users of the hashtag.
    pub support: u64,
}

/// Hashtag -> country assignment table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HashtagCountryTable<F> {
    entries: BTreeMap<String, HashtagCountryEntry<F>>,
}

impl<F: Scalar> HashtagCountryTable<F> {
    pub fn get(&self, hashtag: &str) -> Option<&HashtagCountryEntry<F>> {
        self.entries.get(hashtag)
    }

    /// Country of a hashtag, if labeled.
    pub fn country_of(&self, hashtag: &str) -> Option<CountryCode> {
        self.entries.get(hashtag).and_then(|e| e.country)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &HashtagCountryEntry<F>)> {
        self.entries.iter().map(|(tag, e)| (tag.as_str(), e))
    }
}

/// Normalized Shannon entropy of a count distribution: `H / ln(m)` over the
/// `m` non-zero categories; 0 when fewer than two.
pub fn normalized_entropy<F: Scalar>(counts: &[u64]) -> F {
    let non_zero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    if non_zero.len() < 2 {
        return F::zero();
    }
    let total = F::from_u64(non_zero.iter().sum::<u64>()).expect("count fits scalar");
    let mut h = F::zero();
    for c in non_zero.iter() {
        let p = F::from_u64(*c).expect("count fits scalar") / total;
        h -= p * p.ln();
    }
    h / F::from_count(non_zero.len()).ln()
}

/// Distinct native users per (hashtag, residence country).
///
/// Each native user counts once per hashtag under their residence, no
/// matter how many times they used it.
pub fn native_hashtag_usage(
    labels: &[UserLabel],
    tweets: &TweetStore,
) -> BTreeMap<String, BTreeMap<CountryCode, u64>> {
    let mut usage: BTreeMap<String, BTreeMap<CountryCode, u64>> = BTreeMap::new();
    for label in labels {
        if label.status != Status::Native {
            continue;
        }
        let Some(residence) = label.residence else {
            continue;
        };
        let Ok(user_tweets) = tweets.tweets_of(&label.user_id) else {
            continue;
        };
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for tweet in user_tweets {
            for tag in &tweet.hashtags {
                if seen.insert(tag) {
                    *usage
                        .entry(tag.clone())
                        .or_default()
                        .entry(residence)
                        .or_insert(0) += 1;
                }
            }
        }
    }
    usage
}

/// Label each hashtag with the most frequent residence country of the
/// natives using it. Hashtags keep `country: None` when their distribution
/// is too even (entropy above `threshold`) or their support is below
/// `min_support`. Argmax ties fall to the smaller country code.
pub fn build_hashtag_table<F: Scalar>(
    native_usages: &BTreeMap<String, BTreeMap<CountryCode, u64>>,
    threshold: F,
    min_support: u64,
) -> HashtagCountryTable<F> {
    let entries = native_usages
        .iter()
        .map(|(tag, per_country)| {
            let counts: Vec<u64> = per_country.values().copied().collect();
            let support: u64 = counts.iter().sum();
            let entropy = normalized_entropy::<F>(&counts);
            let country = if support >= min_support && entropy <= threshold {
                per_country
                    .iter()
                    .max_by(|(ca, na), (cb, nb)| na.cmp(nb).then(cb.cmp(ca)))
                    .map(|(country, _)| *country)
            } else {
                None
            };
            (
                tag.clone(),
                HashtagCountryEntry {
                    country,
                    entropy,
                    support,
                },
            )
        })
        .collect();
    HashtagCountryTable { entries }
}

/// Home/destination attachment of one user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttachmentScore<F> {
    pub user_id: String,
    pub status: Status,
    /// Share of labeled occurrences pointing at the nationality country.
    pub ha: Option<F>,
    /// Share of labeled occurrences pointing at the residence country.
    pub da: Option<F>,
    /// Hashtag occurrences whose hashtag carries a country label.
    pub labeled_occurrences: u64,
}

/// Attachment indices for one labeled user from their hashtag multiset.
///
/// The denominator is the number of occurrences whose hashtag is
/// country-labeled; both indices are undefined when it is zero. Users with
/// unknown status are an error for the caller to count.
pub fn attachment_score<F: Scalar>(
    label: &UserLabel,
    usage: &BTreeMap<String, u64>,
    table: &HashtagCountryTable<F>,
) -> Result<AttachmentScore<F>> {
    if label.status == Status::Unknown {
        return Err(Error::validation(format!(
            "user {} has unknown status",
            label.user_id
        )));
    }
    let nationality = label.nationality.expect("classified user has nationality");
    let residence = label.residence.expect("classified user has residence");

    let mut labeled = 0u64;
    let mut home = 0u64;
    let mut destination = 0u64;
    for (tag, &count) in usage {
        let Some(country) = table.country_of(tag) else {
            continue;
        };
        labeled += count;
        if country == nationality {
            home += count;
        }
        if country == residence {
            destination += count;
        }
    }
    let ratio = |num: u64| {
        (labeled > 0).then(|| {
            F::from_u64(num).expect("count fits scalar") / F::from_u64(labeled).expect("count")
        })
    };
    Ok(AttachmentScore {
        user_id: label.user_id.clone(),
        status: label.status,
        ha: ratio(home),
        da: ratio(destination),
        labeled_occurrences: labeled,
    })
}

/// Attachment scores for every classified user; unknown-status users are
/// skipped and counted.
pub fn attachment_scores<F: Scalar>(
    labels: &[UserLabel],
    tweets: &TweetStore,
    table: &HashtagCountryTable<F>,
) -> (Vec<AttachmentScore<F>>, usize) {
    let mut scores = Vec::new();
    let mut skipped = 0usize;
    for label in labels {
        if label.status == Status::Unknown {
            skipped += 1;
            continue;
        }
        let usage = crate::corpus::hashtag_usage(tweets, &label.user_id).unwrap_or_default();
        let score = attachment_score(label, &usage, table).expect("status checked above");
        scores.push(score);
    }
    (scores, skipped)
}

/// Top-k hashtags of a group by occurrence count, scaled so the most used
/// hashtag maps to 1. Ties order lexicographically.
pub fn top_hashtags<F: Scalar>(
    occurrence_counts: &BTreeMap<String, u64>,
    k: usize,
) -> Vec<(String, F)> {
    if k == 0 {
        return Vec::new();
    }
    let mut ranked: Vec<(&String, &u64)> = occurrence_counts.iter().collect();
    ranked.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then(ta.cmp(tb)));
    let max = match ranked.first() {
        Some((_, &count)) if count > 0 => F::from_u64(count).expect("count fits scalar"),
        _ => return Vec::new(),
    };
    ranked
        .into_iter()
        .take(k)
        .map(|(tag, &count)| {
            (
                tag.clone(),
                F::from_u64(count).expect("count fits scalar") / max,
            )
        })
        .collect()
}

/// Binned HA/DA distributions of one status group, plus the group means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttachmentHistograms<F> {
    pub status: Status,
    pub ha: crate::stats::Histogram<F>,
    pub da: crate::stats::Histogram<F>,
    pub ha_mean: Option<F>,
    pub da_mean: Option<F>,
}

/// Histograms over `[0, 1]` of the defined scores of one group.
pub fn attachment_histograms<F: Scalar>(
    scores: &[AttachmentScore<F>],
    status: Status,
    bins: usize,
) -> Result<AttachmentHistograms<F>> {
    let ha: Vec<F> = scores
        .iter()
        .filter(|s| s.status == status)
        .filter_map(|s| s.ha)
        .collect();
    let da: Vec<F> = scores
        .iter()
        .filter(|s| s.status == status)
        .filter_map(|s| s.da)
        .collect();
    let mean = |values: &[F]| {
        (!values.is_empty())
            .then(|| values.iter().copied().sum::<F>() / F::from_count(values.len()))
    };
    Ok(AttachmentHistograms {
        status,
        ha: crate::stats::histogram_in_range(&ha, bins, F::zero(), F::one(), false)?,
        da: crate::stats::histogram_in_range(&da, bins, F::zero(), F::one(), false)?,
        ha_mean: mean(&ha),
        da_mean: mean(&da),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::Evidence;

    fn code(s: &str) -> CountryCode {
        CountryCode::new(s).unwrap()
    }

    fn usages(
        entries: &[(&str, &[(&str, u64)])],
    ) -> BTreeMap<String, BTreeMap<CountryCode, u64>> {
        entries
            .iter()
            .map(|(tag, counts)| {
                (
                    tag.to_string(),
                    counts.iter().map(|(c, n)| (code(c), *n)).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn entropy_oracle_two_countries() {
        // -sum(p ln p) / ln 2 for {0.9, 0.1}.
        let h: f64 = normalized_entropy(&[9, 1]);
        assert!((h - 0.468_995_593_7).abs() < 1e-9, "h = {h}");
    }

    #[test]
    fn entropy_edge_cases() {
        assert_eq!(normalized_entropy::<f64>(&[7]), 0.0);
        let max: f64 = normalized_entropy(&[5, 5]);
        assert!((max - 1.0).abs() < 1e-12);
        assert_eq!(normalized_entropy::<f64>(&[]), 0.0);
    }

    #[test]
    fn table_labels_by_majority() {
        let table: HashtagCountryTable<f64> =
            build_hashtag_table(&usages(&[("love", &[("US", 9), ("GB", 1)])]), 0.5, 5);
        let entry = table.get("love").unwrap();
        assert_eq!(entry.country, Some(code("US")));
        assert_eq!(entry.support, 10);
    }

    #[test]
    fn table_rejects_even_distribution() {
        let table: HashtagCountryTable<f64> =
            build_hashtag_table(&usages(&[("meme", &[("US", 5), ("GB", 5)])]), 0.5, 5);
        let entry = table.get("meme").unwrap();
        assert_eq!(entry.country, None);
        assert!((entry.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_rejects_low_support() {
        let table: HashtagCountryTable<f64> =
            build_hashtag_table(&usages(&[("rare", &[("US", 3)])]), 0.5, 5);
        assert_eq!(table.get("rare").unwrap().country, None);
    }

    #[test]
    fn table_empty_input() {
        let table: HashtagCountryTable<f64> = build_hashtag_table(&BTreeMap::new(), 0.5, 5);
        assert!(table.is_empty());
    }

    #[test]
    fn single_country_tags_always_label() {
        // Entropy 0 for every single-country tag with enough support.
        let table: HashtagCountryTable<f64> =
            build_hashtag_table(&usages(&[("solo", &[("IT", 6)])]), 0.5, 5);
        let entry = table.get("solo").unwrap();
        assert_eq!(entry.country, Some(code("IT")));
        assert_eq!(entry.entropy, 0.0);
    }

    fn label(user: &str, nat: &str, res: &str) -> UserLabel {
        let status = if nat == res {
            Status::Native
        } else {
            Status::Migrant
        };
        UserLabel {
            user_id: user.to_string(),
            residence: Some(code(res)),
            nationality: Some(code(nat)),
            status,
            evidence: Evidence::default(),
        }
    }

    fn one_tag_table(entries: &[(&str, &str)]) -> HashtagCountryTable<f64> {
        HashtagCountryTable {
            entries: entries
                .iter()
                .map(|(tag, country)| {
                    (
                        tag.to_string(),
                        HashtagCountryEntry {
                            country: Some(code(country)),
                            entropy: 0.0,
                            support: 10,
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn proportions_split_between_home_and_destination() {
        let table = one_tag_table(&[("roma", "IT"), ("berlin", "DE")]);
        let usage: BTreeMap<String, u64> = [
            ("roma".to_string(), 2),
            ("berlin".to_string(), 3),
            ("unlabeled".to_string(), 5),
        ]
        .into_iter()
        .collect();
        let score = attachment_score(&label("u", "IT", "DE"), &usage, &table).unwrap();
        assert_eq!(score.labeled_occurrences, 5);
        assert!((score.ha.unwrap() - 0.4).abs() < 1e-12);
        assert!((score.da.unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn native_indices_coincide() {
        let table = one_tag_table(&[("roma", "IT"), ("paris", "FR")]);
        let usage: BTreeMap<String, u64> = [
            ("roma".to_string(), 4),
            ("paris".to_string(), 4),
        ]
        .into_iter()
        .collect();
        let score = attachment_score(&label("u", "IT", "IT"), &usage, &table).unwrap();
        assert_eq!(score.ha, score.da);
        assert!((score.ha.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unlabeled_only_usage_is_undefined() {
        let table = one_tag_table(&[]);
        let usage: BTreeMap<String, u64> = [("anything".to_string(), 7)].into_iter().collect();
        let score = attachment_score(&label("u", "IT", "DE"), &usage, &table).unwrap();
        assert_eq!(score.ha, None);
        assert_eq!(score.da, None);
        assert_eq!(score.labeled_occurrences, 0);
    }

    #[test]
    fn unknown_status_rejected() {
        let table = one_tag_table(&[]);
        let unknown = UserLabel {
            user_id: "u".into(),
            residence: None,
            nationality: None,
            status: Status::Unknown,
            evidence: Evidence::default(),
        };
        assert!(attachment_score::<f64>(&unknown, &BTreeMap::new(), &table).is_err());
    }

    #[test]
    fn top_hashtags_scaling_and_ties() {
        let counts: BTreeMap<String, u64> = [
            ("love".to_string(), 100),
            ("art".to_string(), 50),
            ("zebra".to_string(), 50),
        ]
        .into_iter()
        .collect();
        let top: Vec<(String, f64)> = top_hashtags(&counts, 2);
        assert_eq!(top[0], ("love".to_string(), 1.0));
        assert_eq!(top[1], ("art".to_string(), 0.5));

        let all: Vec<(String, f64)> = top_hashtags(&counts, 10);
        assert_eq!(all.len(), 3);
        assert_eq!(all[1].0, "art"); // ties lexicographic
        assert_eq!(all[2].0, "zebra");
    }

    #[test]
    fn relabeling_never_shrinks_denominator() {
        let usage: BTreeMap<String, u64> =
            [("roma".to_string(), 2), ("meme".to_string(), 3)].into_iter().collect();
        let user = label("u", "IT", "DE");
        let before = one_tag_table(&[("roma", "IT")]);
        let after = one_tag_table(&[("roma", "IT"), ("meme", "FR")]);
        let a = attachment_score::<f64>(&user, &usage, &before).unwrap();
        let b = attachment_score::<f64>(&user, &usage, &after).unwrap();
        assert!(b.labeled_occurrences >= a.labeled_occurrences);
    }

    #[test]
    fn histograms_concentrated_group() {
        // Every native at the same score: one occupied bin, mean equal to
        // the score.
        let scores: Vec<AttachmentScore<f64>> = (0..20)
            .map(|i| AttachmentScore {
                user_id: format!("u{i}"),
                status: Status::Native,
                ha: Some(0.447),
                da: Some(0.447),
                labeled_occurrences: 5,
            })
            .collect();
        let h: AttachmentHistograms<f64> =
            attachment_histograms(&scores, Status::Native, 10).unwrap();
        assert_eq!(h.ha.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.ha.counts.iter().sum::<u64>(), 20);
        assert!((h.ha_mean.unwrap() - 0.447).abs() < 1e-12);
        assert_eq!(h.ha_mean, h.da_mean);
    }

    #[test]
    fn histograms_bin_scores() {
        let scores = vec![
            AttachmentScore {
                user_id: "a".into(),
                status: Status::Native,
                ha: Some(0.0),
                da: Some(0.0),
                labeled_occurrences: 1,
            },
            AttachmentScore {
                user_id: "b".into(),
                status: Status::Native,
                ha: Some(1.0),
                da: Some(1.0),
                labeled_occurrences: 1,
            },
        ];
        let h: AttachmentHistograms<f64> =
            attachment_histograms(&scores, Status::Native, 2).unwrap();
        assert_eq!(h.ha.counts, vec![1, 1]);
        assert_eq!(h.ha_mean, Some(0.5));

        let empty: AttachmentHistograms<f64> =
            attachment_histograms(&scores, Status::Migrant, 2).unwrap();
        assert_eq!(empty.ha.counts.iter().sum::<u64>(), 0);
        assert_eq!(empty.ha_mean, None);
    }
}

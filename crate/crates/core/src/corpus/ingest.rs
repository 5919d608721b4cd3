//! File readers for the corpus schemas.
//!
//! Every reader accepts a gzip-compressed variant when the path ends in
//! `.gz`. Malformed lines are skipped and counted, never fatal; an input
//! that yields zero valid records is an error.

use super::{EdgeList, FollowEdge, Tweet, TweetStore, UserProfile, UserStore};
use crate::error::{Error, Result};
use flate2::read::GzDecoder;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

/// Per-file ingest diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestStats {
    /// Non-empty input lines seen.
    pub lines: usize,
    /// Records accepted into the store.
    pub records: usize,
    /// Malformed lines skipped.
    pub skipped: usize,
    /// Duplicate keys where the last record won.
    pub duplicates: usize,
    /// Self-loop edges dropped (edges only).
    pub self_loops_dropped: usize,
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    Ok(Box::new(BufReader::new(reader)))
}

fn read_jsonl<T, F>(path: &Path, mut accept: F) -> Result<IngestStats>
where
    T: serde::de::DeserializeOwned,
    F: FnMut(T) -> bool,
{
    let reader = open(path)?;
    let mut stats = IngestStats::default();
    for line in reader.lines() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        stats.lines += 1;
        match serde_json::from_str::<T>(&line) {
            Ok(record) => {
                if accept(record) {
                    stats.records += 1;
                } else {
                    stats.skipped += 1;
                }
            }
            Err(_) => stats.skipped += 1,
        }
    }
    if stats.records == 0 {
        return Err(Error::EmptyStore {
            path: path.to_path_buf(),
        });
    }
    Ok(stats)
}

/// Read `users.jsonl` into a [`UserStore`].
pub fn ingest_users(path: impl AsRef<Path>) -> Result<(UserStore, IngestStats)> {
    let path = path.as_ref();
    let mut profiles = Vec::new();
    let mut stats = read_jsonl::<UserProfile, _>(path, |profile| {
        if profile.validate().is_ok() {
            profiles.push(profile);
            true
        } else {
            false
        }
    })?;
    let (store, duplicates) = UserStore::from_profiles(profiles);
    stats.duplicates = duplicates;
    Ok((store, stats))
}

/// Read `tweets.jsonl` into a [`TweetStore`].
pub fn ingest_tweets(path: impl AsRef<Path>) -> Result<(TweetStore, IngestStats)> {
    let path = path.as_ref();
    let mut tweets = Vec::new();
    let mut stats = read_jsonl::<Tweet, _>(path, |mut tweet| {
        if tweet.normalize().is_ok() {
            tweets.push(tweet);
            true
        } else {
            false
        }
    })?;
    let (store, duplicates) = TweetStore::from_tweets(tweets);
    stats.duplicates = duplicates;
    Ok((store, stats))
}

/// Read follow edges from `edges.jsonl` or `edges.csv` (header `src,dst`),
/// picking the format by file extension.
pub fn ingest_edges(path: impl AsRef<Path>) -> Result<(EdgeList, IngestStats)> {
    let path = path.as_ref();
    let name = path.to_string_lossy();
    if name.ends_with(".csv") || name.ends_with(".csv.gz") {
        ingest_edges_csv(path)
    } else {
        ingest_edges_jsonl(path)
    }
}

fn ingest_edges_jsonl(path: &Path) -> Result<(EdgeList, IngestStats)> {
    let mut raw = Vec::new();
    let mut stats = read_jsonl::<FollowEdge, _>(path, |edge| {
        if edge.src.is_empty() || edge.dst.is_empty() {
            false
        } else {
            raw.push(edge);
            true
        }
    })?;
    let (list, self_loops, duplicates) = EdgeList::from_edges(raw);
    stats.self_loops_dropped = self_loops;
    stats.duplicates = duplicates;
    if list.is_empty() {
        return Err(Error::EmptyStore {
            path: path.to_path_buf(),
        });
    }
    Ok((list, stats))
}

fn ingest_edges_csv(path: &Path) -> Result<(EdgeList, IngestStats)> {
    let reader = open(path)?;
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut stats = IngestStats::default();
    let mut raw = Vec::new();
    for record in csv_reader.deserialize::<FollowEdge>() {
        stats.lines += 1;
        match record {
            Ok(edge) if !edge.src.is_empty() && !edge.dst.is_empty() => {
                raw.push(edge);
                stats.records += 1;
            }
            _ => stats.skipped += 1,
        }
    }
    let (list, self_loops, duplicates) = EdgeList::from_edges(raw);
    stats.self_loops_dropped = self_loops;
    stats.duplicates = duplicates;
    if list.is_empty() {
        return Err(Error::EmptyStore {
            path: path.to_path_buf(),
        });
    }
    Ok((list, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, contents: &str) -> tempfile::TempPath {
        let mut file = tempfile::Builder::new()
            .suffix(name)
            .tempfile()
            .unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file.into_temp_path()
    }

    #[test]
    fn users_skip_and_count() {
        let path = write_temp(
            "users.jsonl",
            concat!(
                r#"{"user_id":"u1","created_at":"2015-03-01","followers_count":10,"friends_count":5,"statuses_count":100,"verified":false}"#,
                "\n",
                "not json\n",
                r#"{"user_id":"u2","created_at":"2016-07-12","followers_count":1,"friends_count":2,"statuses_count":3,"verified":true}"#,
                "\n",
            ),
        );
        let (store, stats) = ingest_users(&path).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(stats.skipped, 1);
        assert_eq!(stats.records, 2);
    }

    #[test]
    fn duplicate_users_last_wins() {
        let path = write_temp(
            "users.jsonl",
            concat!(
                r#"{"user_id":"u1","created_at":"2015-03-01","followers_count":10,"friends_count":5,"statuses_count":100,"verified":false}"#,
                "\n",
                r#"{"user_id":"u1","created_at":"2016-03-01","followers_count":11,"friends_count":5,"statuses_count":100,"verified":false}"#,
                "\n",
            ),
        );
        let (store, stats) = ingest_users(&path).unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(store.get("u1").unwrap().followers_count, 11);
    }

    #[test]
    fn empty_file_is_error() {
        let path = write_temp("tweets.jsonl", "");
        assert!(matches!(
            ingest_tweets(&path),
            Err(Error::EmptyStore { .. })
        ));
    }

    #[test]
    fn unreadable_path_is_io_error() {
        assert!(matches!(
            ingest_users("/nonexistent/users.jsonl"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn tweets_normalized_on_ingest() {
        let path = write_temp(
            "tweets.jsonl",
            concat!(
                r##"{"tweet_id":"t1","user_id":"u1","timestamp":"2018-05-01T10:00:00Z","country":"it","language":"IT","hashtags":["#Love","ART"]}"##,
                "\n",
                r#"{"tweet_id":"t2","user_id":"u1","timestamp":"2018-05-02T10:00:00Z","country":"ITA"}"#,
                "\n",
            ),
        );
        let (store, stats) = ingest_tweets(&path).unwrap();
        assert_eq!(stats.records, 1);
        assert_eq!(stats.skipped, 1); // bad country code
        let tweets = store.tweets_of("u1").unwrap();
        assert_eq!(tweets[0].hashtags, vec!["love", "art"]);
        assert_eq!(tweets[0].country.unwrap().as_str(), "IT");
        assert_eq!(tweets[0].language.as_deref(), Some("it"));
    }

    #[test]
    fn edges_from_csv() {
        let path = write_temp("edges.csv", "src,dst\nA,B\nB,A\nA,A\n");
        let (list, stats) = ingest_edges(&path).unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(stats.self_loops_dropped, 1);
    }

    #[test]
    fn gzip_round_trip() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let mut file = tempfile::Builder::new().suffix(".jsonl.gz").tempfile().unwrap();
        {
            let mut enc = GzEncoder::new(&mut file, Compression::default());
            enc.write_all(
                br#"{"user_id":"u1","created_at":"2015-03-01","followers_count":0,"friends_count":0,"statuses_count":0,"verified":false}"#,
            )
            .unwrap();
            enc.finish().unwrap();
        }
        let path = file.into_temp_path();
        let (store, _) = ingest_users(&path).unwrap();
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn ingest_is_idempotent() {
        let contents = concat!(
            r#"{"tweet_id":"t1","user_id":"u1","timestamp":"2018-05-01T10:00:00Z","hashtags":["a"]}"#,
            "\n",
            r#"{"tweet_id":"t2","user_id":"u2","timestamp":"2018-05-02T10:00:00Z"}"#,
            "\n",
        );
        let path = write_temp("tweets.jsonl", contents);
        let (store_a, stats_a) = ingest_tweets(&path).unwrap();
        let (store_b, stats_b) = ingest_tweets(&path).unwrap();
        assert_eq!(stats_a, stats_b);
        let a: Vec<_> = store_a.iter().map(|(u, ts)| (u.to_string(), ts.to_vec())).collect();
        let b: Vec<_> = store_b.iter().map(|(u, ts)| (u.to_string(), ts.to_vec())).collect();
        assert_eq!(a, b);
    }
}

//! Parsing, validation, deduplication, and window filtering of raw posts.
//!
//! Input is line-delimited JSON. A [`FieldMap`] names the source fields so
//! exports with differing schemas can be ingested without rewriting them.
//! All downstream stages assume the invariants established here: unique
//! ids, timestamps inside the analysis window, and records ordered by
//! `(created_at, id)`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Whether a post is an original or a repost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TweetType {
    Original,
    Retweet,
}

impl TweetType {
    pub fn as_str(self) -> &'static str {
        match self {
            TweetType::Original => "original",
            TweetType::Retweet => "retweet",
        }
    }
}

impl std::str::FromStr for TweetType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(TweetType::Original),
            "retweet" => Ok(TweetType::Retweet),
            other => Err(format!("unknown tweet type `{other}`")),
        }
    }
}

/// One ingested post. `user_location` is the raw profile string and may be
/// empty; `id` is never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub user_location: String,
    pub tweet_type: TweetType,
}

/// Names the source-file fields holding each canonical field. Optional
/// entries fall back to defaults when unset: `user_location` to empty,
/// `tweet_type` to the retweet flag, the retweet flag to an `RT @` text
/// prefix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldMap {
    pub id: String,
    pub created_at: String,
    pub text: String,
    #[serde(default)]
    pub user_location: Option<String>,
    #[serde(default)]
    pub tweet_type: Option<String>,
    #[serde(default)]
    pub retweet_flag: Option<String>,
    #[serde(default)]
    pub lang: Option<String>,
}

impl Default for FieldMap {
    /// The canonical schema written by [`write_records`].
    fn default() -> Self {
        FieldMap {
            id: "id".into(),
            created_at: "created_at".into(),
            text: "text".into(),
            user_location: Some("user_location".into()),
            tweet_type: Some("tweet_type".into()),
            retweet_flag: None,
            lang: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: missing or empty field `{field}`")]
    MissingField { line: usize, field: String },
    #[error("line {line}: unparseable timestamp `{value}`")]
    BadTimestamp { line: usize, value: String },
    #[error("window start {start} is not before end {end}")]
    BadWindow {
        start: DateTime<Utc>,
        end: DateTime<Utc>,
    },
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<IngestError>,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Counts reported by [`ingest_files`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub parsed: usize,
    pub language_filtered: usize,
}

fn parse_timestamp(value: &Value) -> Option<DateTime<Utc>> {
    match value {
        Value::String(s) => {
            if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
                return Some(dt.with_timezone(&Utc));
            }
            // Classic API format: "Wed Mar 04 14:00:00 +0000 2020".
            if let Ok(dt) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
                return Some(dt.with_timezone(&Utc));
            }
            if let Ok(secs) = s.parse::<i64>() {
                return Utc.timestamp_opt(secs, 0).single();
            }
            None
        }
        Value::Number(n) => {
            let secs = n.as_i64()?;
            Utc.timestamp_opt(secs, 0).single()
        }
        _ => None,
    }
}

fn string_or_int(value: &Value) -> Option<String> {
    match value {
        Value::String(s) if !s.is_empty() => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Parses one JSON line into a [`TweetRecord`] under the given schema.
///
/// The retweet decision honors an explicit `tweet_type` field first, then
/// an explicit retweet flag (booleans taken as-is, any other non-null
/// value as true), and only when both are absent falls back to the
/// `RT @` text prefix.
pub fn parse_record(
    line: &str,
    schema: &FieldMap,
    line_no: usize,
) -> Result<TweetRecord, IngestError> {
    let value: Value = serde_json::from_str(line).map_err(|e| IngestError::MalformedRecord {
        line: line_no,
        reason: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| IngestError::MalformedRecord {
            line: line_no,
            reason: "not a JSON object".into(),
        })?;

    let id =
        obj.get(&schema.id)
            .and_then(string_or_int)
            .ok_or_else(|| IngestError::MissingField {
                line: line_no,
                field: schema.id.clone(),
            })?;

    let ts_value = obj
        .get(&schema.created_at)
        .filter(|v| !v.is_null())
        .ok_or_else(|| IngestError::MissingField {
            line: line_no,
            field: schema.created_at.clone(),
        })?;
    let created_at = parse_timestamp(ts_value).ok_or_else(|| IngestError::BadTimestamp {
        line: line_no,
        value: ts_value.to_string(),
    })?;

    let text = obj
        .get(&schema.text)
        .and_then(Value::as_str)
        .ok_or_else(|| IngestError::MissingField {
            line: line_no,
            field: schema.text.clone(),
        })?
        .to_string();

    let user_location = schema
        .user_location
        .as_ref()
        .and_then(|f| obj.get(f))
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();

    let tweet_type = resolve_tweet_type(obj, schema, &text);

    Ok(TweetRecord {
        id,
        created_at,
        text,
        user_location,
        tweet_type,
    })
}

fn resolve_tweet_type(
    obj: &serde_json::Map<String, Value>,
    schema: &FieldMap,
    text: &str,
) -> TweetType {
    if let Some(field) = &schema.tweet_type {
        if let Some(s) = obj.get(field).and_then(Value::as_str) {
            if let Ok(t) = s.parse::<TweetType>() {
                return t;
            }
        }
    }
    if let Some(field) = &schema.retweet_flag {
        match obj.get(field) {
            None | Some(Value::Null) => {}
            Some(Value::Bool(b)) => {
                return if *b {
                    TweetType::Retweet
                } else {
                    TweetType::Original
                };
            }
            // Presence of a non-null payload (e.g. an embedded source post)
            // marks a repost.
            Some(_) => return TweetType::Retweet,
        }
    }
    if text.starts_with("RT @") {
        TweetType::Retweet
    } else {
        TweetType::Original
    }
}

/// Serializes a record as one canonical JSON line (fixed field order, UTC
/// seconds precision), the inverse of [`parse_record`] under the default
/// schema.
pub fn serialize_record(record: &TweetRecord) -> String {
    let mut map = serde_json::Map::new();
    map.insert("id".into(), Value::String(record.id.clone()));
    map.insert(
        "created_at".into(),
        Value::String(record.created_at.to_rfc3339_opts(SecondsFormat::Secs, true)),
    );
    map.insert("text".into(), Value::String(record.text.clone()));
    map.insert(
        "user_location".into(),
        Value::String(record.user_location.clone()),
    );
    map.insert(
        "tweet_type".into(),
        Value::String(record.tweet_type.as_str().into()),
    );
    Value::Object(map).to_string()
}

/// Reads and parses every non-blank line of each file, applying the
/// optional language filter, then sorts the union by `(created_at, id)`.
/// Lines starting with `# ` are treated as comments. Does not deduplicate.
pub fn ingest_files(
    paths: &[impl AsRef<Path>],
    schema: &FieldMap,
    languages: Option<&HashSet<String>>,
) -> Result<(Vec<TweetRecord>, IngestStats), IngestError> {
    let mut records = Vec::new();
    let mut stats = IngestStats::default();
    for path in paths {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::open(path).map_err(|e| IngestError::Io {
            path: display.clone(),
            source: e,
        })?;
        let reader = BufReader::new(file);
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| IngestError::Io {
                path: display.clone(),
                source: e,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with("# ") {
                continue;
            }
            if let (Some(filter), Some(field)) = (languages, schema.lang.as_ref()) {
                let lang = serde_json::from_str::<Value>(trimmed)
                    .ok()
                    .and_then(|v| v.get(field).and_then(Value::as_str).map(str::to_string));
                if let Some(lang) = lang {
                    if !filter.contains(&lang) {
                        stats.language_filtered += 1;
                        continue;
                    }
                }
            }
            let record = parse_record(trimmed, schema, idx + 1).map_err(|e| IngestError::File {
                path: display.clone(),
                source: Box::new(e),
            })?;
            records.push(record);
            stats.parsed += 1;
        }
    }
    records.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
    Ok((records, stats))
}

/// Drops records whose id was already seen, keeping the first occurrence
/// in input order. Returns the survivors and the number dropped.
pub fn dedupe(records: Vec<TweetRecord>) -> (Vec<TweetRecord>, usize) {
    let before = records.len();
    let mut seen = HashSet::with_capacity(before);
    let kept: Vec<TweetRecord> = records
        .into_iter()
        .filter(|r| seen.insert(r.id.clone()))
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Keeps records with `start <= created_at < end`, preserving order.
/// Returns the survivors and the number excluded.
pub fn filter_window(
    records: Vec<TweetRecord>,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<(Vec<TweetRecord>, usize), IngestError> {
    if start >= end {
        return Err(IngestError::BadWindow { start, end });
    }
    let before = records.len();
    let kept: Vec<TweetRecord> = records
        .into_iter()
        .filter(|r| r.created_at >= start && r.created_at < end)
        .collect();
    let excluded = before - kept.len();
    Ok((kept, excluded))
}

/// Writes records in canonical form, one JSON object per line, preceded
/// by a `# `-prefixed header comment.
pub fn write_records(
    path: &Path,
    records: &[TweetRecord],
    header: &str,
) -> Result<(), IngestError> {
    let display = path.display().to_string();
    let io_err = |e: std::io::Error| IngestError::Io {
        path: display.clone(),
        source: e,
    };
    let mut file = File::create(path).map_err(io_err)?;
    writeln!(file, "# {header}").map_err(io_err)?;
    for record in records {
        writeln!(file, "{}", serialize_record(record)).map_err(io_err)?;
    }
    Ok(())
}

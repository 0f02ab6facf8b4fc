//! Parsing of exported post dumps (CSV or JSONL) into validated records,
//! plus the record-level filters that run before any text cleaning.
//!
//! CSV input is RFC 4180 with a header row; the columns "Page Name",
//! "Created", "Type" and "Message" are matched case-insensitively with
//! internal whitespace collapsed, and a "langprediction" column is picked up
//! when present. JSONL input is one object per line with keys `page_name`,
//! `created`, `type`, `message` and optional `langprediction`. Dates are
//! DD-MM-YY (two-digit years 00–69 are 2000s, 70–99 are 1900s) or ISO 8601;
//! records are re-serialized with ISO dates.

use std::collections::BTreeSet;
use std::io::{self, BufRead, BufReader, Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::langtag::LangPrediction;

/// The content categories a post can carry. Labels outside the known set are
/// preserved as [`ContentType::Other`] rather than rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ContentType {
    YouTube,
    Status,
    Link,
    Photo,
    NativeVideo,
    Video,
    Vine,
    LiveVideoComplete,
    LiveVideo,
    Other(String),
}

const CONTENT_TYPE_LABELS: [(&str, ContentType); 9] = [
    ("YouTube", ContentType::YouTube),
    ("Status", ContentType::Status),
    ("Link", ContentType::Link),
    ("Photo", ContentType::Photo),
    ("Native Video", ContentType::NativeVideo),
    ("Video", ContentType::Video),
    ("Vine", ContentType::Vine),
    ("Live Video Complete", ContentType::LiveVideoComplete),
    ("Live Video", ContentType::LiveVideo),
];

impl ContentType {
    /// Parse a label. Never fails: unknown labels become `Other(label)`
    /// (trimmed), so formatting and re-parsing round-trips.
    pub fn from_label(label: &str) -> ContentType {
        let trimmed = label.trim();
        CONTENT_TYPE_LABELS
            .iter()
            .find(|(name, _)| *name == trimmed)
            .map(|(_, ct)| ct.clone())
            .unwrap_or_else(|| ContentType::Other(trimmed.to_string()))
    }

    pub fn label(&self) -> &str {
        match self {
            ContentType::YouTube => "YouTube",
            ContentType::Status => "Status",
            ContentType::Link => "Link",
            ContentType::Photo => "Photo",
            ContentType::NativeVideo => "Native Video",
            ContentType::Video => "Video",
            ContentType::Vine => "Vine",
            ContentType::LiveVideoComplete => "Live Video Complete",
            ContentType::LiveVideo => "Live Video",
            ContentType::Other(label) => label,
        }
    }
}

impl std::fmt::Display for ContentType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ContentType {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(ContentType::from_label(s))
    }
}

impl Serialize for ContentType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for ContentType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let label = String::deserialize(deserializer)?;
        Ok(ContentType::from_label(&label))
    }
}

mod date_format {
    use super::*;
    use serde::Deserializer;

    pub fn serialize<S: serde::Serializer>(date: &NaiveDate, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&date.format("%Y-%m-%d").to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
        let raw = String::deserialize(d)?;
        parse_date(&raw).map_err(serde::de::Error::custom)
    }
}

mod lang_format {
    use super::*;
    use serde::Deserializer;

    pub fn serialize<S: serde::Serializer>(
        value: &Option<LangPrediction>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match value {
            Some(pred) => s.serialize_str(&pred.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<LangPrediction>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        match raw {
            None => Ok(None),
            Some(s) if s.trim().is_empty() => Ok(None),
            Some(s) => LangPrediction::parse(&s)
                .map(Some)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// One social-media post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub page_name: String,
    #[serde(with = "date_format")]
    pub created: NaiveDate,
    #[serde(rename = "type")]
    pub content_type: ContentType,
    pub message: String,
    #[serde(
        rename = "langprediction",
        with = "lang_format",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub lang_prediction: Option<LangPrediction>,
}

/// Record counts for one ingest stage. `records_read` always equals the sum
/// of kept and dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records_read: u64,
    pub records_kept: u64,
    pub records_dropped_empty: u64,
    pub records_dropped_blacklist: u64,
    pub distinct_pages: u64,
}

impl IngestReport {
    fn with_counts(
        read: u64,
        dropped_empty: u64,
        dropped_blacklist: u64,
        kept: &[PostRecord],
    ) -> IngestReport {
        IngestReport {
            records_read: read,
            records_kept: kept.len() as u64,
            records_dropped_empty: dropped_empty,
            records_dropped_blacklist: dropped_blacklist,
            distinct_pages: kept
                .iter()
                .map(|r| r.page_name.as_str())
                .collect::<BTreeSet<_>>()
                .len() as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "jsonl" => Ok(InputFormat::Jsonl),
            other => Err(format!("unknown input format {other:?} (expected csv or jsonl)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: invalid UTF-8")]
    InvalidUtf8 { line: u64 },
    #[error("line {line}: invalid date {raw:?} (expected DD-MM-YY or YYYY-MM-DD)")]
    InvalidDate { line: u64, raw: String },
    #[error("missing required column {name:?}")]
    MissingColumn { name: String },
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

/// Parse a date in DD-MM-YY or ISO 8601 (YYYY-MM-DD) form. Two-digit years
/// 00–69 pivot to 2000–2069 and 70–99 to 1970–1999.
pub fn parse_date(raw: &str) -> Result<NaiveDate, String> {
    let trimmed = raw.trim();
    let parts: Vec<&str> = trimmed.split('-').collect();
    let err = || format!("invalid date {trimmed:?}");
    if parts.len() != 3 || !parts.iter().all(|p| p.chars().all(|c| c.is_ascii_digit())) {
        return Err(err());
    }
    let lens = (parts[0].len(), parts[1].len(), parts[2].len());
    let (year, month, day) = match lens {
        (2, 2, 2) => {
            let yy: i32 = parts[2].parse().map_err(|_| err())?;
            let year = if yy <= 69 { 2000 + yy } else { 1900 + yy };
            (year, parts[1].parse().map_err(|_| err())?, parts[0].parse().map_err(|_| err())?)
        }
        (4, 2, 2) => (
            parts[0].parse().map_err(|_| err())?,
            parts[1].parse().map_err(|_| err())?,
            parts[2].parse().map_err(|_| err())?,
        ),
        _ => return Err(err()),
    };
    NaiveDate::from_ymd_opt(year, month, day).ok_or_else(err)
}

fn normalize_header(name: &str) -> String {
    name.trim()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

struct ColumnMap {
    page_name: usize,
    created: usize,
    content_type: usize,
    message: usize,
    lang_prediction: Option<usize>,
}

fn map_columns(headers: &[String]) -> Result<ColumnMap, ParseError> {
    let find = |name: &str| -> Result<usize, ParseError> {
        headers
            .iter()
            .position(|h| normalize_header(h) == name)
            .ok_or_else(|| ParseError::MissingColumn {
                name: name.to_string(),
            })
    };
    Ok(ColumnMap {
        page_name: find("page name")?,
        created: find("created")?,
        content_type: find("type")?,
        message: find("message")?,
        lang_prediction: headers
            .iter()
            .position(|h| normalize_header(h) == "langprediction"),
    })
}

fn build_record(
    line: u64,
    page_name: &str,
    created: &str,
    content_type: &str,
    message: &str,
    lang_prediction: Option<&str>,
) -> Result<PostRecord, ParseError> {
    let page_name = page_name.trim();
    if page_name.is_empty() {
        return Err(ParseError::MalformedRow {
            line,
            reason: "empty page name".to_string(),
        });
    }
    let created = parse_date(created).map_err(|_| ParseError::InvalidDate {
        line,
        raw: created.trim().to_string(),
    })?;
    let lang_prediction = match lang_prediction {
        Some(raw) if !raw.trim().is_empty() => {
            Some(LangPrediction::parse(raw).map_err(|e| ParseError::MalformedRow {
                line,
                reason: format!("bad langprediction: {e}"),
            })?)
        }
        _ => None,
    };
    Ok(PostRecord {
        page_name: page_name.to_string(),
        created,
        content_type: ContentType::from_label(content_type),
        message: message.to_string(),
        lang_prediction,
    })
}

/// Parse a post dump into records, in input order. Structural problems are
/// reported with 1-based file line numbers (the CSV header is line 1).
pub fn parse_records<R: Read>(
    input: R,
    format: InputFormat,
) -> Result<(Vec<PostRecord>, IngestReport), ParseError> {
    let records = match format {
        InputFormat::Csv => parse_csv(input)?,
        InputFormat::Jsonl => parse_jsonl(input)?,
    };
    let report = IngestReport::with_counts(records.len() as u64, 0, 0, &records);
    Ok((records, report))
}

fn parse_csv<R: Read>(input: R) -> Result<Vec<PostRecord>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers: Vec<String> = {
        let raw = reader.byte_headers().map_err(csv_error_to_parse)?;
        raw.iter()
            .map(|field| {
                std::str::from_utf8(field)
                    .map(str::to_string)
                    .map_err(|_| ParseError::InvalidUtf8 { line: 1 })
            })
            .collect::<Result<_, _>>()?
    };
    let columns = map_columns(&headers)?;
    let mut records = Vec::new();
    let mut row = csv::ByteRecord::new();
    loop {
        let more = reader.read_byte_record(&mut row).map_err(csv_error_to_parse)?;
        if !more {
            break;
        }
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize| -> Result<&str, ParseError> {
            let bytes = row.get(idx).ok_or_else(|| ParseError::MalformedRow {
                line,
                reason: format!("missing field {idx}"),
            })?;
            std::str::from_utf8(bytes).map_err(|_| ParseError::InvalidUtf8 { line })
        };
        let lang = match columns.lang_prediction {
            Some(idx) if idx < row.len() => Some(field(idx)?),
            _ => None,
        };
        records.push(build_record(
            line,
            field(columns.page_name)?,
            field(columns.created)?,
            field(columns.content_type)?,
            field(columns.message)?,
            lang,
        )?);
    }
    Ok(records)
}

fn csv_error_to_parse(err: csv::Error) -> ParseError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    let reason = err.to_string();
    match err.into_kind() {
        csv::ErrorKind::Io(e) => ParseError::Io(e),
        csv::ErrorKind::Utf8 { .. } => ParseError::InvalidUtf8 { line },
        _ => ParseError::MalformedRow { line, reason },
    }
}

#[derive(Deserialize)]
struct RawJsonRecord {
    page_name: String,
    created: String,
    #[serde(rename = "type")]
    content_type: String,
    message: String,
    #[serde(default)]
    langprediction: Option<String>,
}

fn parse_jsonl<R: Read>(input: R) -> Result<Vec<PostRecord>, ParseError> {
    let mut reader = BufReader::new(input);
    let mut records = Vec::new();
    let mut line_no = 0u64;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let text = std::str::from_utf8(&buf).map_err(|_| ParseError::InvalidUtf8 { line: line_no })?;
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        let raw: RawJsonRecord =
            serde_json::from_str(text).map_err(|e| ParseError::MalformedRow {
                line: line_no,
                reason: e.to_string(),
            })?;
        records.push(build_record(
            line_no,
            &raw.page_name,
            &raw.created,
            &raw.content_type,
            &raw.message,
            raw.langprediction.as_deref(),
        )?);
    }
    Ok(records)
}

/// Remove records whose message is empty or whitespace-only, preserving
/// order. Idempotent.
pub fn drop_empty_messages(records: Vec<PostRecord>) -> (Vec<PostRecord>, IngestReport) {
    let read = records.len() as u64;
    let kept: Vec<PostRecord> = records
        .into_iter()
        .filter(|r| !r.message.trim().is_empty())
        .collect();
    let dropped = read - kept.len() as u64;
    let report = IngestReport::with_counts(read, dropped, 0, &kept);
    (kept, report)
}

/// Remove records whose page name (after trimming) is in the blacklist.
pub fn filter_pages(
    records: Vec<PostRecord>,
    blacklist: &BTreeSet<String>,
) -> (Vec<PostRecord>, IngestReport) {
    let read = records.len() as u64;
    let kept: Vec<PostRecord> = records
        .into_iter()
        .filter(|r| !blacklist.iter().any(|b| b.trim() == r.page_name.trim()))
        .collect();
    let dropped = read - kept.len() as u64;
    let report = IngestReport::with_counts(read, 0, dropped, &kept);
    (kept, report)
}

/// Canonical JSONL serialization: one object per line, ISO dates, the
/// `langprediction` key present only when set.
pub fn write_jsonl<W: Write>(records: &[PostRecord], mut sink: W) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut sink, record)?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

/// Canonical CSV serialization with the standard header row.
pub fn write_csv<W: Write>(records: &[PostRecord], sink: W) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["Page Name", "Created", "Type", "Message", "langprediction"])?;
    for record in records {
        writer.write_record([
            record.page_name.as_str(),
            &record.created.format("%Y-%m-%d").to_string(),
            record.content_type.label(),
            record.message.as_str(),
            &record
                .lang_prediction
                .as_ref()
                .map(|p| p.to_string())
                .unwrap_or_default(),
        ])?;
    }
    writer.flush()
}

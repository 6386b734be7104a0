//! Tweet corpora: loading delimited exports and record-level filtering.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fallback timestamp format, also used when serializing without an explicit pattern.
pub const DEFAULT_TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    /// Lowercase handle without the leading `@`.
    pub author: String,
    /// Lowercase language tag, empty when unknown.
    pub language: String,
    pub text: String,
}

/// An ordered, immutable collection of tweets with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    provenance: String,
}

impl Corpus {
    pub fn new(tweets: Vec<Tweet>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(tweets.len());
        for t in &tweets {
            if t.id.is_empty() {
                return Err(Error::Schema("tweet with empty id".into()));
            }
            if !seen.insert(t.id.as_str()) {
                return Err(Error::DuplicateId(t.id.clone()));
            }
        }
        Ok(Corpus {
            tweets,
            provenance: provenance.into(),
        })
    }

    pub fn empty(provenance: impl Into<String>) -> Self {
        Corpus {
            tweets: Vec::new(),
            provenance: provenance.into(),
        }
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tweet> {
        self.tweets.iter()
    }

    /// Concatenates separately loaded chunks, in order.
    pub fn concat(parts: impl IntoIterator<Item = Corpus>) -> Result<Corpus> {
        let mut tweets = Vec::new();
        let mut provenance = Vec::new();
        for part in parts {
            tweets.extend(part.tweets);
            if !part.provenance.is_empty() {
                provenance.push(part.provenance);
            }
        }
        Corpus::new(tweets, provenance.join(" + "))
    }

    pub(crate) fn with_tweets(&self, tweets: Vec<Tweet>) -> Corpus {
        Corpus {
            tweets,
            provenance: self.provenance.clone(),
        }
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Tweet;
    type IntoIter = std::slice::Iter<'a, Tweet>;

    fn into_iter(self) -> Self::IntoIter {
        self.tweets.iter()
    }
}

/// Reference to a column, by header name or zero-based index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    /// Parses `3` as an index and anything else as a header name.
    pub fn parse(s: &str) -> ColumnRef {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.trim().to_string()),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    #[default]
    Utf8,
    /// ISO-8859-1, transcoded to UTF-8 at load.
    Latin1,
}

/// How the columns of a delimited export map onto tweet fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaMap {
    pub id: Option<ColumnRef>,
    pub timestamp: Option<ColumnRef>,
    pub author: Option<ColumnRef>,
    pub language: Option<ColumnRef>,
    pub text: ColumnRef,
    pub delimiter: char,
    /// chrono format pattern; when absent a few common layouts are tried.
    pub timestamp_format: Option<String>,
    pub has_header: bool,
    pub encoding: Encoding,
}

impl Default for SchemaMap {
    fn default() -> Self {
        SchemaMap {
            id: Some(ColumnRef::Name("id".into())),
            timestamp: Some(ColumnRef::Name("timestamp".into())),
            author: Some(ColumnRef::Name("author".into())),
            language: Some(ColumnRef::Name("language".into())),
            text: ColumnRef::Name("text".into()),
            delimiter: ',',
            timestamp_format: None,
            has_header: true,
            encoding: Encoding::Utf8,
        }
    }
}

impl SchemaMap {
    /// A schema with only a text column and everything else synthesized.
    pub fn text_only(text: ColumnRef) -> Self {
        SchemaMap {
            id: None,
            timestamp: None,
            author: None,
            language: None,
            text,
            ..SchemaMap::default()
        }
    }

    fn delimiter_byte(&self) -> Result<u8> {
        if self.delimiter.is_ascii() {
            Ok(self.delimiter as u8)
        } else {
            Err(Error::Schema(format!(
                "delimiter `{}` is not a single-byte character",
                self.delimiter
            )))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ResolvedColumns {
    id: Option<usize>,
    timestamp: Option<usize>,
    author: Option<usize>,
    language: Option<usize>,
    text: usize,
}

fn resolve(
    col: &ColumnRef,
    header: Option<&csv::ByteRecord>,
    encoding: Encoding,
) -> Result<Option<usize>> {
    match col {
        ColumnRef::Index(i) => Ok(Some(*i)),
        ColumnRef::Name(name) => {
            let header = header.ok_or_else(|| {
                Error::Schema(format!("column `{name}` referenced by name but input has no header"))
            })?;
            Ok(header
                .iter()
                .position(|h| decode(h, encoding).map(|h| h.trim() == name).unwrap_or(false)))
        }
    }
}

fn resolve_columns(schema: &SchemaMap, header: Option<&csv::ByteRecord>) -> Result<ResolvedColumns> {
    let text = resolve(&schema.text, header, schema.encoding)?
        .ok_or_else(|| Error::Schema(format!("text column `{}` not found", schema.text)))?;
    let optional = |c: &Option<ColumnRef>| -> Result<Option<usize>> {
        match c {
            None => Ok(None),
            Some(c) => resolve(c, header, schema.encoding),
        }
    };
    Ok(ResolvedColumns {
        id: optional(&schema.id)?,
        timestamp: optional(&schema.timestamp)?,
        author: optional(&schema.author)?,
        language: optional(&schema.language)?,
        text,
    })
}

/// A record-level problem encountered while loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowIssue {
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub rows_read: usize,
    /// Rows that could not be turned into a tweet and were skipped.
    pub malformed: Vec<RowIssue>,
    /// Rows loaded with a substituted value (e.g. epoch for a bad timestamp).
    pub warnings: Vec<RowIssue>,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub corpus: Corpus,
    pub report: LoadReport,
}

/// Loads a delimited tweet export.
pub fn load_corpus<R: Read>(source: R, schema: &SchemaMap) -> Result<Loaded> {
    load_corpus_chunk(source, schema, 0, "")
}

/// Loads one chunk of a larger export whose data rows start after
/// `rows_before` earlier rows; synthesized ids and issue row numbers are
/// offset accordingly so concatenated chunks equal a single-pass load.
pub fn load_corpus_chunk<R: Read>(
    source: R,
    schema: &SchemaMap,
    rows_before: usize,
    provenance: &str,
) -> Result<Loaded> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter_byte()?)
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut records = reader.byte_records();
    let header = if schema.has_header {
        match records.next() {
            Some(rec) => Some(rec.map_err(io_or_csv)?),
            None => None,
        }
    } else {
        None
    };
    // An empty input has no header either; name lookups then cannot fail usefully.
    if schema.has_header && header.is_none() {
        return Ok(Loaded {
            corpus: Corpus::empty(provenance),
            report: LoadReport::default(),
        });
    }
    let cols = resolve_columns(schema, header.as_ref())?;

    let mut report = LoadReport::default();
    let mut tweets = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = rows_before + i + 1;
        report.rows_read += 1;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    return Err(io_or_csv(e));
                }
                report.malformed.push(RowIssue {
                    row,
                    message: e.to_string(),
                });
                continue;
            }
        };
        match tweet_from_record(&rec, &cols, schema, row, &mut report.warnings) {
            Ok(t) => tweets.push(t),
            Err(message) => report.malformed.push(RowIssue { row, message }),
        }
    }
    Ok(Loaded {
        corpus: Corpus::new(tweets, provenance)?,
        report,
    })
}

fn io_or_csv(e: csv::Error) -> Error {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Csv(e)
    }
}

fn decode(bytes: &[u8], encoding: Encoding) -> std::result::Result<String, String> {
    match encoding {
        Encoding::Utf8 => String::from_utf8(bytes.to_vec()).map_err(|e| format!("invalid UTF-8: {e}")),
        Encoding::Latin1 => Ok(bytes.iter().map(|&b| b as char).collect()),
    }
}

fn strip_controls(s: &str) -> String {
    s.chars()
        .filter(|&c| !c.is_control() || c == '\t' || c == '\n')
        .collect()
}

/// Lowercases a handle and drops a leading `@`.
pub fn normalize_handle(s: &str) -> String {
    s.trim().trim_start_matches('@').to_lowercase()
}

fn tweet_from_record(
    rec: &csv::ByteRecord,
    cols: &ResolvedColumns,
    schema: &SchemaMap,
    row: usize,
    warnings: &mut Vec<RowIssue>,
) -> std::result::Result<Tweet, String> {
    let field = |idx: Option<usize>| -> std::result::Result<Option<String>, String> {
        match idx.and_then(|i| rec.get(i)) {
            Some(b) => decode(b, schema.encoding).map(|s| Some(strip_controls(&s))),
            None => Ok(None),
        }
    };
    let text = field(Some(cols.text))?
        .ok_or_else(|| format!("row has {} fields, text column is #{}", rec.len(), cols.text))?;

    let id = match field(cols.id)? {
        Some(id) if !id.trim().is_empty() => id.trim().to_string(),
        Some(_) => return Err("empty id".into()),
        None if cols.id.is_some() => return Err("missing id field".into()),
        None => row.to_string(),
    };

    let timestamp = match field(cols.timestamp)? {
        None if cols.timestamp.is_none() => DateTime::<Utc>::UNIX_EPOCH,
        raw => {
            let raw = raw.unwrap_or_default();
            match parse_timestamp(raw.trim(), schema.timestamp_format.as_deref()) {
                Some(ts) => ts,
                None => {
                    warnings.push(RowIssue {
                        row,
                        message: format!("unparseable timestamp `{raw}`, epoch substituted"),
                    });
                    DateTime::<Utc>::UNIX_EPOCH
                }
            }
        }
    };

    Ok(Tweet {
        id,
        timestamp,
        author: field(cols.author)?.map(|a| normalize_handle(&a)).unwrap_or_default(),
        language: field(cols.language)?
            .map(|l| l.trim().to_lowercase())
            .unwrap_or_default(),
        text,
    })
}

/// Parses a timestamp with an explicit chrono pattern or, without one, a few
/// common layouts. Values without an offset are taken as UTC.
pub fn parse_timestamp(raw: &str, format: Option<&str>) -> Option<DateTime<Utc>> {
    if raw.is_empty() {
        return None;
    }
    let formats: Vec<&str> = match format {
        Some(f) => vec![f],
        None => vec![
            DEFAULT_TIMESTAMP_FORMAT,
            "%Y-%m-%dT%H:%M:%S",
            "%Y-%m-%dT%H:%M:%SZ",
            "%a %b %d %H:%M:%S %z %Y",
            "%d-%m-%Y %H:%M:%S",
            "%Y-%m-%d",
        ],
    };
    if format.is_none() {
        if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
            return Some(ts.with_timezone(&Utc));
        }
    }
    for f in formats {
        if let Ok(ts) = DateTime::parse_from_str(raw, f) {
            return Some(ts.with_timezone(&Utc));
        }
        if let Ok(ts) = NaiveDateTime::parse_from_str(raw, f) {
            return Some(Utc.from_utc_datetime(&ts));
        }
        if let Ok(d) = NaiveDate::parse_from_str(raw, f) {
            return Some(Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0)?));
        }
    }
    None
}

/// Writes a corpus back out in the column layout of `schema`. Columns are
/// emitted in the order id, timestamp, author, language, text, skipping
/// fields the schema does not map.
pub fn write_corpus<W: Write>(corpus: &Corpus, schema: &SchemaMap, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(schema.delimiter_byte()?)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let fmt = schema
        .timestamp_format
        .as_deref()
        .unwrap_or(DEFAULT_TIMESTAMP_FORMAT);

    let columns: Vec<(&str, &Option<ColumnRef>)> = vec![
        ("id", &schema.id),
        ("timestamp", &schema.timestamp),
        ("author", &schema.author),
        ("language", &schema.language),
    ];
    if schema.has_header {
        let mut header: Vec<String> = columns
            .iter()
            .filter_map(|(default, c)| c.as_ref().map(|c| header_name(c, default)))
            .collect();
        header.push(header_name(&schema.text, "text"));
        writer.write_record(&header)?;
    }
    for t in corpus {
        let mut row = Vec::with_capacity(5);
        if schema.id.is_some() {
            row.push(t.id.clone());
        }
        if schema.timestamp.is_some() {
            row.push(t.timestamp.format(fmt).to_string());
        }
        if schema.author.is_some() {
            row.push(t.author.clone());
        }
        if schema.language.is_some() {
            row.push(t.language.clone());
        }
        row.push(t.text.clone());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

fn header_name(c: &ColumnRef, default: &str) -> String {
    match c {
        ColumnRef::Name(n) => n.clone(),
        ColumnRef::Index(_) => default.to_string(),
    }
}

/// Inclusive instant range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    from: DateTime<Utc>,
    to: DateTime<Utc>,
}

impl DateRange {
    pub fn new(from: DateTime<Utc>, to: DateTime<Utc>) -> Result<Self> {
        if from > to {
            return Err(Error::config(format!("date range start {from} is after end {to}")));
        }
        Ok(DateRange { from, to })
    }

    pub fn contains(&self, ts: DateTime<Utc>) -> bool {
        self.from <= ts && ts <= self.to
    }

    pub fn from(&self) -> DateTime<Utc> {
        self.from
    }

    pub fn to(&self) -> DateTime<Utc> {
        self.to
    }
}

/// Conjunction of optional record-level criteria. An all-`None` filter keeps
/// every tweet.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusFilter {
    pub languages: Option<BTreeSet<String>>,
    pub date_range: Option<DateRange>,
    pub authors: Option<BTreeSet<String>>,
    /// Case-insensitive substring of the text.
    pub query: Option<String>,
}

impl CorpusFilter {
    pub fn with_languages<I, S>(mut self, langs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.languages = Some(langs.into_iter().map(|l| l.as_ref().trim().to_lowercase()).collect());
        self
    }

    pub fn with_authors<I, S>(mut self, authors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.authors = Some(authors.into_iter().map(|a| normalize_handle(a.as_ref())).collect());
        self
    }

    pub fn with_date_range(mut self, range: DateRange) -> Self {
        self.date_range = Some(range);
        self
    }

    pub fn with_query(mut self, query: impl Into<String>) -> Self {
        self.query = Some(query.into().to_lowercase());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_none()
            && self.date_range.is_none()
            && self.authors.is_none()
            && self.query.is_none()
    }

    pub fn matches(&self, t: &Tweet) -> bool {
        if let Some(langs) = &self.languages {
            // an unknown language never matches a language criterion
            if t.language.is_empty() || !langs.contains(&t.language) {
                return false;
            }
        }
        if let Some(range) = &self.date_range {
            if !range.contains(t.timestamp) {
                return false;
            }
        }
        if let Some(authors) = &self.authors {
            if !authors.contains(&t.author) {
                return false;
            }
        }
        if let Some(q) = &self.query {
            if !t.text.to_lowercase().contains(q.as_str()) {
                return false;
            }
        }
        true
    }
}

pub fn filter_corpus(corpus: &Corpus, filter: &CorpusFilter) -> Corpus {
    if filter.is_empty() {
        return corpus.clone();
    }
    corpus.with_tweets(corpus.iter().filter(|t| filter.matches(t)).cloned().collect())
}

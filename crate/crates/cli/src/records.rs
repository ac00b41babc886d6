//! Labeled post records, as line-delimited JSON objects or CSV with a header.

use std::io::{BufRead, Read};
use std::path::Path;

use chrono::DateTime;
use serde::Deserialize;
use sentitrend_core::ingest::{Label, TweetRecord, UNKNOWN_COUNTRY};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Csv,
}

impl Format {
    /// `.csv` files are CSV, everything else line-delimited JSON.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::JsonLines,
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Parsed {
    pub records: Vec<TweetRecord>,
    /// Non-blank lines or rows seen.
    pub lines: usize,
    pub malformed: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Id {
    Text(String),
    Int(i64),
}

#[derive(Deserialize)]
struct Raw {
    id: Id,
    timestamp: String,
    country: String,
    label: String,
    is_retweet: bool,
    #[serde(default)]
    text: Option<String>,
}

impl Raw {
    fn into_record(self) -> Option<TweetRecord> {
        let timestamp = DateTime::parse_from_rfc3339(self.timestamp.trim()).ok()?.timestamp();
        let label: Label = self.label.parse().ok()?;
        let country = match self.country.trim() {
            "" => UNKNOWN_COUNTRY.to_string(),
            c => c.to_string(),
        };
        let id = match self.id {
            Id::Text(s) => s,
            Id::Int(n) => n.to_string(),
        };
        Some(TweetRecord { id, timestamp, country, label, is_retweet: self.is_retweet, text: self.text })
    }
}

fn parse_jsonl(reader: impl BufRead, source: &str) -> Result<Parsed> {
    let mut out = Parsed::default();
    for line in reader.lines() {
        let line = line.map_err(CliError::io(source))?;
        if line.trim().is_empty() {
            continue;
        }
        out.lines += 1;
        match serde_json::from_str::<Raw>(&line).ok().and_then(Raw::into_record) {
            Some(r) => out.records.push(r),
            None => out.malformed += 1,
        }
    }
    Ok(out)
}

fn parse_csv(reader: impl Read, source: &str) -> Result<Parsed> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let headers = match csv.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(CliError::Schema(format!("{source}: unreadable header: {e}"))),
    };
    let mut out = Parsed::default();
    for row in csv.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) if e.is_io_error() => {
                let csv::ErrorKind::Io(io) = e.into_kind() else { unreachable!() };
                return Err(CliError::Io { path: source.into(), source: io });
            }
            Err(_) => {
                out.lines += 1;
                out.malformed += 1;
                continue;
            }
        };
        out.lines += 1;
        match row.deserialize::<Raw>(Some(&headers)).ok().and_then(Raw::into_record) {
            Some(r) => out.records.push(r),
            None => out.malformed += 1,
        }
    }
    Ok(out)
}

/// Parses one stream. Malformed lines are counted, not fatal, unless they
/// make up more than half of the input.
pub fn parse_records(reader: impl BufRead, format: Format, source: &str) -> Result<Parsed> {
    let parsed = match format {
        Format::JsonLines => parse_jsonl(reader, source)?,
        Format::Csv => parse_csv(reader, source)?,
    };
    if parsed.malformed * 2 > parsed.lines {
        return Err(CliError::Schema(format!(
            "{source}: {} of {} records malformed; is this a labeled record file?",
            parsed.malformed, parsed.lines
        )));
    }
    Ok(parsed)
}

pub fn read_records(path: &Path) -> Result<Parsed> {
    let file = std::fs::File::open(path).map_err(CliError::io(path))?;
    parse_records(std::io::BufReader::new(file), Format::from_path(path), &path.display().to_string())
}

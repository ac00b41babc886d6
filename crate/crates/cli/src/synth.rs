//! Synthetic labeled posts for 34 countries drawn from three planted weekly
//! sentiment profiles, plus the noise the ingest stage has to remove.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use chrono::DateTime;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sentitrend_core::ingest::{AggregationWindow, Label, TweetRecord, UNKNOWN_COUNTRY};

use crate::error::{CliError, Result};
use crate::records::Format;

pub const COUNTRIES: [&str; 34] = [
    "US", "DE", "TR", "CA", "IE", "IN", "FR", "AU", "UA", "ES", "GB", "IT", "NL", "JP", "AT", "AE", "AR", "DK", "BE",
    "BR", "CZ", "PL", "ID", "EE", "CH", "FI", "CN", "ZA", "PT", "PH", "MX", "RU", "SG", "SE",
];

/// Expected weekly positive then negative shares for each group.
const PROFILES: [[f64; 8]; 3] = [
    // steadily growing attention, negative dominating
    [0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.20, 0.23],
    // a hump: rising then fading
    [0.04, 0.09, 0.14, 0.18, 0.20, 0.17, 0.11, 0.07],
    // positive fading, negativity building week on week
    [0.09, 0.07, 0.05, 0.04, 0.05, 0.10, 0.20, 0.40],
];

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub records: Vec<TweetRecord>,
    /// Planted group (0, 1 or 2) per country.
    pub groups: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthOptions {
    pub seed: u64,
    /// Relative per-count jitter around the group profile.
    pub jitter: f64,
    /// First day of week 1, in days since the Unix epoch.
    pub start_day: i64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            jitter: 0.01,
            // 2022-03-01
            start_day: 19_052,
        }
    }
}

pub fn generate(opts: &SynthOptions) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..COUNTRIES.len()).collect();
    order.shuffle(&mut rng);
    let groups: BTreeMap<String, usize> =
        order.iter().enumerate().map(|(slot, &i)| (COUNTRIES[i].to_string(), slot % 3)).collect();

    let window = AggregationWindow::starting_on_day(opts.start_day);
    let week_secs = i64::from(window.week_length_days) * 86_400;
    let in_window = window.start..window.start + window.week_count as i64 * week_secs;
    let mut records = Vec::new();
    for (country, &group) in &groups {
        let volume = rng.gen_range(400.0..3000.0);
        for (i, share) in PROFILES[group].iter().enumerate() {
            let week = (i % 4) as i64;
            let label = if i < 4 { Label::Positive } else { Label::Negative };
            let count = (volume * share * (1.0 + rng.gen_range(-opts.jitter..=opts.jitter))).round() as usize;
            for _ in 0..count {
                let ts = window.start + week * week_secs + rng.gen_range(0..week_secs);
                push(&mut rng, &mut records, country, label, ts, false);
            }
        }
        for _ in 0..(volume * 0.1) as usize {
            let ts = rng.gen_range(in_window.clone());
            push(&mut rng, &mut records, country, Label::Neutral, ts, false);
        }
        for _ in 0..(volume * 0.05) as usize {
            let label = if rng.gen_bool(0.5) { Label::Positive } else { Label::Negative };
            let ts = rng.gen_range(in_window.clone());
            push(&mut rng, &mut records, country, label, ts, true);
        }
        for _ in 0..5 {
            // just after the window
            let ts = in_window.end + rng.gen_range(0..3 * 86_400);
            push(&mut rng, &mut records, country, Label::Negative, ts, false);
        }
    }
    for _ in 0..200 {
        let label = if rng.gen_bool(0.5) { Label::Positive } else { Label::Negative };
        let ts = rng.gen_range(in_window.clone());
        push(&mut rng, &mut records, UNKNOWN_COUNTRY, label, ts, false);
    }
    records.shuffle(&mut rng);
    for (i, r) in records.iter_mut().enumerate() {
        r.id = format!("t{:07}", i + 1);
    }
    Synthetic { records, groups }
}

fn push(rng: &mut ChaCha8Rng, records: &mut Vec<TweetRecord>, country: &str, label: Label, timestamp: i64, is_retweet: bool) {
    records.push(TweetRecord {
        id: String::new(),
        timestamp,
        country: country.to_string(),
        label,
        is_retweet,
        text: Some(format!("post about the war {}", rng.gen_range(0..1000))),
    });
}

#[derive(Serialize)]
struct Row<'a> {
    id: &'a str,
    timestamp: String,
    country: &'a str,
    label: &'a str,
    is_retweet: bool,
    text: Option<&'a str>,
}

impl<'a> From<&'a TweetRecord> for Row<'a> {
    fn from(r: &'a TweetRecord) -> Self {
        Row {
            id: &r.id,
            timestamp: DateTime::from_timestamp(r.timestamp, 0).expect("timestamp in range").to_rfc3339(),
            country: &r.country,
            label: r.label.as_str(),
            is_retweet: r.is_retweet,
            text: r.text.as_deref(),
        }
    }
}

pub fn write_records(path: &Path, records: &[TweetRecord], format: Format) -> Result<()> {
    let io = CliError::io(path);
    match format {
        Format::JsonLines => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(&Row::from(r)).expect("row serializes"));
                out.push('\n');
            }
            std::fs::write(path, out).map_err(io)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Schema(e.to_string()))?;
            for r in records {
                w.serialize(Row::from(r)).map_err(|e| CliError::Schema(e.to_string()))?;
            }
            w.flush().map_err(io)
        }
    }
}

pub fn write_groups(path: &Path, groups: &BTreeMap<String, usize>) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(CliError::io(path))?;
    let mut text = String::from("country,group\n");
    for (c, g) in groups {
        text.push_str(&format!("{c},{}\n", g + 1));
    }
    file.write_all(text.as_bytes()).map_err(CliError::io(path))
}

//! Labeled records to per-country weekly counts and feature vectors.
//!
//! Weeks are fixed blocks of `week_length_days` starting at the window start.
//! Anything before the start or after the last week is out of window. The
//! feature vector lists positive frequencies for every week, then negative
//! frequencies for every week.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const UNKNOWN_COUNTRY: &str = "UNKNOWN";
pub const DEFAULT_WEEK_COUNT: usize = 4;
pub const DEFAULT_WEEK_LENGTH_DAYS: u32 = 7;
pub const DEFAULT_MIN_TWEETS: u64 = 50;

const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
    Neutral,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Neutral => "neutral",
        }
    }
}

impl core::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            "neutral" => Ok(Label::Neutral),
            other => Err(Error::invalid(alloc::format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TweetRecord {
    pub id: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    /// ISO 3166-1 alpha-2 code, or [`UNKNOWN_COUNTRY`].
    pub country: String,
    pub label: Label,
    pub is_retweet: bool,
    pub text: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AggregationWindow {
    /// Start instant in seconds since the Unix epoch.
    pub start: i64,
    pub week_count: usize,
    pub week_length_days: u32,
}

impl AggregationWindow {
    pub fn new(start: i64, week_count: usize, week_length_days: u32) -> Result<Self> {
        if week_count == 0 || week_length_days == 0 {
            return Err(Error::invalid("window must cover at least one day"));
        }
        Ok(Self { start, week_count, week_length_days })
    }

    /// Window of default shape starting at midnight UTC of `day` (days since epoch).
    pub fn starting_on_day(day: i64) -> Self {
        Self {
            start: day * SECONDS_PER_DAY,
            week_count: DEFAULT_WEEK_COUNT,
            week_length_days: DEFAULT_WEEK_LENGTH_DAYS,
        }
    }

    fn week_seconds(&self) -> i64 {
        i64::from(self.week_length_days) * SECONDS_PER_DAY
    }

    /// Zero-based week containing `timestamp`, if inside the window.
    pub fn week_of(&self, timestamp: i64) -> Option<usize> {
        let offset = timestamp.checked_sub(self.start)?;
        if offset < 0 {
            return None;
        }
        let week = offset.div_euclid(self.week_seconds());
        usize::try_from(week).ok().filter(|&w| w < self.week_count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountrySeries {
    pub country: String,
    pub pos_counts: Vec<u64>,
    pub neg_counts: Vec<u64>,
    /// `2 × week_count` values; empty until normalized.
    pub features: Vec<f64>,
}

impl CountrySeries {
    pub fn new(country: impl Into<String>, pos_counts: Vec<u64>, neg_counts: Vec<u64>) -> Self {
        Self { country: country.into(), pos_counts, neg_counts, features: Vec::new() }
    }

    pub fn week_count(&self) -> usize {
        self.pos_counts.len()
    }

    /// Positive plus negative tweets over all weeks.
    pub fn total(&self) -> u64 {
        self.pos_counts.iter().chain(&self.neg_counts).sum()
    }
}

/// Bookkeeping for [`aggregate_weekly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AggregationTally {
    /// Positive or negative records inside the window.
    pub counted: usize,
    /// Neutral records inside the window.
    pub neutral: usize,
    pub out_of_window: usize,
}

impl AggregationTally {
    pub fn total(&self) -> usize {
        self.counted + self.neutral + self.out_of_window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide every count by the country's total.
    #[default]
    RelativeFrequency,
    /// Map the positive and negative sub-vectors to [0, 1] independently.
    MinMax,
}

/// Keeps the last record for every id. Returns the survivors in their
/// original relative order and the number of records dropped.
pub fn dedup_by_id(records: Vec<TweetRecord>) -> (Vec<TweetRecord>, usize) {
    let mut last: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        last.insert(r.id.as_str(), i);
    }
    let keep: Vec<bool> = {
        let mut keep = vec![false; records.len()];
        for &i in last.values() {
            keep[i] = true;
        }
        keep
    };
    let dropped = keep.iter().filter(|k| !**k).count();
    let out = records.into_iter().zip(keep).filter_map(|(r, k)| k.then_some(r)).collect();
    (out, dropped)
}

/// Drops records without a known country and retweets.
pub fn filter_records(mut records: Vec<TweetRecord>) -> Vec<TweetRecord> {
    records.retain(|r| !r.is_retweet && r.country != UNKNOWN_COUNTRY && !r.country.is_empty());
    records
}

/// Weekly positive/negative counts per country, sorted by country code.
pub fn aggregate_weekly(
    records: &[TweetRecord],
    window: &AggregationWindow,
) -> (Vec<CountrySeries>, AggregationTally) {
    let mut tally = AggregationTally::default();
    let mut by_country: BTreeMap<&str, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for r in records {
        let Some(week) = window.week_of(r.timestamp) else {
            tally.out_of_window += 1;
            continue;
        };
        let (pos, neg) = by_country
            .entry(r.country.as_str())
            .or_insert_with(|| (vec![0; window.week_count], vec![0; window.week_count]));
        match r.label {
            Label::Positive => {
                pos[week] += 1;
                tally.counted += 1;
            }
            Label::Negative => {
                neg[week] += 1;
                tally.counted += 1;
            }
            Label::Neutral => tally.neutral += 1,
        }
    }
    let series = by_country
        .into_iter()
        .map(|(country, (pos, neg))| CountrySeries::new(country, pos, neg))
        .collect();
    (series, tally)
}

pub fn normalize(mut series: CountrySeries, mode: Normalization) -> CountrySeries {
    let counts: Vec<f64> =
        series.pos_counts.iter().chain(&series.neg_counts).map(|&c| c as f64).collect();
    series.features = match mode {
        Normalization::RelativeFrequency => {
            let total: f64 = counts.iter().sum();
            if total > 0.0 {
                counts.iter().map(|c| c / total).collect()
            } else {
                vec![0.0; counts.len()]
            }
        }
        Normalization::MinMax => {
            let (pos, neg) = counts.split_at(series.pos_counts.len());
            let mut f = minmax(pos);
            f.extend(minmax(neg));
            f
        }
    };
    series
}

fn minmax(xs: &[f64]) -> Vec<f64> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.0; xs.len()];
    }
    xs.iter().map(|x| (x - lo) / (hi - lo)).collect()
}

/// Keeps countries with at least `threshold` positive plus negative tweets.
pub fn min_tweet_filter(mut series: Vec<CountrySeries>, threshold: u64) -> Vec<CountrySeries> {
    series.retain(|s| s.total() >= threshold);
    series
}

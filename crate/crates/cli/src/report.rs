//! Stage summaries and the combined run report. Nothing here depends on wall
//! clock time or output location, so reruns serialize identically.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub file: String,
    pub lines: usize,
    pub malformed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub inputs: Vec<InputSummary>,
    pub parsed: usize,
    pub malformed: usize,
    pub duplicates: usize,
    pub retweets: usize,
    pub unknown_country: usize,
    /// Records left after dropping retweets and unknown countries.
    pub filtered: usize,
    pub counted: usize,
    pub neutral: usize,
    pub out_of_window: usize,
    /// Positive plus negative tweets in the window, by country.
    pub country_totals: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryFitSummary {
    pub country: String,
    pub bandwidth: Option<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// `(h, mean leave-one-out loss)` for every grid point, when selected.
    pub bandwidth_scores: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitFailure {
    pub country: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub countries: usize,
    pub below_min_tweets: Vec<String>,
    pub fitted: Vec<CountryFitSummary>,
    pub failed: Vec<FitFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub k: usize,
    pub linkage: String,
    pub cluster_on: String,
    pub countries: usize,
    pub sizes: Vec<usize>,
    pub assignment: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeRecord {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DendrogramFile {
    pub linkage: String,
    /// Leaves are ids `0..n`; merge `k` creates cluster `n + k`.
    pub leaves: Vec<String>,
    pub merges: Vec<MergeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub settings: BTreeMap<String, String>,
    pub ingest: Option<IngestSummary>,
    pub fit: Option<FitSummary>,
    pub cluster: Option<ClusterSummary>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::io(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

/// Reads a stage summary if the stage has run.
pub fn read_optional<T: DeserializeOwned>(path: &Path) -> Result<Option<T>> {
    if path.exists() {
        read_json(path).map(Some)
    } else {
        Ok(None)
    }
}

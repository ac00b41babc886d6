//! The four stages. Each reads its inputs from, and writes its outputs to,
//! the configured output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sentitrend_core::cluster::{agglomerate, cut, pairwise_distances, ClusterAssignment, Dendrogram};
use sentitrend_core::ingest::{
    aggregate_weekly, dedup_by_id, filter_records, min_tweet_filter, normalize, CountrySeries, UNKNOWN_COUNTRY,
};
use sentitrend_core::smooth::fit_country;

use crate::config::{ClusterOn, Settings};
use crate::error::{CliError, Result};
use crate::records::read_records;
use crate::report::{
    read_optional, write_json, ClusterSummary, CountryFitSummary, DendrogramFile, FitFailure, FitSummary,
    IngestSummary, InputSummary, MergeRecord, RunReport,
};
use crate::{svg, tables};

pub const SERIES: &str = "series.csv";
pub const FEATURES: &str = "features.csv";
pub const COEFFICIENTS: &str = "coefficients.csv";
pub const DISTANCES: &str = "distances.csv";
pub const DENDROGRAM_JSON: &str = "dendrogram.json";
pub const DENDROGRAM_SVG: &str = "dendrogram.svg";
pub const CLUSTERS: &str = "clusters.csv";
pub const CHARTS: &str = "charts";
pub const INGEST_SUMMARY: &str = "ingest.json";
pub const FIT_SUMMARY: &str = "fit.json";
pub const CLUSTER_SUMMARY: &str = "cluster.json";
pub const REPORT: &str = "report.json";

fn out_path(s: &Settings, name: &str) -> PathBuf {
    s.out.join(name)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn require(path: &Path, stage: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Contract(format!("{} not found; run `{stage}` first", path.display())))
    }
}

pub fn ingest(s: &Settings) -> Result<IngestSummary> {
    if s.inputs.is_empty() {
        return Err(CliError::Config("no input files given (--input)".into()));
    }
    for path in &s.inputs {
        if !path.exists() {
            return Err(CliError::Io {
                path: path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
            });
        }
    }
    ensure_dir(&s.out)?;
    let mut summary = IngestSummary::default();
    let mut records = Vec::new();
    for path in &s.inputs {
        let parsed = read_records(path)?;
        let file = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
        if parsed.malformed > 0 {
            eprintln!("warning: {file}: skipped {} malformed of {} records", parsed.malformed, parsed.lines);
        }
        summary.inputs.push(InputSummary { file, lines: parsed.lines, malformed: parsed.malformed });
        summary.parsed += parsed.records.len();
        summary.malformed += parsed.malformed;
        records.extend(parsed.records);
    }
    if records.is_empty() {
        eprintln!("warning: no records in input");
    }
    let (records, duplicates) = dedup_by_id(records);
    if duplicates > 0 {
        eprintln!("warning: {duplicates} records with repeated ids; kept the last of each");
    }
    summary.duplicates = duplicates;
    summary.retweets = records.iter().filter(|r| r.is_retweet).count();
    summary.unknown_country =
        records.iter().filter(|r| !r.is_retweet && (r.country == UNKNOWN_COUNTRY || r.country.is_empty())).count();
    let records = filter_records(records);
    summary.filtered = records.len();

    let (series, tally) = aggregate_weekly(&records, &s.window());
    summary.counted = tally.counted;
    summary.neutral = tally.neutral;
    summary.out_of_window = tally.out_of_window;
    summary.country_totals = series.iter().map(|c| (c.country.clone(), c.total())).collect();

    tables::write_series(&out_path(s, SERIES), &series)?;
    write_json(&out_path(s, INGEST_SUMMARY), &summary)?;
    Ok(summary)
}

pub fn fit(s: &Settings) -> Result<FitSummary> {
    let series_path = out_path(s, SERIES);
    require(&series_path, "ingest")?;
    let series = tables::read_series(&series_path)?;
    let mut summary = FitSummary { countries: series.len(), ..Default::default() };
    let kept = min_tweet_filter(series.clone(), s.min_tweets);
    summary.below_min_tweets =
        series.iter().filter(|c| c.total() < s.min_tweets).map(|c| c.country.clone()).collect();
    let normalized: Vec<CountrySeries> = kept.into_iter().map(|c| normalize(c, s.normalize)).collect();
    if normalized.is_empty() {
        eprintln!("warning: no country has at least {} tweets", s.min_tweets);
    }

    let config = s.fit_config();
    let mut fits = Vec::new();
    for c in &normalized {
        match fit_country(c, &config) {
            Ok(fit) => {
                summary.fitted.push(CountryFitSummary {
                    country: fit.country.clone(),
                    bandwidth: fit.model.kernel.bandwidth(),
                    objective: fit.model.diagnostics.objective,
                    iterations: fit.model.diagnostics.iterations,
                    bandwidth_scores: fit
                        .selection
                        .as_ref()
                        .map(|sel| sel.grid.iter().copied().zip(sel.scores.iter().copied()).collect()),
                });
                fits.push(fit);
            }
            Err(e) => {
                eprintln!("warning: {}: fit failed: {e}", c.country);
                summary.failed.push(FitFailure { country: c.country.clone(), error: e.to_string() });
            }
        }
    }
    tables::write_features(&out_path(s, FEATURES), &normalized)?;
    tables::write_coefficients(&out_path(s, COEFFICIENTS), &fits)?;
    write_json(&out_path(s, FIT_SUMMARY), &summary)?;
    Ok(summary)
}

pub fn cluster(s: &Settings) -> Result<ClusterSummary> {
    let (source, stage) = match s.cluster_on {
        ClusterOn::Coefficients => (out_path(s, COEFFICIENTS), "fit"),
        ClusterOn::Features => (out_path(s, FEATURES), "fit"),
    };
    require(&source, stage)?;
    let vectors = match s.cluster_on {
        ClusterOn::Coefficients => tables::read_coefficients(&source)?,
        ClusterOn::Features => tables::read_features(&source)?,
    };
    let n = vectors.len();
    if n == 0 {
        return Err(CliError::Contract("no countries to cluster".into()));
    }
    if s.clusters > n {
        return Err(CliError::Contract(format!("cannot form {} clusters from {n} countries", s.clusters)));
    }
    let dist = pairwise_distances(&vectors)?;
    let dendrogram = if n == 1 {
        Dendrogram { leaf_labels: dist.labels.clone(), merges: Vec::new(), linkage: s.linkage }
    } else {
        agglomerate(&dist, s.linkage)?
    };
    let assignment = cut(&dendrogram, s.clusters)?;

    tables::write_distances(&out_path(s, DISTANCES), &dist)?;
    tables::write_clusters(&out_path(s, CLUSTERS), &assignment)?;
    write_json(
        &out_path(s, DENDROGRAM_JSON),
        &DendrogramFile {
            linkage: s.linkage.name().to_string(),
            leaves: dendrogram.leaf_labels.clone(),
            merges: dendrogram
                .merges
                .iter()
                .map(|m| MergeRecord { a: m.a, b: m.b, distance: m.distance, size: m.size })
                .collect(),
        },
    )?;
    write_text(&out_path(s, DENDROGRAM_SVG), &svg::dendrogram(&dendrogram, &assignment))?;
    write_charts(s, &assignment)?;

    let summary = ClusterSummary {
        k: s.clusters,
        linkage: s.linkage.name().to_string(),
        cluster_on: s.describe()["cluster-on"].clone(),
        countries: n,
        sizes: assignment.clusters().iter().map(Vec::len).collect(),
        assignment: assignment.labels.iter().cloned().zip(assignment.ids.iter().copied()).collect(),
    };
    write_json(&out_path(s, CLUSTER_SUMMARY), &summary)?;
    Ok(summary)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(CliError::io(path))
}

/// One bar chart per clustered country, when the weekly counts are available.
fn write_charts(s: &Settings, assignment: &ClusterAssignment) -> Result<()> {
    let series_path = out_path(s, SERIES);
    if !series_path.exists() {
        return Ok(());
    }
    let dir = out_path(s, CHARTS);
    ensure_dir(&dir)?;
    let series: BTreeMap<String, CountrySeries> =
        tables::read_series(&series_path)?.into_iter().map(|c| (c.country.clone(), c)).collect();
    for label in &assignment.labels {
        if let Some(c) = series.get(label) {
            write_text(&dir.join(format!("{}.svg", chart_name(label))), &svg::weekly_bars(c))?;
        }
    }
    Ok(())
}

/// File-name-safe form of a country code.
pub fn chart_name(country: &str) -> String {
    country.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Combines whichever stage summaries exist into `report.json`.
pub fn report(s: &Settings) -> Result<RunReport> {
    let report = RunReport {
        settings: s.describe().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        ingest: read_optional(&out_path(s, INGEST_SUMMARY))?,
        fit: read_optional(&out_path(s, FIT_SUMMARY))?,
        cluster: read_optional(&out_path(s, CLUSTER_SUMMARY))?,
    };
    if report.ingest.is_none() && report.fit.is_none() && report.cluster.is_none() {
        return Err(CliError::Contract(format!("no stage outputs in {}", s.out.display())));
    }
    ensure_dir(&s.out)?;
    write_json(&out_path(s, REPORT), &report)?;
    Ok(report)
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sentitrend::records::Format;
use sentitrend::report::{DendrogramFile, FitSummary, IngestSummary, RunReport};
use sentitrend::synth::{self, SynthOptions};
use sentitrend::tables;
use sentitrend_core::cluster::adjusted_rand_index;
use tempfile::TempDir;

fn sentitrend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sentitrend")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = sentitrend(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn line(id: u32, ts: &str, country: &str, label: &str, rt: bool) -> String {
    format!(r#"{{"id":"{id}","timestamp":"{ts}","country":"{country}","label":"{label}","is_retweet":{rt}}}"#)
}

/// 12 labeled posts over two countries with known weekly counts:
/// US pos (2,0,1,0) neg (0,1,0,1); DE pos (1,0,0,0) neg (0,2,0,1), plus
/// one US neutral post and one US post after the window.
fn twelve_posts(dir: &Path) -> PathBuf {
    let rows = [
        line(1, "2022-03-01T08:00:00Z", "US", "positive", false),
        line(2, "2022-03-07T23:59:59Z", "US", "positive", false),
        line(3, "2022-03-08T00:00:00Z", "US", "negative", false),
        line(4, "2022-03-15T12:00:00Z", "US", "positive", false),
        line(5, "2022-03-28T12:00:00Z", "US", "negative", false),
        line(6, "2022-03-02T12:00:00Z", "US", "neutral", false),
        line(7, "2022-03-30T12:00:00Z", "US", "positive", false),
        line(8, "2022-03-03T12:00:00+01:00", "DE", "positive", false),
        line(9, "2022-03-09T12:00:00Z", "DE", "negative", false),
        line(10, "2022-03-10T12:00:00Z", "DE", "negative", false),
        line(11, "2022-03-27T12:00:00Z", "DE", "negative", false),
        line(12, "2022-03-27T13:00:00Z", "DE", "negative", true),
    ];
    let path = dir.join("posts.jsonl");
    std::fs::write(&path, rows.join("\n") + "\n").unwrap();
    path
}

fn synthetic(dir: &Path, format: Format) -> (PathBuf, BTreeMap<String, usize>) {
    let data = synth::generate(&SynthOptions::default());
    let path = dir.join(match format {
        Format::Csv => "posts.csv",
        Format::JsonLines => "posts.jsonl",
    });
    synth::write_records(&path, &data.records, format).unwrap();
    (path, data.groups)
}

#[test]
fn ingest_counts_two_countries() {
    let tmp = TempDir::new().unwrap();
    let input = twelve_posts(tmp.path());
    let out = tmp.path().join("out");
    ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    let series = std::fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(
        series,
        "country,week,pos,neg\n\
         DE,1,1,0\nDE,2,0,2\nDE,3,0,0\nDE,4,0,1\n\
         US,1,2,0\nUS,2,0,1\nUS,3,1,0\nUS,4,0,1\n"
    );
    let summary: IngestSummary = sentitrend::report::read_json(&out.join("ingest.json")).unwrap();
    assert_eq!((summary.parsed, summary.retweets, summary.filtered), (12, 1, 11));
    assert_eq!((summary.counted, summary.neutral, summary.out_of_window), (9, 1, 1));
}

#[test]
fn empty_input_gives_empty_series() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("empty.jsonl");
    std::fs::write(&input, "").unwrap();
    let out = tmp.path().join("out");
    let run = ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    assert!(String::from_utf8_lossy(&run.stderr).contains("warning"));
    assert_eq!(std::fs::read_to_string(out.join("series.csv")).unwrap(), "country,week,pos,neg\n");
}

#[test]
fn unknown_only_input_is_all_filtered() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("unknown.jsonl");
    let rows: Vec<String> =
        (1..=5).map(|i| line(i, "2022-03-02T00:00:00Z", "UNKNOWN", "negative", false)).collect();
    std::fs::write(&input, rows.join("\n")).unwrap();
    let out = tmp.path().join("out");
    ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    assert_eq!(std::fs::read_to_string(out.join("series.csv")).unwrap(), "country,week,pos,neg\n");
    let summary: IngestSummary = sentitrend::report::read_json(&out.join("ingest.json")).unwrap();
    assert_eq!((summary.unknown_country, summary.filtered), (5, 0));
}

#[test]
fn csv_and_jsonl_inputs_agree() {
    let tmp = TempDir::new().unwrap();
    let (jsonl, _) = synthetic(tmp.path(), Format::JsonLines);
    let (csv, _) = synthetic(tmp.path(), Format::Csv);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["ingest", "-i", p(&jsonl), "-o", p(&a)]);
    ok(&["ingest", "-i", p(&csv), "-o", p(&b)]);
    assert_eq!(std::fs::read(a.join("series.csv")).unwrap(), std::fs::read(b.join("series.csv")).unwrap());
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let code = |args: &[&str]| sentitrend(args).status.code().unwrap();

    assert_eq!(code(&["ingest", "-o", p(&out)]), 2, "no input");
    assert_eq!(code(&["ingest", "-i", "missing.jsonl", "-o", p(&out)]), 3);
    let garbage = tmp.path().join("garbage.jsonl");
    std::fs::write(&garbage, "hello\nworld\n").unwrap();
    assert_eq!(code(&["ingest", "-i", p(&garbage), "-o", p(&out)]), 4);
    assert_eq!(code(&["fit", "-o", p(&tmp.path().join("nothing-here"))]), 5);

    let input = twelve_posts(tmp.path());
    assert_eq!(code(&["run", "-i", p(&input), "-o", p(&out), "--c", "-1"]), 2);
    ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    ok(&["fit", "-o", p(&out), "--min-tweets", "1"]);
    let k_too_big = sentitrend(&["cluster", "-o", p(&out), "--clusters", "3"]);
    assert_eq!(k_too_big.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&k_too_big.stderr).contains("cannot form 3 clusters from 2 countries"));
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let (input, _) = synthetic(tmp.path(), Format::JsonLines);
    let out = tmp.path().join("out");
    let config = tmp.path().join("run.conf");
    std::fs::write(
        &config,
        format!("# test config\ninput = {}\nout = {}\nclusters = 2\nlinkage = single\n", p(&input), p(&out)),
    )
    .unwrap();
    ok(&["run", "--config", p(&config), "--clusters", "4"]);
    let report: RunReport = sentitrend::report::read_json(&out.join("report.json")).unwrap();
    assert_eq!(report.settings["clusters"], "4");
    assert_eq!(report.settings["linkage"], "single");
    assert_eq!(report.cluster.unwrap().sizes.len(), 4);

    std::fs::write(&config, "clusters = many\n").unwrap();
    assert_eq!(sentitrend(&["run", "--config", p(&config)]).status.code(), Some(2));
}

#[test]
fn fit_writes_one_row_per_country_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let (input, _) = synthetic(tmp.path(), Format::JsonLines);
    let out = tmp.path().join("out");
    ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    ok(&["fit", "-o", p(&out)]);
    let first = std::fs::read(out.join("coefficients.csv")).unwrap();
    let coefficients = tables::read_coefficients(&out.join("coefficients.csv")).unwrap();
    assert_eq!(coefficients.len(), 34);
    assert!(coefficients.values().all(|v| v.len() == 8));
    ok(&["fit", "-o", p(&out)]);
    assert_eq!(first, std::fs::read(out.join("coefficients.csv")).unwrap());
}

#[test]
fn single_country_fits_and_clusters() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("one.jsonl");
    let rows: Vec<String> = (1..=60)
        .map(|i| {
            let day = 1 + (i * 7) % 28;
            let label = if i % 3 == 0 { "positive" } else { "negative" };
            line(i, &format!("2022-03-{day:02}T10:00:00Z"), "UA", label, false)
        })
        .collect();
    std::fs::write(&input, rows.join("\n")).unwrap();
    let out = tmp.path().join("out");
    ok(&["run", "-i", p(&input), "-o", p(&out), "--clusters", "1"]);
    assert_eq!(tables::read_coefficients(&out.join("coefficients.csv")).unwrap().len(), 1);
    assert_eq!(std::fs::read_to_string(out.join("clusters.csv")).unwrap(), "country,cluster\nUA,1\n");
}

#[test]
fn cluster_counts_and_planted_groups() {
    let tmp = TempDir::new().unwrap();
    let (input, groups) = synthetic(tmp.path(), Format::JsonLines);
    let out = tmp.path().join("out");
    ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    ok(&["fit", "-o", p(&out)]);
    let read = |k: &str| {
        ok(&["cluster", "-o", p(&out), "--clusters", k]);
        tables::read_clusters(&out.join("clusters.csv")).unwrap()
    };
    assert!(read("1").values().all(|&c| c == 1));
    let five = read("5");
    for id in 1..=5 {
        assert!(five.values().any(|&c| c == id), "cluster {id} empty");
    }
    let three = read("3");
    let truth: Vec<usize> = three.keys().map(|c| groups[c]).collect();
    let found: Vec<usize> = three.values().copied().collect();
    assert_eq!(adjusted_rand_index(&truth, &found), 1.0);
}

#[test]
fn stage_outputs_round_trip() {
    let tmp = TempDir::new().unwrap();
    let (input, _) = synthetic(tmp.path(), Format::JsonLines);
    let out = tmp.path().join("out");
    ok(&["run", "-i", p(&input), "-o", p(&out), "--cluster-on", "features"]);

    let series = tables::read_series(&out.join("series.csv")).unwrap();
    let copy = tmp.path().join("series-copy.csv");
    tables::write_series(&copy, &series).unwrap();
    assert_eq!(std::fs::read(&copy).unwrap(), std::fs::read(out.join("series.csv")).unwrap());

    let features = tables::read_features(&out.join("features.csv")).unwrap();
    assert_eq!(features.len(), 34);
    for v in features.values() {
        assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    let fit: FitSummary = sentitrend::report::read_json(&out.join("fit.json")).unwrap();
    assert_eq!(fit.fitted.len(), 34);
    assert!(fit.failed.is_empty());

    let dendrogram: DendrogramFile = sentitrend::report::read_json(&out.join("dendrogram.json")).unwrap();
    assert_eq!(dendrogram.leaves.len(), 34);
    assert_eq!(dendrogram.merges.len(), 33);
    let svg = std::fs::read_to_string(out.join("dendrogram.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="merge""#).count(), 33);

    let distances = std::fs::read_to_string(out.join("distances.csv")).unwrap();
    assert_eq!(distances.lines().count(), 35);
    assert_eq!(distances.lines().next().unwrap().split(',').count(), 35);

    let clusters = tables::read_clusters(&out.join("clusters.csv")).unwrap();
    let report: RunReport = sentitrend::report::read_json(&out.join("report.json")).unwrap();
    assert_eq!(report.cluster.unwrap().assignment, clusters.into_iter().collect());
    let ingest = report.ingest.unwrap();
    assert_eq!(ingest.counted + ingest.neutral + ingest.out_of_window, ingest.filtered);

    let chart = std::fs::read_to_string(out.join("charts").join("US.svg")).unwrap();
    assert!(chart.contains("Frequency of positive and negative tweets"));
    let us = series.iter().find(|s| s.country == "US").unwrap();
    for (w, count) in us.neg_counts.iter().enumerate() {
        assert!(chart.contains(&format!(r#"class="bar neg" data-week="{}" data-count="{count}""#, w + 1)));
    }
}

#[test]
fn report_subcommand_merges_stage_summaries() {
    let tmp = TempDir::new().unwrap();
    let input = twelve_posts(tmp.path());
    let out = tmp.path().join("out");
    assert_eq!(sentitrend(&["report", "-o", p(&out)]).status.code(), Some(5));
    ok(&["ingest", "-i", p(&input), "-o", p(&out)]);
    ok(&["report", "-o", p(&out)]);
    let report: RunReport = sentitrend::report::read_json(&out.join("report.json")).unwrap();
    assert!(report.ingest.is_some() && report.fit.is_none() && report.cluster.is_none());
}

//! CSV files exchanged between stages. Floats use the shortest text that
//! parses back to the same value, so every stage re-reads exactly what the
//! previous one computed.

use std::collections::BTreeMap;
use std::path::Path;

use sentitrend_core::cluster::{ClusterAssignment, DistanceMatrix};
use sentitrend_core::ingest::CountrySeries;
use sentitrend_core::smooth::CountryFit;

use crate::error::{CliError, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::Reader::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        other => CliError::Schema(format!("{}: {other:?}", path.display())),
    }
}

fn schema(path: &Path, what: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("{}: {what}", path.display()))
}

fn field<T: std::str::FromStr>(path: &Path, row: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = row.get(i).ok_or_else(|| schema(path, format!("row {row:?} is too short")))?;
    raw.parse().map_err(|_| schema(path, format!("cannot parse {raw:?}")))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(CliError::io(path))
}

/// `country,week,pos,neg`, weeks numbered from 1.
pub fn write_series(path: &Path, series: &[CountrySeries]) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| csv_error(path, e);
    w.write_record(["country", "week", "pos", "neg"]).map_err(err)?;
    for s in series {
        for (week, (pos, neg)) in s.pos_counts.iter().zip(&s.neg_counts).enumerate() {
            w.write_record([s.country.clone(), (week + 1).to_string(), pos.to_string(), neg.to_string()])
                .map_err(err)?;
        }
    }
    finish(w, path)
}

pub fn read_series(path: &Path) -> Result<Vec<CountrySeries>> {
    let mut r = reader(path)?;
    let mut by_country: BTreeMap<String, Vec<(usize, u64, u64)>> = BTreeMap::new();
    for row in r.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let country: String = field(path, &row, 0)?;
        by_country.entry(country).or_default().push((field(path, &row, 1)?, field(path, &row, 2)?, field(path, &row, 3)?));
    }
    let mut weeks = None;
    let mut out = Vec::with_capacity(by_country.len());
    for (country, mut rows) in by_country {
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(i, r)| r.0 != i + 1) {
            return Err(schema(path, format!("{country}: weeks must run 1..=n without gaps")));
        }
        if *weeks.get_or_insert(rows.len()) != rows.len() {
            return Err(schema(path, format!("{country}: week count differs from other countries")));
        }
        out.push(CountrySeries::new(country, rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.2).collect()));
    }
    Ok(out)
}

/// `country,pos_1..pos_w,neg_1..neg_w`.
pub fn write_features(path: &Path, series: &[CountrySeries]) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| csv_error(path, e);
    let weeks = series.first().map_or(0, CountrySeries::week_count);
    let mut header = vec!["country".to_string()];
    header.extend((1..=weeks).map(|i| format!("pos_{i}")));
    header.extend((1..=weeks).map(|i| format!("neg_{i}")));
    w.write_record(&header).map_err(err)?;
    for s in series {
        let mut row = vec![s.country.clone()];
        row.extend(s.features.iter().map(f64::to_string));
        w.write_record(&row).map_err(err)?;
    }
    finish(w, path)
}

/// `country,w_1..w_m,w0,h,loss`; `h` is empty for the linear kernel.
pub fn write_coefficients(path: &Path, fits: &[CountryFit]) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| csv_error(path, e);
    let m = fits.first().map_or(0, |f| f.model.weights.len());
    let mut header = vec!["country".to_string()];
    header.extend((1..=m).map(|i| format!("w_{i}")));
    header.extend(["w0", "h", "loss"].map(String::from));
    w.write_record(&header).map_err(err)?;
    for f in fits {
        let mut row = vec![f.country.clone()];
        row.extend(f.model.coefficient_vector().iter().map(f64::to_string));
        row.push(f.model.kernel.bandwidth().map_or(String::new(), |h| h.to_string()));
        row.push(f.model.loss.name().to_string());
        w.write_record(&row).map_err(err)?;
    }
    finish(w, path)
}

/// Reads the numeric columns of a per-country table. `trailing` columns at
/// the end of each row are not part of the vector.
fn read_vectors(path: &Path, trailing: usize) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut r = reader(path)?;
    let width = r.headers().map_err(|e| csv_error(path, e))?.len();
    if width < 2 + trailing {
        return Err(schema(path, "no value columns"));
    }
    let mut out = BTreeMap::new();
    for row in r.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        if row.len() != width {
            return Err(schema(path, format!("row {row:?} has {} fields, expected {width}", row.len())));
        }
        let values = (1..width - trailing).map(|i| field(path, &row, i)).collect::<Result<Vec<f64>>>()?;
        if out.insert(row[0].to_string(), values).is_some() {
            return Err(schema(path, format!("duplicate country {}", &row[0])));
        }
    }
    Ok(out)
}

/// Coefficient vectors `(w_1..w_m, w0)` by country.
pub fn read_coefficients(path: &Path) -> Result<BTreeMap<String, Vec<f64>>> {
    read_vectors(path, 2)
}

pub fn read_features(path: &Path) -> Result<BTreeMap<String, Vec<f64>>> {
    read_vectors(path, 0)
}

pub fn write_distances(path: &Path, d: &DistanceMatrix) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| csv_error(path, e);
    let mut header = vec!["country".to_string()];
    header.extend(d.labels.iter().cloned());
    w.write_record(&header).map_err(err)?;
    for (i, label) in d.labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend((0..d.len()).map(|j| d.get(i, j).to_string()));
        w.write_record(&row).map_err(err)?;
    }
    finish(w, path)
}

pub fn write_clusters(path: &Path, a: &ClusterAssignment) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| csv_error(path, e);
    w.write_record(["country", "cluster"]).map_err(err)?;
    for (label, id) in a.labels.iter().zip(&a.ids) {
        w.write_record([label.clone(), id.to_string()]).map_err(err)?;
    }
    finish(w, path)
}

pub fn read_clusters(path: &Path) -> Result<BTreeMap<String, usize>> {
    let mut r = reader(path)?;
    let mut out = BTreeMap::new();
    for row in r.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        out.insert(field(path, &row, 0)?, field(path, &row, 1)?);
    }
    Ok(out)
}

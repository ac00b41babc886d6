//! Run settings: defaults, overridden by a `key = value` file, overridden by
//! command-line flags. Both layers go through [`Settings::set`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveTime};
use sentitrend_core::cluster::Linkage;
use sentitrend_core::ingest::{
    AggregationWindow, Normalization, DEFAULT_MIN_TWEETS, DEFAULT_WEEK_COUNT, DEFAULT_WEEK_LENGTH_DAYS,
};
use sentitrend_core::loss::{LossSpec, DEFAULT_EPSILON, DEFAULT_HUBER_K, DEFAULT_QUANTILE_Q};
use sentitrend_core::smooth::{FitConfig, KernelMode, SmoothParams, DEFAULT_C, DEFAULT_LAG};

use crate::error::{CliError, Result};

pub const DEFAULT_CLUSTERS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    LeastSquares,
    Huber,
    Quantile,
    Eps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Linear,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterOn {
    Coefficients,
    Features,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub start: NaiveDate,
    pub weeks: usize,
    pub week_days: u32,
    pub normalize: Normalization,
    pub min_tweets: u64,
    pub lag: usize,
    pub loss: LossKind,
    pub huber_k: f64,
    pub quantile_q: f64,
    pub epsilon: f64,
    pub c: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub kernel: KernelKind,
    /// `None` selects the bandwidth by leave-one-out.
    pub bandwidth: Option<f64>,
    pub bandwidth_grid: Option<Vec<f64>>,
    pub clusters: usize,
    pub linkage: Linkage,
    pub cluster_on: ClusterOn,
}

impl Default for Settings {
    fn default() -> Self {
        let smooth = SmoothParams::default();
        Self {
            inputs: Vec::new(),
            out: PathBuf::from("out"),
            start: NaiveDate::from_ymd_opt(2022, 3, 1).expect("valid date"),
            weeks: DEFAULT_WEEK_COUNT,
            week_days: DEFAULT_WEEK_LENGTH_DAYS,
            normalize: Normalization::RelativeFrequency,
            min_tweets: DEFAULT_MIN_TWEETS,
            lag: DEFAULT_LAG,
            loss: LossKind::LeastSquares,
            huber_k: DEFAULT_HUBER_K,
            quantile_q: DEFAULT_QUANTILE_Q,
            epsilon: DEFAULT_EPSILON,
            c: DEFAULT_C,
            tol: smooth.tol,
            max_sweeps: smooth.max_sweeps,
            kernel: KernelKind::Gaussian,
            bandwidth: None,
            bandwidth_grid: None,
            clusters: DEFAULT_CLUSTERS,
            linkage: Linkage::Average,
            cluster_on: ClusterOn::Coefficients,
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key} = {value:?}: {why}"))
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad(key, value, e))
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = number(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, value, "must be a positive number"))
    }
}

impl Settings {
    /// Applies one setting given as text; on error the settings are unchanged.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut next = self.clone();
        next.assign(key, value.trim())?;
        *self = next;
        Ok(())
    }

    fn assign(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "input" => {
                self.inputs = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(PathBuf::from).collect()
            }
            "out" => self.out = PathBuf::from(value),
            "start" => {
                self.start = NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|e| bad(key, value, e))?
            }
            "weeks" => {
                self.weeks = number(key, value)?;
                if self.weeks == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
            }
            "week-days" => {
                self.week_days = number(key, value)?;
                if self.week_days == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
            }
            "normalize" => {
                self.normalize = match value {
                    "relfreq" => Normalization::RelativeFrequency,
                    "minmax" => Normalization::MinMax,
                    _ => return Err(bad(key, value, "expected relfreq or minmax")),
                }
            }
            "min-tweets" => self.min_tweets = number(key, value)?,
            "lag" => {
                self.lag = number(key, value)?;
                if self.lag == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
            }
            "loss" => {
                self.loss = match value {
                    "ls" => LossKind::LeastSquares,
                    "huber" => LossKind::Huber,
                    "quantile" => LossKind::Quantile,
                    "eps" => LossKind::Eps,
                    _ => return Err(bad(key, value, "expected ls, huber, quantile or eps")),
                }
            }
            "huber-k" => self.huber_k = positive(key, value)?,
            "quantile-q" => {
                self.quantile_q = number(key, value)?;
                if !(0.0..=1.0).contains(&self.quantile_q) {
                    return Err(bad(key, value, "must lie in [0, 1]"));
                }
            }
            "epsilon" => {
                self.epsilon = number(key, value)?;
                if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
                    return Err(bad(key, value, "must be non-negative"));
                }
            }
            "c" => self.c = positive(key, value)?,
            "tol" => self.tol = positive(key, value)?,
            "max-sweeps" => self.max_sweeps = number(key, value)?,
            "kernel" => {
                self.kernel = match value {
                    "linear" => KernelKind::Linear,
                    "gaussian" => KernelKind::Gaussian,
                    _ => return Err(bad(key, value, "expected linear or gaussian")),
                }
            }
            "bandwidth" => self.bandwidth = if value == "auto" { None } else { Some(positive(key, value)?) },
            "bandwidth-grid" => {
                let grid = value.split(',').map(|v| positive(key, v.trim())).collect::<Result<Vec<f64>>>()?;
                if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad(key, value, "must be a strictly increasing list"));
                }
                self.bandwidth_grid = Some(grid);
            }
            "clusters" => {
                self.clusters = number(key, value)?;
                if self.clusters == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
            }
            "linkage" => {
                self.linkage = match value {
                    "average" => Linkage::Average,
                    "single" => Linkage::Single,
                    "complete" => Linkage::Complete,
                    _ => return Err(bad(key, value, "expected average, single or complete")),
                }
            }
            "cluster-on" => {
                self.cluster_on = match value {
                    "coefficients" => ClusterOn::Coefficients,
                    "features" => ClusterOn::Features,
                    _ => return Err(bad(key, value, "expected coefficients or features")),
                }
            }
            _ => return Err(CliError::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("{}:{}: expected key = value", path.display(), n + 1)));
            };
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        }
        Ok(())
    }

    pub fn loss_spec(&self) -> LossSpec {
        match self.loss {
            LossKind::LeastSquares => LossSpec::LeastSquares,
            LossKind::Huber => LossSpec::Huber { k: self.huber_k },
            LossKind::Quantile => LossSpec::Quantile { q: self.quantile_q },
            LossKind::Eps => LossSpec::EpsInsensitive { eps: self.epsilon },
        }
    }

    pub fn fit_config(&self) -> FitConfig {
        let kernel = match (self.kernel, self.bandwidth) {
            (KernelKind::Linear, _) => KernelMode::Linear,
            (KernelKind::Gaussian, Some(h)) => KernelMode::Fixed(h),
            (KernelKind::Gaussian, None) => KernelMode::Auto(self.bandwidth_grid.clone()),
        };
        FitConfig {
            lag: self.lag,
            loss: self.loss_spec(),
            kernel,
            params: SmoothParams { c: self.c, tol: self.tol, max_sweeps: self.max_sweeps },
        }
    }

    pub fn window(&self) -> AggregationWindow {
        let start = self.start.and_time(NaiveTime::MIN).and_utc().timestamp();
        AggregationWindow { start, week_count: self.weeks, week_length_days: self.week_days }
    }

    /// Model and clustering parameters as text, for the run report. Paths
    /// are left out so reports do not depend on where a run was written.
    pub fn describe(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("start", self.start.format("%Y-%m-%d").to_string());
        m.insert("weeks", self.weeks.to_string());
        m.insert("week-days", self.week_days.to_string());
        m.insert(
            "normalize",
            match self.normalize {
                Normalization::RelativeFrequency => "relfreq",
                Normalization::MinMax => "minmax",
            }
            .to_string(),
        );
        m.insert("min-tweets", self.min_tweets.to_string());
        m.insert("lag", self.lag.to_string());
        m.insert("loss", self.loss_spec().name().to_string());
        match self.loss_spec() {
            LossSpec::Huber { k } => m.insert("huber-k", k.to_string()),
            LossSpec::Quantile { q } => m.insert("quantile-q", q.to_string()),
            LossSpec::EpsInsensitive { eps } => m.insert("epsilon", eps.to_string()),
            LossSpec::LeastSquares => None,
        };
        m.insert("c", self.c.to_string());
        m.insert("tol", self.tol.to_string());
        m.insert("max-sweeps", self.max_sweeps.to_string());
        m.insert(
            "kernel",
            match self.kernel {
                KernelKind::Linear => "linear",
                KernelKind::Gaussian => "gaussian",
            }
            .to_string(),
        );
        if self.kernel == KernelKind::Gaussian {
            m.insert("bandwidth", self.bandwidth.map_or("auto".to_string(), |h| h.to_string()));
            if let (None, Some(grid)) = (self.bandwidth, &self.bandwidth_grid) {
                m.insert("bandwidth-grid", grid.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
            }
        }
        m.insert("clusters", self.clusters.to_string());
        m.insert("linkage", self.linkage.name().to_string());
        m.insert(
            "cluster-on",
            match self.cluster_on {
                ClusterOn::Coefficients => "coefficients",
                ClusterOn::Features => "features",
            }
            .to_string(),
        );
        m
    }
}

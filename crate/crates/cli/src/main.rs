use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sentitrend::config::Settings;
use sentitrend::records::Format;
use sentitrend::{pipeline, synth, CliError, Result};

/// Weekly sentiment series per country, kernel trend models and clusters.
#[derive(Parser)]
#[command(name = "sentitrend", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse labeled records and write weekly counts (series.csv).
    Ingest(StageArgs),
    /// Normalize series and fit one trend model per country (coefficients.csv).
    Fit(StageArgs),
    /// Cluster countries and draw the dendrogram and bar charts.
    Cluster(StageArgs),
    /// ingest, fit and cluster, then write report.json.
    Run(StageArgs),
    /// Combine stage summaries into report.json.
    Report(StageArgs),
    /// Write a synthetic labeled fixture with three planted country groups.
    Synth(SynthArgs),
}

#[derive(Args)]
struct StageArgs {
    /// key = value settings file; flags take precedence over it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Labeled record files (.jsonl or .csv)
    #[arg(long, short, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Output directory
    #[arg(long, short)]
    out: Option<String>,
    /// First day of week 1 (YYYY-MM-DD)
    #[arg(long)]
    start: Option<String>,
    /// Number of weeks in the window (default 4)
    #[arg(long)]
    weeks: Option<String>,
    /// Days per week (default 7)
    #[arg(long)]
    week_days: Option<String>,
    /// Feature normalization (default relfreq)
    #[arg(long, value_parser = ["relfreq", "minmax"])]
    normalize: Option<String>,
    /// Countries with fewer counted records are not fitted (default 50)
    #[arg(long)]
    min_tweets: Option<String>,
    /// Autoregressive lag p (default 1)
    #[arg(long)]
    lag: Option<String>,
    /// Loss for the smooth model (default ls)
    #[arg(long, value_parser = ["ls", "huber", "quantile", "eps"])]
    loss: Option<String>,
    /// Huber threshold (default 1.345)
    #[arg(long)]
    huber_k: Option<String>,
    /// Quantile level in [0, 1] (default 0.5)
    #[arg(long)]
    quantile_q: Option<String>,
    /// Width of the eps-insensitive tube (default 0.01)
    #[arg(long)]
    epsilon: Option<String>,
    /// Regularization constant (default 10)
    #[arg(long)]
    c: Option<String>,
    /// Solver tolerance (default 1e-10)
    #[arg(long)]
    tol: Option<String>,
    /// Solver sweep limit (default 50000)
    #[arg(long)]
    max_sweeps: Option<String>,
    /// Kernel (default gaussian)
    #[arg(long, value_parser = ["linear", "gaussian"])]
    kernel: Option<String>,
    /// `auto` or a positive bandwidth
    #[arg(long)]
    bandwidth: Option<String>,
    /// Comma-separated, strictly increasing bandwidths for `auto`
    #[arg(long)]
    bandwidth_grid: Option<String>,
    /// Number of clusters K (default 5)
    #[arg(long)]
    clusters: Option<String>,
    /// Linkage criterion (default average)
    #[arg(long, value_parser = ["average", "single", "complete"])]
    linkage: Option<String>,
    /// Vectors to cluster (default coefficients)
    #[arg(long, value_parser = ["coefficients", "features"])]
    cluster_on: Option<String>,
}

impl StageArgs {
    fn settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        if !self.input.is_empty() {
            let joined: Vec<String> = self.input.iter().map(|p| p.display().to_string()).collect();
            s.set("input", &joined.join(","))?;
        }
        let flags = [
            ("out", &self.out),
            ("start", &self.start),
            ("weeks", &self.weeks),
            ("week-days", &self.week_days),
            ("normalize", &self.normalize),
            ("min-tweets", &self.min_tweets),
            ("lag", &self.lag),
            ("loss", &self.loss),
            ("huber-k", &self.huber_k),
            ("quantile-q", &self.quantile_q),
            ("epsilon", &self.epsilon),
            ("c", &self.c),
            ("tol", &self.tol),
            ("max-sweeps", &self.max_sweeps),
            ("kernel", &self.kernel),
            ("bandwidth", &self.bandwidth),
            ("bandwidth-grid", &self.bandwidth_grid),
            ("clusters", &self.clusters),
            ("linkage", &self.linkage),
            ("cluster-on", &self.cluster_on),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        Ok(s)
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Output record file; `.csv` writes CSV, anything else JSON lines
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Relative jitter of each weekly count around its group profile
    #[arg(long, default_value_t = 0.01)]
    jitter: f64,
    /// Also write the planted `country,group` table here
    #[arg(long)]
    groups: Option<PathBuf>,
}

fn timed<T>(stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f()?;
    println!("{stage}: done in {:.1} ms", t.elapsed().as_secs_f64() * 1e3);
    Ok(out)
}

fn ingest(s: &Settings) -> Result<()> {
    let r = timed("ingest", || pipeline::ingest(s))?;
    println!(
        "  parsed {} (malformed {}, duplicates {}), filtered {} (retweets {}, unknown country {})",
        r.parsed, r.malformed, r.duplicates, r.filtered, r.retweets, r.unknown_country
    );
    println!(
        "  counted {} + neutral {} + out of window {} = {}; {} countries",
        r.counted,
        r.neutral,
        r.out_of_window,
        r.counted + r.neutral + r.out_of_window,
        r.country_totals.len()
    );
    Ok(())
}

fn fit(s: &Settings) -> Result<()> {
    let r = timed("fit", || pipeline::fit(s))?;
    println!(
        "  {} countries: {} fitted, {} below {} tweets, {} failed",
        r.countries,
        r.fitted.len(),
        r.below_min_tweets.len(),
        s.min_tweets,
        r.failed.len()
    );
    Ok(())
}

fn cluster(s: &Settings) -> Result<()> {
    let r = timed("cluster", || pipeline::cluster(s))?;
    println!("  {} countries into {} clusters ({} linkage), sizes {:?}", r.countries, r.k, r.linkage, r.sizes);
    Ok(())
}

fn report(s: &Settings) -> Result<()> {
    timed("report", || pipeline::report(s))?;
    println!("  wrote {}", s.out.join(pipeline::REPORT).display());
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    if !(0.0..1.0).contains(&args.jitter) {
        return Err(CliError::Config(format!("jitter must lie in [0, 1), got {}", args.jitter)));
    }
    let data = synth::generate(&synth::SynthOptions { seed: args.seed, jitter: args.jitter, ..Default::default() });
    synth::write_records(&args.out, &data.records, Format::from_path(&args.out))?;
    if let Some(path) = &args.groups {
        synth::write_groups(path, &data.groups)?;
    }
    println!("wrote {} records for {} countries to {}", data.records.len(), data.groups.len(), args.out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => ingest(&a.settings()?),
        Command::Fit(a) => fit(&a.settings()?),
        Command::Cluster(a) => cluster(&a.settings()?),
        Command::Report(a) => report(&a.settings()?),
        Command::Run(a) => {
            let s = a.settings()?;
            ingest(&s)?;
            fit(&s)?;
            cluster(&s)?;
            report(&s)
        }
        Command::Synth(a) => synth(&a),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

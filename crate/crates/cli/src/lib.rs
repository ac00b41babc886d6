//! File formats, configuration and stage drivers for the `sentitrend`
//! command-line pipeline. The numerical work lives in `sentitrend-core`.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod records;
pub mod report;
pub mod svg;
pub mod synth;
pub mod tables;

pub use error::{CliError, Result};

//! Numerical core for modelling weekly sentiment trends per country.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It covers:
//!
//! * [`ingest`]: record filtering, weekly aggregation and feature normalization,
//! * [`loss`]: least-squares, Huber, quantile and ε-insensitive losses,
//! * [`kernel`]: linear and Gaussian kernels and Gram matrices,
//! * [`svr`]: the ε-insensitive support vector regression dual, solved by SMO,
//! * [`smooth`]: the kernel-expansion model fitted under a pluggable loss, with
//!   leave-one-out bandwidth selection,
//! * [`cluster`]: Euclidean distances, agglomerative clustering and dendrogram cuts.
//!
//! File formats, parsing and the command line live in the `sentitrend` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cluster;
mod error;
pub mod ingest;
pub mod kernel;
pub mod loss;
mod math;
mod qp;
pub mod smooth;
pub mod svr;

pub use error::Error;
pub use math::Matrix;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

//! Slow, independent reference implementations for tests.
//!
//! Nothing here calls into `sentitrend-core`; every routine works from the
//! textbook definition of the quantity it computes.

// Matrix routines read more clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod linalg;
pub mod linkage;
pub mod qp;
pub mod random;

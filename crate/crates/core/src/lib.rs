//! Client-perspective XVA toolkit.
//!
//! Prices CVA and FVA on an interest-rate swap under vanilla, Reset and
//! Mandatory Break (or Restructuring) strategies, runs credit/vol scenario
//! grids and break-even analysis, and measures historical CDS shocks and
//! their recovery.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cdsanalytics;
pub mod config;
pub mod curves;
pub mod error;
pub mod exposure;
pub mod report;
pub mod strategies;
pub mod xva;

pub use error::{Error, Result};

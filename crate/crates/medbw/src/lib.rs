//! Experiment harness and command-line front end for `medbw-core`.
//!
//! [`montecarlo`] runs the seeded simulation studies, [`figures`] builds
//! the result tables behind each subcommand, and [`output`] writes them as
//! CSV or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod montecarlo;
pub mod output;
pub mod stats;

pub use error::{LabError, Result};
pub use medbw_core;

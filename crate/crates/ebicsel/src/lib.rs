//! Data ingestion, run configuration, parallel experiment drivers and the
//! `ebicsel` command-line interface built on `ebicsel-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod runner;
pub mod tables;

pub use error::{AppError, AppResult};

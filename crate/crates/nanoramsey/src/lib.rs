//! File formats, the grid oracle and the command line around `nanoramsey-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod sweep;

pub use config::RunConfig;
pub use error::{AppError, Result};

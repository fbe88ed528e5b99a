//! File formats, reports and the `sasv-fuse` command-line workflow on top
//! of `sasv-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod model_io;
pub mod report;
pub mod score_io;

pub use error::{Error, Result};

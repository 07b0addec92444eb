//! Command-line front end for the stereo engine: file formats, config
//! parsing, dataset discovery, timing, and report writers. The binary in
//! `main.rs` wires these into the `depth` tool.

pub mod config;
pub mod dataset;
pub mod error;
pub mod formats;
pub mod report;
pub mod timing;

pub use error::{CliError, Result};

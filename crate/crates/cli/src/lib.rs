//! Command-line front end for `hallbounds-core`: JSON jobs in, JSON
//! reports or SVG diagrams out.

pub mod commands;
pub mod error;
pub mod job;
pub mod json;
pub mod svg;

pub use commands::{run, Output, Settings};
pub use error::{CliError, CliResult};
pub use job::Command;

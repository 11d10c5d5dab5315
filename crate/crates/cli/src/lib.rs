//! Scenario configuration, execution and reporting for `blowup-core`.
//!
//! Four entry points mirror the command-line verbs: [`pipeline::run`],
//! [`pipeline::certify`], [`polar::run_polar`] and [`suite::run_suite`].
//! Each returns a report that is also written to disk as JSON plus CSV
//! tables; see `docs/schema.md` for the frozen field list.

pub mod checks;
pub mod config;
pub mod error;
pub mod expr;
pub mod output;
pub mod pipeline;
pub mod polar;
pub mod report;
pub mod suite;

pub use error::{CliError, Status};

/// Version of the JSON and CSV layout.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

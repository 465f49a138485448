//! Verification suites, run configuration, reports and exports.

pub mod config;
pub mod export;
pub mod report;
pub mod suites;

pub use config::{RunConfig, SUITES};
pub use report::{Check, Report, SCHEMA_VERSION};
pub use suites::{run_suite, SuiteOutput};

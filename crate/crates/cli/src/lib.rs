//! Property-suite runner for the `finsler` crate: configs, checks, reports.

pub mod checks;
pub mod config;
pub mod objects;
pub mod report;

pub use checks::{applicable_checks, run_check, run_suite, CHECKS, REPORT_EXAMPLES};
pub use config::{parse_config, ConfigError, DiffMethodName, RunConfig};
pub use report::{to_json, CheckReport, Report};

//! Verification suites for the deformed Fock space model, with JSON config and report handling.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, GridSpec, SuiteConfig, ALL_SUITES};
pub use report::{emit_report, CheckRecord, Relation, SuiteReport, SCHEMA};
pub use suites::{run_suite, DETECTION_THRESHOLD};

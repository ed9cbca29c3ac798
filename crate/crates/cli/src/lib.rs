//! File formats, instance generators and verification suites behind the
//! `ckgframe` command.

pub mod checks;
pub mod error;
pub mod generate;
pub mod instance;
pub mod json;
pub mod report;
pub mod suite;

pub use checks::{run_check, run_checks, CheckResult};
pub use error::{CliError, Result};
pub use generate::{generate_instance, PROFILES};
pub use instance::{CheckKind, CheckSpec, Instance, InstanceFile};
pub use report::{CheckReport, SuiteRun};
pub use suite::{run_suite, SuiteReport, SUITES};

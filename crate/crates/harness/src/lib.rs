//! Instance files, generators, the experiment runner and its CSV report.

pub mod format;
pub mod generate;
pub mod instance_file;
pub mod suite;

pub use generate::{generate, CostModel, Family, GenSpec};
pub use instance_file::{canonicalize, parse_instance, FormatError, InstanceFile, OracleSpec};
pub use suite::{run_suite, AlgorithmKind, SuiteConfig, SuiteReport};

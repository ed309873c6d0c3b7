//! Library surface of the `phl` harness binary: experiment configuration,
//! execution, and report serialization, exposed so integration tests can
//! drive experiments in-process.

pub mod config;
pub mod corpus;
pub mod experiment;
pub mod report;

pub use config::{ExperimentConfig, InequalityId, RhsKind};
pub use experiment::{run_default, run_experiment};
pub use report::{ExperimentReport, RatioRow, Summary};

//! Instance generation, experiment runs, metrics and reports.

pub mod corpus;
pub mod experiment;
pub mod generator;
pub mod report;

use thiserror::Error;

use crate::matcher::MatcherError;
use crate::oracle::OracleError;

pub use corpus::{run_corpus, CorpusConfig, CorpusSummary};
pub use experiment::{run_experiment, run_instance, Aggregate, Algorithm, ExperimentConfig, OrderPlan, RunReport};
pub use generator::{generate, GeneratorSpec, GraphKind, Instance, WeightDist};
pub use report::{emit_aggregates, emit_report, read_json_reports, ReportFormat};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Matcher(#[from] MatcherError),
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

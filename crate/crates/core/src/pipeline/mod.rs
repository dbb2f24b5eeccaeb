//! Batching, aggregation, comparison and benchmark orchestration.

pub mod batch;
pub mod bench;
pub mod compare;
pub mod fit;
pub mod progression;

pub use batch::{
    aggregate_receipts, batch_seed, plan_batches, prove_all, prove_batch, AggregateOutcome, Batch, BatchError,
    BatchPlan, BatchProof, DEFAULT_BATCH_SIZE,
};
pub use bench::{run_bench, write_timing_csv, BenchConfig, BenchReport, TimingRow};
pub use compare::{compare_models, median, write_accuracy_csv, AccuracyRow, CompareReport, SeedOutcome};
pub use fit::{fit_line, fit_log, LineFit};
pub use progression::{progression_report, write_progression_csv, ProgressRow};

use crate::attest::RejectReason;
use crate::dataio::DataError;
use crate::fixedq::ArithError;
use crate::regression::RegressionError;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid batch plan")]
    InvalidPlan,
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Batch(Box<BatchError>),
    #[error("{0}")]
    Rejected(RejectReason),
}

impl From<ArithError> for PipelineError {
    fn from(e: ArithError) -> Self {
        PipelineError::Regression(e.into())
    }
}

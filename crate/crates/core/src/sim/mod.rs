//! Virtual transmission line: hourly condition/failure streams and interval
//! estimator convergence studies.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`. Every hour draws
//! exactly two uniforms, the first selecting the operating condition and the
//! second deciding failure, so streams are reproducible across platforms.

mod compare;
mod config;
mod simulator;
mod study;

use thiserror::Error;

use crate::estimate::EstimateError;

pub use compare::{compare_traces, CompareReport, EstimatorSummary, WidthPoint};
pub use config::{Checkpoints, ConditionModel, EstimatorSpec, SimulationConfig};
pub use simulator::{HourSample, Simulator};
pub use study::{
    run_convergence_study, run_replications, ConvergenceTrace, TraceRow, TRACE_HEADER,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("trace line {line}: {message}")]
    Trace { line: u64, message: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

pub type Result<T> = std::result::Result<T, SimError>;

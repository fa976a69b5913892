//! Overhead-line failure model: record classification, failure counting,
//! network assembly and scenario evaluation.

pub mod fixtures;
mod model;
mod records;
mod tables;

use thiserror::Error;

use crate::credal::CredalError;
use crate::estimate::EstimateError;

pub use model::{
    build_cfr_network, estimate_h2_rows, evaluate_scenario, evaluate_scenario_with,
    with_prior_failure_rate, CfrNetworkSpec, EstimationMode, HealthyRows, PriorWeights, Scenario,
    CONDITION_VARIABLES,
};
pub use records::{
    classify_record, read_records, write_records, ConditionStateVector, LightningState, LineState,
    LoadingState, OperatingRecord, RainState, SnowState, TemperatureState, WindState,
    MAX_LOADING_RATE, RECORD_HEADER,
};
pub use tables::{count_contingencies, ContextTables, FailureCounts, TableContext};

#[derive(Debug, Error)]
pub enum CfrError {
    #[error("{field} = {value} is {reason}")]
    InvalidReading {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("records line {line}: {message}")]
    Record { line: u64, message: String },
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Credal(#[from] CredalError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

pub type Result<T> = std::result::Result<T, CfrError>;

//! Categorical DAGs with interval-valued CPTs and exact min/max inference
//! over their extreme points.

mod infer;
mod network;
mod vertices;

use thiserror::Error;

use crate::estimate::EstimateError;

pub use infer::{
    bayes_infer, credal_infer, credal_infer_soft, credal_infer_soft_with, credal_infer_with,
    Evidence, InferenceOptions, Query, DEFAULT_MAX_COMBINATIONS,
};
pub use network::{
    CategoricalVariable, CptDocument, CredalNetwork, IntervalCpt, NetworkBuilder, NetworkDocument,
    RowDocument, VariableDocument,
};
pub use vertices::{enumerate_extreme_mass_functions, ExtremeMassFunction, VERTEX_TOLERANCE};

#[derive(Debug, Error)]
pub enum CredalError {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("empty credal set for `{variable}` row {row}: lower bounds sum to {lower_sum}, upper bounds to {upper_sum}")]
    EmptyCredalSet {
        variable: String,
        row: usize,
        lower_sum: f64,
        upper_sum: f64,
    },
    #[error("unknown variable `{name}` (known: {})", valid.join(", "))]
    UnknownVariable { name: String, valid: Vec<String> },
    #[error("unknown state `{state}` for `{variable}` (valid: {})", valid.join(", "))]
    UnknownState {
        variable: String,
        state: String,
        valid: Vec<String>,
    },
    #[error("evidence on the query variable `{0}`")]
    EvidenceOnQuery(String),
    #[error("`{0}` has both hard and soft evidence")]
    ConflictingEvidence(String),
    #[error("soft evidence on `{variable}`: {reason}")]
    InvalidSoftWeights { variable: String, reason: String },
    #[error("soft evidence needs the mixture entry point")]
    SoftEvidenceUnsupported,
    #[error("CPT of `{0}` is not precise")]
    NotPrecise(String),
    #[error("evidence has zero probability under every admissible distribution")]
    InconsistentEvidence,
    #[error("{required} extreme-point combinations exceed the cap of {cap}; narrow the intervals, observe more variables, or raise the cap")]
    BudgetExceeded { required: u64, cap: u64 },
    #[error("network document: {0}")]
    Document(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

pub type Result<T> = std::result::Result<T, CredalError>;

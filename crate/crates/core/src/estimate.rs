//! Point and interval estimators for multinomial parameters and hourly
//! failure rates.
//!
//! The imprecise Dirichlet model (IDM) turns `n_m` observations of outcome `m`
//! out of `n` into the interval `[n_m/(n+s), (n_m+s)/(n+s)]`. The deterministic
//! Dirichlet posterior mean, the IDM credible interval and two classical
//! contrast estimators (normal approximation, Poisson/chi-square) live here
//! too. Outcome indices are zero-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{self, KernelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("invalid probability interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("a multinomial needs at least two outcomes, got {0}")]
    TooFewOutcomes(usize),

    #[error("counts have {counts} outcomes but the prior has {prior}")]
    DimensionMismatch { counts: usize, prior: usize },

    #[error("outcome index {index} out of range for {outcomes} outcomes")]
    IndexOutOfRange { index: usize, outcomes: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("estimate undefined: no observations and zero prior weight")]
    Undefined,

    #[error("estimator not applicable: {0}")]
    Inapplicable(String),

    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type Result<T> = std::result::Result<T, EstimateError>;

/// A closed subinterval of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct ProbabilityInterval {
    lower: f64,
    upper: f64,
}

impl ProbabilityInterval {
    /// The vacuous interval `[0, 1]`.
    pub const VACUOUS: Self = Self {
        lower: 0.0,
        upper: 1.0,
    };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_finite() && upper.is_finite() && 0.0 <= lower && lower <= upper && upper <= 1.0
        {
            Ok(Self { lower, upper })
        } else {
            Err(EstimateError::InvalidInterval { lower, upper })
        }
    }

    pub fn point(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }

    /// `true` if `p` lies within the interval widened by `tol` on each side.
    pub fn contains_approx(&self, p: f64, tol: f64) -> bool {
        self.lower - tol <= p && p <= self.upper + tol
    }

    /// Interval of the complementary event: `[1 - upper, 1 - lower]`.
    pub fn complement(&self) -> Self {
        Self {
            lower: 1.0 - self.upper,
            upper: 1.0 - self.lower,
        }
    }

    /// Bounds rounded half away from zero for display.
    pub fn rounded(&self, decimals: i32) -> (f64, f64) {
        (
            round_half_away(self.lower, decimals),
            round_half_away(self.upper, decimals),
        )
    }
}

impl TryFrom<[f64; 2]> for ProbabilityInterval {
    type Error = EstimateError;

    fn try_from([lower, upper]: [f64; 2]) -> Result<Self> {
        Self::new(lower, upper)
    }
}

impl From<ProbabilityInterval> for [f64; 2] {
    fn from(p: ProbabilityInterval) -> Self {
        [p.lower, p.upper]
    }
}

impl std::fmt::Display for ProbabilityInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// Rounds half away from zero to `decimals` places (presentation only).
pub fn round_half_away(x: f64, decimals: i32) -> f64 {
    let scale = 10_f64.powi(decimals);
    (x * scale).round() / scale
}

/// Observed counts `n_m` for each of `M >= 2` outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct MultinomialCounts(Vec<u64>);

impl MultinomialCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(EstimateError::TooFewOutcomes(counts.len()));
        }
        Ok(Self(counts))
    }

    /// All-zero counts over `outcomes` outcomes.
    pub fn zeros(outcomes: usize) -> Result<Self> {
        Self::new(vec![0; outcomes])
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn outcomes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn get(&self, m: usize) -> Result<u64> {
        self.0
            .get(m)
            .copied()
            .ok_or(EstimateError::IndexOutOfRange {
                index: m,
                outcomes: self.0.len(),
            })
    }

    pub(crate) fn increment(&mut self, m: usize) {
        self.0[m] += 1;
    }
}

impl TryFrom<Vec<u64>> for MultinomialCounts {
    type Error = EstimateError;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MultinomialCounts> for Vec<u64> {
    fn from(c: MultinomialCounts) -> Self {
        c.0
    }
}

/// Prior weights `a_m` of a deterministic Dirichlet model. Zero weights are
/// accepted; `s` is their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DirichletWeights(Vec<f64>);

impl DirichletWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(EstimateError::TooFewOutcomes(weights.len()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(EstimateError::InvalidParameter(format!(
                "prior weight {w} is not a finite nonnegative number"
            )));
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Equivalent sample size `s = sum(a_m)`.
    pub fn sample_size(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for DirichletWeights {
    type Error = EstimateError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DirichletWeights> for Vec<f64> {
    fn from(w: DirichletWeights) -> Self {
        w.0
    }
}

/// IDM equivalent sample size `s > 0`. Defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SampleSize(f64);

impl SampleSize {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 {
            Ok(Self(s))
        } else {
            Err(EstimateError::InvalidParameter(format!(
                "equivalent sample size must be finite and > 0, got {s}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for SampleSize {
    fn default() -> Self {
        Self(1.0)
    }
}

impl TryFrom<f64> for SampleSize {
    type Error = EstimateError;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<SampleSize> for f64 {
    fn from(s: SampleSize) -> Self {
        s.0
    }
}

/// Prior of a Dirichlet-multinomial estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirichletPrior {
    /// A single Dirichlet prior with explicit weights.
    Deterministic { weights: DirichletWeights },
    /// The IDM prior set: every weight vector `s * r` with `r` on the simplex.
    Imprecise { s: SampleSize },
}

/// Posterior mean `(n_m + a_m) / (n + s)` for every outcome.
pub fn dirichlet_posterior_mean(
    counts: &MultinomialCounts,
    weights: &DirichletWeights,
) -> Result<Vec<f64>> {
    if counts.outcomes() != weights.0.len() {
        return Err(EstimateError::DimensionMismatch {
            counts: counts.outcomes(),
            prior: weights.0.len(),
        });
    }
    let denom = counts.total() as f64 + weights.sample_size();
    if denom <= 0.0 {
        return Err(EstimateError::Undefined);
    }
    Ok(counts
        .counts()
        .iter()
        .zip(&weights.0)
        .map(|(&n, &a)| (n as f64 + a) / denom)
        .collect())
}

/// IDM interval `[n_m/(n+s), (n_m+s)/(n+s)]` for outcome `m`.
pub fn idm_interval(
    counts: &MultinomialCounts,
    s: SampleSize,
    m: usize,
) -> Result<ProbabilityInterval> {
    let n_m = counts.get(m)? as f64;
    let denom = counts.total() as f64 + s.0;
    ProbabilityInterval::new(n_m / denom, (n_m + s.0) / denom)
}

/// IDM intervals for all outcomes.
pub fn idm_intervals(
    counts: &MultinomialCounts,
    s: SampleSize,
) -> Result<Vec<ProbabilityInterval>> {
    (0..counts.outcomes())
        .map(|m| idm_interval(counts, s, m))
        .collect()
}

/// IDM credible interval at credibility `gamma`.
///
/// The lower end is the `(1-gamma)/2` quantile of `Beta(n_m, s+n-n_m)` and the
/// upper end the `(1+gamma)/2` quantile of `Beta(s+n_m, n-n_m)`. When `n_m = 0`
/// the lower end is 0 and when `n_m = n` the upper end is 1; these are the
/// point-mass limits of the degenerate Betas, so `n = 0` yields `[0, 1]`.
pub fn idm_credible_interval(
    counts: &MultinomialCounts,
    s: SampleSize,
    m: usize,
    gamma: f64,
) -> Result<ProbabilityInterval> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EstimateError::InvalidParameter(format!(
            "credibility must lie in (0, 1), got {gamma}"
        )));
    }
    let n_m = counts.get(m)? as f64;
    let n = counts.total() as f64;
    let s = s.0;
    let lower = if n_m == 0.0 {
        0.0
    } else {
        numeric::beta_quantile(n_m, s + n - n_m, 0.5 * (1.0 - gamma))?
    };
    let upper = if n_m == n {
        1.0
    } else {
        numeric::beta_quantile(s + n_m, n - n_m, 0.5 * (1.0 + gamma))?
    };
    ProbabilityInterval::new(lower, upper)
}

/// Failure count over an exposure window of whole hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateObservation {
    failures: u64,
    exposure_hours: u64,
}

impl RateObservation {
    pub fn new(failures: u64, exposure_hours: u64) -> Result<Self> {
        if exposure_hours == 0 {
            return Err(EstimateError::InvalidParameter(
                "exposure must be at least one hour".into(),
            ));
        }
        if failures > exposure_hours {
            return Err(EstimateError::InvalidParameter(format!(
                "{failures} failures exceed {exposure_hours} exposure hours"
            )));
        }
        Ok(Self {
            failures,
            exposure_hours,
        })
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    pub fn exposure_hours(&self) -> u64 {
        self.exposure_hours
    }

    /// Maximum-likelihood hourly rate `n_f / T`.
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.exposure_hours as f64
    }

    /// The observation as two-outcome counts `[n_f, T - n_f]`.
    pub fn as_counts(&self) -> MultinomialCounts {
        MultinomialCounts(vec![self.failures, self.exposure_hours - self.failures])
    }
}

/// Interval whose bounds are not confined to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawInterval {
    pub lower: f64,
    pub upper: f64,
}

impl RawInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }

    pub fn exceeds_unit(&self) -> bool {
        self.lower < 0.0 || self.upper > 1.0
    }

    /// Clamps both bounds into `[0, 1]` for display.
    pub fn clamped(&self) -> ProbabilityInterval {
        let lower = self.lower.clamp(0.0, 1.0);
        let upper = self.upper.clamp(lower, 1.0);
        ProbabilityInterval { lower, upper }
    }
}

impl From<ProbabilityInterval> for RawInterval {
    fn from(p: ProbabilityInterval) -> Self {
        Self {
            lower: p.lower,
            upper: p.upper,
        }
    }
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(EstimateError::InvalidParameter(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )))
    }
}

/// Normal-approximation interval `p ± z * sqrt(p(1-p)/T)`, unclamped.
///
/// Fails with [`EstimateError::Inapplicable`] when the sample variance is zero
/// (no failures yet, or every hour failed).
pub fn clt_rate_interval(obs: &RateObservation, confidence: f64) -> Result<RawInterval> {
    check_confidence(confidence)?;
    if obs.failures == 0 || obs.failures == obs.exposure_hours {
        return Err(EstimateError::Inapplicable(format!(
            "zero sample variance with {} failures in {} hours",
            obs.failures, obs.exposure_hours
        )));
    }
    let p = obs.rate();
    let z = numeric::normal_quantile(0.5 * (1.0 + confidence))?;
    let half = z * (p * (1.0 - p) / obs.exposure_hours as f64).sqrt();
    Ok(RawInterval {
        lower: p - half,
        upper: p + half,
    })
}

/// Central Poisson interval for the hourly rate via chi-square quantiles,
/// unclamped (the upper bound can exceed 1 for short exposures).
pub fn chi_square_rate_interval(obs: &RateObservation, confidence: f64) -> Result<RawInterval> {
    check_confidence(confidence)?;
    let k = obs.failures as f64;
    let two_t = 2.0 * obs.exposure_hours as f64;
    let lower = if obs.failures == 0 {
        0.0
    } else {
        numeric::chi_square_quantile(2.0 * k, 0.5 * (1.0 - confidence))? / two_t
    };
    let upper = numeric::chi_square_quantile(2.0 * (k + 1.0), 0.5 * (1.0 + confidence))? / two_t;
    Ok(RawInterval { lower, upper })
}

use serde::{Deserialize, Serialize};

use super::{Result, SimError};
use crate::estimate::{
    chi_square_rate_interval, clt_rate_interval, idm_credible_interval, idm_interval,
    EstimateError, MultinomialCounts, RateObservation, SampleSize,
};

const OCCURRENCE_TOLERANCE: f64 = 1e-9;

/// One operating condition of the virtual line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionModel {
    pub label: String,
    /// Probability that a given hour is spent in this condition.
    pub occurrence: f64,
    /// Per-hour failure probability in this condition.
    pub failure_rate: f64,
}

/// Interval estimator applied to cumulative `(failures, exposure)` counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    Idm {
        #[serde(default)]
        s: SampleSize,
    },
    Credible {
        #[serde(default)]
        s: SampleSize,
        gamma: f64,
    },
    Clt {
        confidence: f64,
    },
    ChiSquare {
        confidence: f64,
    },
}

impl EstimatorSpec {
    /// The four estimators at their customary settings.
    pub fn standard_set() -> Vec<Self> {
        vec![
            Self::Idm {
                s: SampleSize::default(),
            },
            Self::Credible {
                s: SampleSize::default(),
                gamma: 0.95,
            },
            Self::Clt { confidence: 0.95 },
            Self::ChiSquare { confidence: 0.95 },
        ]
    }

    pub fn label(&self) -> String {
        match self {
            Self::Idm { s } => format!("idm:s={}", s.get()),
            Self::Credible { s, gamma } if s.get() == 1.0 => format!("credible:gamma={gamma}"),
            Self::Credible { s, gamma } => format!("credible:s={},gamma={gamma}", s.get()),
            Self::Clt { confidence } => format!("clt:conf={confidence}"),
            Self::ChiSquare { confidence } => format!("chi_square:conf={confidence}"),
        }
    }

    fn validate(&self) -> Result<()> {
        let level = match self {
            Self::Idm { .. } => return Ok(()),
            Self::Credible { gamma, .. } => *gamma,
            Self::Clt { confidence } | Self::ChiSquare { confidence } => *confidence,
        };
        if level > 0.0 && level < 1.0 {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!(
                "{} needs a level in (0, 1)",
                self.label()
            )))
        }
    }

    /// Raw `(lower, upper)` for the failure outcome; `None` when the
    /// estimator is inapplicable to these counts.
    pub fn interval(&self, failures: u64, exposure: u64) -> Result<Option<(f64, f64)>> {
        let counts = || MultinomialCounts::new(vec![failures, exposure - failures]);
        let rate = || RateObservation::new(failures, exposure);
        let out = match self {
            Self::Idm { s } => {
                let iv = idm_interval(&counts()?, *s, 0)?;
                Some((iv.lower(), iv.upper()))
            }
            Self::Credible { s, gamma } => {
                let iv = idm_credible_interval(&counts()?, *s, 0, *gamma)?;
                Some((iv.lower(), iv.upper()))
            }
            Self::Clt { .. } | Self::ChiSquare { .. } if exposure == 0 => None,
            Self::Clt { confidence } => match clt_rate_interval(&rate()?, *confidence) {
                Ok(r) => Some((r.lower, r.upper)),
                Err(EstimateError::Inapplicable(_)) => None,
                Err(e) => return Err(e.into()),
            },
            Self::ChiSquare { confidence } => {
                let r = chi_square_rate_interval(&rate()?, *confidence)?;
                Some((r.lower, r.upper))
            }
        };
        Ok(out)
    }
}

/// Hours at which cumulative intervals are emitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Checkpoints {
    Hours(Vec<u64>),
    Every { every: u64 },
}

impl Checkpoints {
    pub fn resolve(&self, horizon: u64) -> Result<Vec<u64>> {
        match self {
            Self::Every { every: 0 } => Err(SimError::InvalidConfig(
                "checkpoint interval must be positive".into(),
            )),
            Self::Every { every } => Ok((1..=horizon / every).map(|k| k * every).collect()),
            Self::Hours(hours) => {
                if hours.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(SimError::InvalidConfig(
                        "checkpoints must be strictly increasing".into(),
                    ));
                }
                if let Some(&last) = hours.last() {
                    if last > horizon {
                        return Err(SimError::InvalidConfig(format!(
                            "checkpoint {last} is beyond the horizon {horizon}"
                        )));
                    }
                }
                Ok(hours.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    #[serde(default)]
    pub description: String,
    pub horizon_hours: u64,
    pub conditions: Vec<ConditionModel>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "EstimatorSpec::standard_set")]
    pub estimators: Vec<EstimatorSpec>,
    pub checkpoints: Checkpoints,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_hours == 0 {
            return Err(SimError::InvalidConfig(
                "horizon must be at least one hour".into(),
            ));
        }
        if self.conditions.is_empty() {
            return Err(SimError::InvalidConfig("no operating conditions".into()));
        }
        let mut total = 0.0;
        for c in &self.conditions {
            if !(0.0..=1.0).contains(&c.occurrence) {
                return Err(SimError::InvalidConfig(format!(
                    "occurrence of `{}` is {}, outside [0, 1]",
                    c.label, c.occurrence
                )));
            }
            if !(0.0..=1.0).contains(&c.failure_rate) {
                return Err(SimError::InvalidConfig(format!(
                    "failure rate of `{}` is {}, outside [0, 1]",
                    c.label, c.failure_rate
                )));
            }
            total += c.occurrence;
        }
        if (total - 1.0).abs() > OCCURRENCE_TOLERANCE {
            return Err(SimError::InvalidConfig(format!(
                "occurrence probabilities sum to {total}, not 1"
            )));
        }
        let mut labels: Vec<&str> = self.conditions.iter().map(|c| c.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(SimError::InvalidConfig("duplicate condition label".into()));
        }
        if self.estimators.is_empty() {
            return Err(SimError::InvalidConfig("no estimators selected".into()));
        }
        for e in &self.estimators {
            e.validate()?;
        }
        self.checkpoints.resolve(self.horizon_hours)?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimulationConfig;
use super::simulator::Simulator;
use super::{Result, SimError};

pub const TRACE_HEADER: [&str; 9] = [
    "seed",
    "hour",
    "condition",
    "estimator",
    "lower",
    "upper",
    "true_rate",
    "failures",
    "exposure",
];

/// One estimator interval for one condition at one checkpoint.
///
/// `lower`/`upper` are `None` when the estimator is inapplicable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub seed: u64,
    pub hour: u64,
    pub condition: String,
    pub estimator: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub true_rate: f64,
    pub failures: u64,
    pub exposure: u64,
}

impl TraceRow {
    pub fn width(&self) -> Option<f64> {
        Some(self.upper? - self.lower?)
    }

    pub fn covers_truth(&self) -> bool {
        matches!((self.lower, self.upper), (Some(l), Some(u)) if l <= self.true_rate && self.true_rate <= u)
    }

    pub fn outside_unit(&self) -> bool {
        self.lower.is_some_and(|l| l < 0.0) || self.upper.is_some_and(|u| u > 1.0)
    }
}

/// Long-format convergence trace: rows ordered by seed, checkpoint,
/// condition, estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
}

/// Feeds cumulative per-condition counts to every estimator at each
/// checkpoint of a single seeded run.
pub fn run_convergence_study(config: &SimulationConfig) -> Result<ConvergenceTrace> {
    config.validate()?;
    let checkpoints = config.checkpoints.resolve(config.horizon_hours)?;
    let k = config.conditions.len();
    let mut failures = vec![0u64; k];
    let mut exposure = vec![0u64; k];
    let mut rows = Vec::with_capacity(checkpoints.len() * k * config.estimators.len());
    let mut pending = checkpoints.iter().copied().peekable();

    let mut emit = |hour: u64, failures: &[u64], exposure: &[u64]| -> Result<()> {
        for (c, cond) in config.conditions.iter().enumerate() {
            for est in &config.estimators {
                let iv = est.interval(failures[c], exposure[c])?;
                rows.push(TraceRow {
                    seed: config.seed,
                    hour,
                    condition: cond.label.clone(),
                    estimator: est.label(),
                    lower: iv.map(|v| v.0),
                    upper: iv.map(|v| v.1),
                    true_rate: cond.failure_rate,
                    failures: failures[c],
                    exposure: exposure[c],
                });
            }
        }
        Ok(())
    };

    while pending.next_if_eq(&0).is_some() {
        emit(0, &failures, &exposure)?;
    }
    let last = checkpoints.last().copied().unwrap_or(0);
    for sample in Simulator::new(config).take_while(|h| h.hour <= last) {
        exposure[sample.condition] += 1;
        failures[sample.condition] += u64::from(sample.failed);
        while pending.next_if_eq(&sample.hour).is_some() {
            emit(sample.hour, &failures, &exposure)?;
        }
    }
    Ok(ConvergenceTrace { rows })
}

/// Runs seeds `config.seed .. config.seed + replications` in parallel and
/// concatenates their traces in seed order.
pub fn run_replications(config: &SimulationConfig, replications: u64) -> Result<ConvergenceTrace> {
    config.validate()?;
    if replications == 0 {
        return Err(SimError::InvalidConfig("at least one replication".into()));
    }
    let traces = (0..replications)
        .into_par_iter()
        .map(|i| run_convergence_study(&config.with_seed(config.seed.wrapping_add(i))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTrace {
        rows: traces.into_iter().flat_map(|t| t.rows).collect(),
    })
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ConvergenceTrace {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| SimError::Io(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACE_HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.seed.to_string(),
                r.hour.to_string(),
                r.condition.clone(),
                r.estimator.clone(),
                r.lower.map(fmt_float).unwrap_or_default(),
                r.upper.map(fmt_float).unwrap_or_default(),
                fmt_float(r.true_rate),
                r.failures.to_string(),
                r.exposure.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| SimError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| SimError::Io(e.to_string()))
    }

    /// Parses the CSV form; errors carry the 1-based file line.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let header = csv.headers().map_err(|e| SimError::Trace {
            line: 1,
            message: e.to_string(),
        })?;
        if header.iter().ne(TRACE_HEADER) {
            return Err(SimError::Trace {
                line: 1,
                message: format!("expected header `{}`", TRACE_HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in csv.records().enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| SimError::Trace {
                line,
                message: e.to_string(),
            })?;
            let bad = |field: &str| SimError::Trace {
                line,
                message: format!("cannot parse `{field}`"),
            };
            let int = |j: usize, name: &str| rec[j].parse::<u64>().map_err(|_| bad(name));
            let opt = |j: usize, name: &str| -> Result<Option<f64>> {
                if rec[j].is_empty() {
                    Ok(None)
                } else {
                    rec[j].parse::<f64>().map(Some).map_err(|_| bad(name))
                }
            };
            let row = TraceRow {
                seed: int(0, "seed")?,
                hour: int(1, "hour")?,
                condition: rec[2].to_string(),
                estimator: rec[3].to_string(),
                lower: opt(4, "lower")?,
                upper: opt(5, "upper")?,
                true_rate: rec[6].parse().map_err(|_| bad("true_rate"))?,
                failures: int(7, "failures")?,
                exposure: int(8, "exposure")?,
            };
            if row.lower.is_some() != row.upper.is_some() {
                return Err(SimError::Trace {
                    line,
                    message: "lower and upper must both be present or both empty".into(),
                });
            }
            if row.failures > row.exposure {
                return Err(SimError::Trace {
                    line,
                    message: "failures exceed exposure".into(),
                });
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

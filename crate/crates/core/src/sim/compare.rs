use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::study::{ConvergenceTrace, TraceRow};

/// Aggregate over runs at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthPoint {
    pub hour: u64,
    /// Mean over runs where the estimator applies; `None` if it never does.
    pub mean_width: Option<f64>,
    pub applicable_runs: u64,
    /// Fraction of all runs whose interval contains the true rate.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub condition: String,
    pub estimator: String,
    pub runs: u64,
    pub checkpoints: Vec<WidthPoint>,
    /// Coverage at the last checkpoint.
    pub final_coverage: f64,
    /// Rows with a bound below 0 or above 1.
    pub bounds_outside_unit: u64,
    /// Earliest checkpoint at which any run is applicable.
    pub first_applicable_hour: Option<u64>,
    /// Checkpoint from which every run has been applicable at least once.
    pub applicable_in_all_runs_from: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub summaries: Vec<EstimatorSummary>,
}

impl CompareReport {
    pub fn get(&self, condition: &str, estimator: &str) -> Option<&EstimatorSummary> {
        self.summaries
            .iter()
            .find(|s| s.condition == condition && s.estimator == estimator)
    }

    /// Plain-text table, one block per condition/estimator.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for s in &self.summaries {
            out += &format!(
                "{} / {}: runs={} final_coverage={:.3} outside_[0,1]={} first_applicable={} all_runs_from={}\n",
                s.condition,
                s.estimator,
                s.runs,
                s.final_coverage,
                s.bounds_outside_unit,
                s.first_applicable_hour.map_or("never".into(), |h| h.to_string()),
                s.applicable_in_all_runs_from.map_or("never".into(), |h| h.to_string()),
            );
            for p in &s.checkpoints {
                out += &format!(
                    "  hour {:>8}  mean_width {:>14}  applicable {:>5}  coverage {:.3}\n",
                    p.hour,
                    p.mean_width.map_or("-".into(), |w| format!("{w:.6e}")),
                    p.applicable_runs,
                    p.coverage
                );
            }
        }
        out
    }
}

/// Summarizes a (possibly multi-seed) trace per condition and estimator.
pub fn compare_traces(trace: &ConvergenceTrace) -> CompareReport {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: HashMap<(String, String), Vec<&TraceRow>> = HashMap::new();
    for r in &trace.rows {
        let key = (r.condition.clone(), r.estimator.clone());
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }

    let summaries = order
        .into_iter()
        .map(|key| {
            let rows = &groups[&key];
            let mut by_hour: BTreeMap<u64, Vec<&TraceRow>> = BTreeMap::new();
            let mut first_by_seed: BTreeMap<u64, Option<u64>> = BTreeMap::new();
            for r in rows {
                by_hour.entry(r.hour).or_default().push(r);
                let first = first_by_seed.entry(r.seed).or_insert(None);
                if r.lower.is_some() {
                    *first = Some(first.map_or(r.hour, |h| h.min(r.hour)));
                }
            }
            let runs = first_by_seed.len() as u64;
            let checkpoints: Vec<WidthPoint> = by_hour
                .iter()
                .map(|(&hour, rs)| {
                    let widths: Vec<f64> = rs.iter().filter_map(|r| r.width()).collect();
                    WidthPoint {
                        hour,
                        mean_width: (!widths.is_empty())
                            .then(|| widths.iter().sum::<f64>() / widths.len() as f64),
                        applicable_runs: widths.len() as u64,
                        coverage: rs.iter().filter(|r| r.covers_truth()).count() as f64
                            / rs.len() as f64,
                    }
                })
                .collect();
            let all_runs = first_by_seed
                .values()
                .try_fold(0u64, |acc, f| f.map(|h| acc.max(h)));
            EstimatorSummary {
                condition: key.0,
                estimator: key.1,
                runs,
                final_coverage: checkpoints.last().map_or(0.0, |p| p.coverage),
                checkpoints,
                bounds_outside_unit: rows.iter().filter(|r| r.outside_unit()).count() as u64,
                first_applicable_hour: first_by_seed.values().flatten().min().copied(),
                applicable_in_all_runs_from: all_runs,
            }
        })
        .collect();
    CompareReport { summaries }
}

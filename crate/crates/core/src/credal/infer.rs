use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::network::CredalNetwork;
use super::vertices::{enumerate_extreme_mass_functions, VERTEX_TOLERANCE};
use super::{CredalError, Result};
use crate::estimate::ProbabilityInterval;

/// Default cap on evaluated extreme-point combinations.
pub const DEFAULT_MAX_COMBINATIONS: u64 = 10_000_000;

/// Combinations below this count are evaluated on the calling thread.
const PARALLEL_THRESHOLD: u64 = 4096;

const SOFT_WEIGHT_TOLERANCE: f64 = 1e-9;

/// Hard and soft observations, keyed by variable and state labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(default)]
    pub hard: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub soft: BTreeMap<String, BTreeMap<String, f64>>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hard(mut self, variable: impl Into<String>, state: impl Into<String>) -> Self {
        self.hard.insert(variable.into(), state.into());
        self
    }

    pub fn soft<S: Into<String>>(
        mut self,
        variable: impl Into<String>,
        weights: impl IntoIterator<Item = (S, f64)>,
    ) -> Self {
        self.soft.insert(
            variable.into(),
            weights.into_iter().map(|(s, w)| (s.into(), w)).collect(),
        );
        self
    }

    pub fn is_hard_only(&self) -> bool {
        self.soft.is_empty()
    }

    fn validate(&self, net: &CredalNetwork, query: usize) -> Result<()> {
        for (var, state) in &self.hard {
            let (v, _) = net.resolve(var, state)?;
            if v == query {
                return Err(CredalError::EvidenceOnQuery(var.clone()));
            }
            if self.soft.contains_key(var) {
                return Err(CredalError::ConflictingEvidence(var.clone()));
            }
        }
        for (var, weights) in &self.soft {
            let v = net.index_of(var)?;
            if v == query {
                return Err(CredalError::EvidenceOnQuery(var.clone()));
            }
            let mut total = 0.0;
            for (state, &w) in weights {
                net.variable(v).state_index(state)?;
                if !(w.is_finite() && w >= 0.0) {
                    return Err(CredalError::InvalidSoftWeights {
                        variable: var.clone(),
                        reason: format!("weight {w} for `{state}` is negative or not finite"),
                    });
                }
                total += w;
            }
            if (total - 1.0).abs() > SOFT_WEIGHT_TOLERANCE {
                return Err(CredalError::InvalidSoftWeights {
                    variable: var.clone(),
                    reason: format!("weights sum to {total}"),
                });
            }
        }
        Ok(())
    }
}

/// Target of an inference call: `P(variable = state | evidence)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub variable: String,
    pub state: String,
}

impl Query {
    pub fn new(variable: impl Into<String>, state: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            state: state.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceOptions {
    pub max_combinations: u64,
    pub parallel: bool,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            max_combinations: DEFAULT_MAX_COMBINATIONS,
            parallel: true,
        }
    }
}

/// Exact `P(query | hard evidence)` in a network whose CPTs are all points.
pub fn bayes_infer(net: &CredalNetwork, query: &Query, evidence: &Evidence) -> Result<f64> {
    if let Some(cpt) = net.cpts().iter().find(|c| !c.is_point()) {
        return Err(CredalError::NotPrecise(
            net.variable(cpt.child()).name.clone(),
        ));
    }
    if !evidence.is_hard_only() {
        return Err(CredalError::SoftEvidenceUnsupported);
    }
    let iv = credal_infer_with(net, query, evidence, InferenceOptions::default())?;
    Ok(iv.lower())
}

/// Lower and upper `P(query | hard evidence)` over the strong extension.
pub fn credal_infer(
    net: &CredalNetwork,
    query: &Query,
    evidence: &Evidence,
) -> Result<ProbabilityInterval> {
    credal_infer_with(net, query, evidence, InferenceOptions::default())
}

pub fn credal_infer_with(
    net: &CredalNetwork,
    query: &Query,
    evidence: &Evidence,
    options: InferenceOptions,
) -> Result<ProbabilityInterval> {
    if !evidence.is_hard_only() {
        return Err(CredalError::SoftEvidenceUnsupported);
    }
    let (qv, qs) = net.resolve(&query.variable, &query.state)?;
    evidence.validate(net, qv)?;
    let mut observed = vec![None; net.variables().len()];
    for (var, state) in &evidence.hard {
        let (v, s) = net.resolve(var, state)?;
        observed[v] = Some(s);
    }
    let plan = Plan::new(net, qv, qs, &observed, options.max_combinations)?;
    plan.evaluate(options.parallel)
}

/// Hard+soft evidence: weighted mixture of the hard-evidence intervals over
/// every joint completion of the soft variables.
pub fn credal_infer_soft(
    net: &CredalNetwork,
    query: &Query,
    evidence: &Evidence,
) -> Result<ProbabilityInterval> {
    credal_infer_soft_with(net, query, evidence, InferenceOptions::default())
}

pub fn credal_infer_soft_with(
    net: &CredalNetwork,
    query: &Query,
    evidence: &Evidence,
    options: InferenceOptions,
) -> Result<ProbabilityInterval> {
    let (qv, _) = net.resolve(&query.variable, &query.state)?;
    evidence.validate(net, qv)?;
    let soft: Vec<(&String, Vec<(&String, f64)>)> = evidence
        .soft
        .iter()
        .map(|(v, ws)| {
            (
                v,
                ws.iter()
                    .map(|(s, &w)| (s, w))
                    .filter(|(_, w)| *w > 0.0)
                    .collect(),
            )
        })
        .collect();

    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut choice = vec![0usize; soft.len()];
    loop {
        let mut hard = Evidence {
            hard: evidence.hard.clone(),
            soft: BTreeMap::new(),
        };
        let mut weight = 1.0;
        for ((var, states), &c) in soft.iter().zip(&choice) {
            let (state, w) = states[c];
            hard.hard.insert((*var).clone(), state.clone());
            weight *= w;
        }
        let iv = credal_infer_with(net, query, &hard, options)?;
        lower += weight * iv.lower();
        upper += weight * iv.upper();

        // odometer over soft completions
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(ProbabilityInterval::new(
                    lower.clamp(0.0, 1.0),
                    upper.clamp(0.0, 1.0),
                )?);
            }
            choice[k] += 1;
            if choice[k] < soft[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Where a joint-assignment factor comes from.
#[derive(Debug, Clone, Copy)]
struct SlotFactor {
    slot: usize,
    state: usize,
}

/// One joint assignment of the relevant unobserved variables.
#[derive(Debug, Clone)]
struct Term {
    constant: f64,
    factors: Vec<SlotFactor>,
    matches_query: bool,
}

/// Candidate values of one CPT row that has several extreme points.
#[derive(Debug, Clone)]
enum Candidates {
    /// Full vertices, for rows whose child is summed out.
    Vectors(Vec<Vec<f64>>),
    /// Observed child: vertices projected on the observed coordinate.
    Projected(Vec<f64>),
}

impl Candidates {
    fn len(&self) -> usize {
        match self {
            Self::Vectors(v) => v.len(),
            Self::Projected(v) => v.len(),
        }
    }

    fn value(&self, choice: usize, state: usize) -> f64 {
        match self {
            Self::Vectors(v) => v[choice][state],
            Self::Projected(v) => v[choice],
        }
    }
}

struct Plan {
    slots: Vec<Candidates>,
    terms: Vec<Term>,
    combinations: u64,
}

impl Plan {
    fn new(
        net: &CredalNetwork,
        query: usize,
        query_state: usize,
        observed: &[Option<usize>],
        cap: u64,
    ) -> Result<Self> {
        let n = net.variables().len();

        // Barren-node pruning: only ancestors of the query and evidence matter.
        let mut relevant = vec![false; n];
        let mut stack: Vec<usize> = (0..n)
            .filter(|&v| v == query || observed[v].is_some())
            .collect();
        while let Some(v) = stack.pop() {
            if !relevant[v] {
                relevant[v] = true;
                stack.extend(net.cpt(v).parents().iter().copied());
            }
        }
        let order: Vec<usize> = net
            .topological_order()
            .iter()
            .copied()
            .filter(|&v| relevant[v])
            .collect();

        // Per relevant row: either a fixed vector or a slot index.
        #[derive(Clone)]
        enum RowSource {
            Unreachable,
            Fixed(Vec<f64>),
            Slot(usize),
        }
        let mut slots = Vec::new();
        let mut sources: Vec<Vec<RowSource>> = vec![Vec::new(); n];
        for &v in &order {
            let cpt = net.cpt(v);
            for (r, row) in cpt.rows().iter().enumerate() {
                let parents = net.parent_states(v, r);
                let reachable = cpt
                    .parents()
                    .iter()
                    .zip(&parents)
                    .all(|(&p, &s)| observed[p].is_none_or(|o| o == s));
                if !reachable {
                    sources[v].push(RowSource::Unreachable);
                    continue;
                }
                let vertices = enumerate_extreme_mass_functions(row).map_err(|e| match e {
                    CredalError::EmptyCredalSet {
                        lower_sum,
                        upper_sum,
                        ..
                    } => CredalError::EmptyCredalSet {
                        variable: net.variable(v).name.clone(),
                        row: r,
                        lower_sum,
                        upper_sum,
                    },
                    other => other,
                })?;
                let source = match observed[v] {
                    Some(s) => {
                        let mut values: Vec<f64> =
                            vertices.iter().map(|e| e.probabilities()[s]).collect();
                        values.sort_by(f64::total_cmp);
                        values.dedup_by(|a, b| (*a - *b).abs() <= VERTEX_TOLERANCE);
                        if values.len() == 1 {
                            let mut fixed = vec![0.0; net.variable(v).cardinality()];
                            fixed[s] = values[0];
                            RowSource::Fixed(fixed)
                        } else {
                            slots.push(Candidates::Projected(values));
                            RowSource::Slot(slots.len() - 1)
                        }
                    }
                    None if vertices.len() == 1 => {
                        RowSource::Fixed(vertices[0].probabilities().to_vec())
                    }
                    None => {
                        slots.push(Candidates::Vectors(
                            vertices.into_iter().map(|e| e.into_inner()).collect(),
                        ));
                        RowSource::Slot(slots.len() - 1)
                    }
                };
                sources[v].push(source);
            }
        }

        let combinations = slots
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
            .unwrap_or(u64::MAX);
        if combinations > cap {
            return Err(CredalError::BudgetExceeded {
                required: combinations,
                cap,
            });
        }

        // Enumerate joint assignments of relevant variables consistent with
        // the evidence.
        let mut terms = Vec::new();
        let mut state = vec![0usize; n];
        #[allow(clippy::too_many_arguments)]
        fn walk(
            depth: usize,
            order: &[usize],
            net: &CredalNetwork,
            observed: &[Option<usize>],
            sources: &[Vec<RowSource>],
            state: &mut Vec<usize>,
            constant: f64,
            factors: &mut Vec<SlotFactor>,
            query: (usize, usize),
            terms: &mut Vec<Term>,
        ) {
            if depth == order.len() {
                terms.push(Term {
                    constant,
                    factors: factors.clone(),
                    matches_query: state[query.0] == query.1,
                });
                return;
            }
            let v = order[depth];
            let parent_states: Vec<usize> =
                net.cpt(v).parents().iter().map(|&p| state[p]).collect();
            let r = net.row_index(v, &parent_states);
            let values: Vec<usize> = match observed[v] {
                Some(s) => vec![s],
                None => (0..net.variable(v).cardinality()).collect(),
            };
            for s in values {
                state[v] = s;
                match &sources[v][r] {
                    RowSource::Unreachable => unreachable!("row consistent with evidence"),
                    RowSource::Fixed(p) => {
                        let c = constant * p[s];
                        if c > 0.0 {
                            walk(
                                depth + 1,
                                order,
                                net,
                                observed,
                                sources,
                                state,
                                c,
                                factors,
                                query,
                                terms,
                            );
                        }
                    }
                    RowSource::Slot(slot) => {
                        factors.push(SlotFactor {
                            slot: *slot,
                            state: s,
                        });
                        walk(
                            depth + 1,
                            order,
                            net,
                            observed,
                            sources,
                            state,
                            constant,
                            factors,
                            query,
                            terms,
                        );
                        factors.pop();
                    }
                }
            }
        }
        let mut factors = Vec::new();
        walk(
            0,
            &order,
            net,
            observed,
            &sources,
            &mut state,
            1.0,
            &mut factors,
            (query, query_state),
            &mut terms,
        );

        Ok(Self {
            slots,
            terms,
            combinations,
        })
    }

    fn evaluate_combination(&self, choice: &[usize]) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for t in &self.terms {
            let p = t.factors.iter().fold(t.constant, |acc, f| {
                acc * self.slots[f.slot].value(choice[f.slot], f.state)
            });
            den += p;
            if t.matches_query {
                num += p;
            }
        }
        (den > 0.0).then(|| (num / den).clamp(0.0, 1.0))
    }

    fn decode(&self, mut index: u64, choice: &mut [usize]) {
        for (c, slot) in choice.iter_mut().zip(&self.slots) {
            let len = slot.len() as u64;
            *c = (index % len) as usize;
            index /= len;
        }
    }

    fn range_extrema(&self, start: u64, end: u64) -> Option<(f64, f64)> {
        let mut choice = vec![0usize; self.slots.len()];
        self.decode(start, &mut choice);
        let mut acc: Option<(f64, f64)> = None;
        for _ in start..end {
            if let Some(p) = self.evaluate_combination(&choice) {
                acc = Some(acc.map_or((p, p), |(lo, hi)| (lo.min(p), hi.max(p))));
            }
            // increment mixed-radix counter
            for (c, slot) in choice.iter_mut().zip(&self.slots) {
                *c += 1;
                if *c < slot.len() {
                    break;
                }
                *c = 0;
            }
        }
        acc
    }

    fn evaluate(&self, parallel: bool) -> Result<ProbabilityInterval> {
        let total = self.combinations;
        let merge = |a: Option<(f64, f64)>, b: Option<(f64, f64)>| match (a, b) {
            (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
            (x, None) | (None, x) => x,
        };
        let extrema = if parallel && total >= PARALLEL_THRESHOLD {
            let chunk = PARALLEL_THRESHOLD;
            let chunks = total.div_ceil(chunk);
            (0..chunks)
                .into_par_iter()
                .map(|i| self.range_extrema(i * chunk, ((i + 1) * chunk).min(total)))
                .reduce(|| None, merge)
        } else {
            self.range_extrema(0, total)
        };
        let (lo, hi) = extrema.ok_or(CredalError::InconsistentEvidence)?;
        Ok(ProbabilityInterval::new(lo, hi)?)
    }
}

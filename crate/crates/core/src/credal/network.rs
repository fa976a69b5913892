use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{CredalError, Result};
use crate::estimate::ProbabilityInterval;

/// Tolerance used when checking that a row's credal set is non-empty.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A named categorical variable with ordered, unique state labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalVariable {
    pub name: String,
    pub states: Vec<String>,
}

impl CategoricalVariable {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.len() < 2 {
            return Err(CredalError::InvalidNetwork(format!(
                "variable `{name}` needs at least two states"
            )));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(CredalError::InvalidNetwork(format!(
                    "duplicate state `{s}` in variable `{name}`"
                )));
            }
        }
        Ok(Self { name, states })
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, state: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == state)
            .ok_or_else(|| CredalError::UnknownState {
                variable: self.name.clone(),
                state: state.to_string(),
                valid: self.states.clone(),
            })
    }
}

/// Interval-valued conditional table `K(X | parents)`.
///
/// `rows[r]` holds one interval per child state for the parent configuration
/// with mixed-radix index `r` (first parent most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCpt {
    pub(crate) child: usize,
    pub(crate) parents: Vec<usize>,
    pub(crate) rows: Vec<Vec<ProbabilityInterval>>,
}

impl IntervalCpt {
    pub fn child(&self) -> usize {
        self.child
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<ProbabilityInterval>] {
        &self.rows
    }

    pub fn is_point(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(ProbabilityInterval::is_point)
    }
}

/// DAG of categorical variables with one interval CPT per variable.
///
/// Immutable once built. When every interval is a point the network is an
/// ordinary Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalNetwork {
    description: String,
    variables: Vec<CategoricalVariable>,
    cpts: Vec<IntervalCpt>,
    topological: Vec<usize>,
}

impl CredalNetwork {
    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn variables(&self) -> &[CategoricalVariable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &CategoricalVariable {
        &self.variables[index]
    }

    pub fn cpt(&self, variable: usize) -> &IntervalCpt {
        &self.cpts[variable]
    }

    pub fn cpts(&self) -> &[IntervalCpt] {
        &self.cpts
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topological
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| CredalError::UnknownVariable {
                name: name.to_string(),
                valid: self.variables.iter().map(|v| v.name.clone()).collect(),
            })
    }

    /// Resolves `(variable, state)` labels to indices.
    pub fn resolve(&self, variable: &str, state: &str) -> Result<(usize, usize)> {
        let v = self.index_of(variable)?;
        Ok((v, self.variables[v].state_index(state)?))
    }

    pub fn is_point(&self) -> bool {
        self.cpts.iter().all(IntervalCpt::is_point)
    }

    /// Parent-state tuple for a row index of `variable`'s CPT.
    pub fn parent_states(&self, variable: usize, row: usize) -> Vec<usize> {
        let parents = &self.cpts[variable].parents;
        let mut states = vec![0; parents.len()];
        let mut rest = row;
        for (slot, &p) in parents.iter().enumerate().rev() {
            let card = self.variables[p].cardinality();
            states[slot] = rest % card;
            rest /= card;
        }
        states
    }

    /// Row index of `variable`'s CPT for the given parent states.
    pub fn row_index(&self, variable: usize, parent_states: &[usize]) -> usize {
        self.cpts[variable]
            .parents
            .iter()
            .zip(parent_states)
            .fold(0, |acc, (&p, &s)| acc * self.variables[p].cardinality() + s)
    }

    /// Derived network whose rows are replaced by `f(variable, row, intervals)`.
    pub fn map_rows<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, &[ProbabilityInterval]) -> Vec<ProbabilityInterval>,
    {
        let cpts = self
            .cpts
            .iter()
            .map(|cpt| IntervalCpt {
                child: cpt.child,
                parents: cpt.parents.clone(),
                rows: cpt
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(r, row)| f(cpt.child, r, row))
                    .collect(),
            })
            .collect();
        Self::assemble(self.description.clone(), self.variables.clone(), cpts)
    }

    fn assemble(
        description: String,
        variables: Vec<CategoricalVariable>,
        cpts: Vec<IntervalCpt>,
    ) -> Result<Self> {
        let n = variables.len();
        for cpt in &cpts {
            let child = &variables[cpt.child];
            let expected_rows: usize = cpt
                .parents
                .iter()
                .map(|&p| variables[p].cardinality())
                .product();
            if cpt.rows.len() != expected_rows {
                return Err(CredalError::InvalidNetwork(format!(
                    "CPT of `{}` has {} rows, expected {expected_rows}",
                    child.name,
                    cpt.rows.len()
                )));
            }
            for (r, row) in cpt.rows.iter().enumerate() {
                if row.len() != child.cardinality() {
                    return Err(CredalError::InvalidNetwork(format!(
                        "row {r} of `{}` has {} entries, expected {}",
                        child.name,
                        row.len(),
                        child.cardinality()
                    )));
                }
                let lo: f64 = row.iter().map(|i| i.lower()).sum();
                let hi: f64 = row.iter().map(|i| i.upper()).sum();
                if lo > 1.0 + SUM_TOLERANCE || hi < 1.0 - SUM_TOLERANCE {
                    return Err(CredalError::EmptyCredalSet {
                        variable: child.name.clone(),
                        row: r,
                        lower_sum: lo,
                        upper_sum: hi,
                    });
                }
            }
        }

        // Kahn's algorithm; ties broken by declaration order.
        let mut indegree: Vec<usize> = cpts.iter().map(|c| c.parents.len()).collect();
        let mut children = vec![Vec::new(); n];
        for cpt in &cpts {
            for &p in &cpt.parents {
                children[p].push(cpt.child);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).rev().collect();
        let mut topological = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            topological.push(v);
            for &c in children[v].iter().rev() {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        if topological.len() != n {
            return Err(CredalError::InvalidNetwork("graph contains a cycle".into()));
        }
        Ok(Self {
            description,
            variables,
            cpts,
            topological,
        })
    }

    /// Serializable document form.
    pub fn to_document(&self) -> NetworkDocument {
        let variables = self
            .variables
            .iter()
            .map(|v| VariableDocument {
                name: v.name.clone(),
                states: v.states.clone(),
            })
            .collect();
        let cpts = self
            .cpts
            .iter()
            .map(|cpt| CptDocument {
                child: self.variables[cpt.child].name.clone(),
                parents: cpt
                    .parents
                    .iter()
                    .map(|&p| self.variables[p].name.clone())
                    .collect(),
                rows: cpt
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(r, row)| RowDocument {
                        given: self
                            .parent_states(cpt.child, r)
                            .iter()
                            .zip(&cpt.parents)
                            .map(|(&s, &p)| self.variables[p].states[s].clone())
                            .collect(),
                        intervals: row.clone(),
                    })
                    .collect(),
            })
            .collect();
        NetworkDocument {
            description: self.description.clone(),
            variables,
            cpts,
        }
    }

    pub fn from_document(doc: &NetworkDocument) -> Result<Self> {
        let mut builder = NetworkBuilder::new(doc.description.clone());
        for v in &doc.variables {
            builder.variable(v.name.clone(), v.states.iter().cloned())?;
        }
        for cpt in &doc.cpts {
            let child = builder.index_of(&cpt.child)?;
            let parents = cpt
                .parents
                .iter()
                .map(|p| builder.index_of(p))
                .collect::<Result<Vec<_>>>()?;
            let rows_needed: usize = parents
                .iter()
                .map(|&p| builder.variables[p].cardinality())
                .product();
            let mut rows: Vec<Option<Vec<ProbabilityInterval>>> = vec![None; rows_needed];
            for row in &cpt.rows {
                if row.given.len() != parents.len() {
                    return Err(CredalError::InvalidNetwork(format!(
                        "row of `{}` names {} parent states, expected {}",
                        cpt.child,
                        row.given.len(),
                        parents.len()
                    )));
                }
                let mut idx = 0;
                for (&p, label) in parents.iter().zip(&row.given) {
                    let var = &builder.variables[p];
                    idx = idx * var.cardinality() + var.state_index(label)?;
                }
                if rows[idx].replace(row.intervals.clone()).is_some() {
                    return Err(CredalError::InvalidNetwork(format!(
                        "duplicate row {:?} in CPT of `{}`",
                        row.given, cpt.child
                    )));
                }
            }
            let rows = rows
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    r.ok_or_else(|| {
                        CredalError::InvalidNetwork(format!(
                            "CPT of `{}` is missing parent configuration #{i}",
                            cpt.child
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            builder.insert_cpt(child, parents, rows)?;
        }
        builder.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("network document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDocument =
            serde_json::from_str(text).map_err(|e| CredalError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Incremental construction of a [`CredalNetwork`].
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    description: String,
    variables: Vec<CategoricalVariable>,
    cpts: BTreeMap<usize, IntervalCpt>,
}

impl NetworkBuilder {
    pub fn new(description: impl Into<String>) -> Self {
        Self {
            description: description.into(),
            ..Self::default()
        }
    }

    pub fn variable<S: Into<String>>(
        &mut self,
        name: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<&mut Self> {
        let var = CategoricalVariable::new(name, states)?;
        if self.variables.iter().any(|v| v.name == var.name) {
            return Err(CredalError::InvalidNetwork(format!(
                "duplicate variable `{}`",
                var.name
            )));
        }
        self.variables.push(var);
        Ok(self)
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| CredalError::UnknownVariable {
                name: name.to_string(),
                valid: self.variables.iter().map(|v| v.name.clone()).collect(),
            })
    }

    fn insert_cpt(
        &mut self,
        child: usize,
        parents: Vec<usize>,
        rows: Vec<Vec<ProbabilityInterval>>,
    ) -> Result<()> {
        if parents.contains(&child) {
            return Err(CredalError::InvalidNetwork(format!(
                "`{}` cannot be its own parent",
                self.variables[child].name
            )));
        }
        let unique: HashSet<_> = parents.iter().collect();
        if unique.len() != parents.len() {
            return Err(CredalError::InvalidNetwork(format!(
                "repeated parent in CPT of `{}`",
                self.variables[child].name
            )));
        }
        let cpt = IntervalCpt {
            child,
            parents,
            rows,
        };
        if self.cpts.insert(child, cpt).is_some() {
            return Err(CredalError::InvalidNetwork(format!(
                "second CPT for `{}`",
                self.variables[child].name
            )));
        }
        Ok(())
    }

    /// Adds an interval CPT; `rows` follow mixed-radix parent order.
    pub fn cpt(
        &mut self,
        child: &str,
        parents: &[&str],
        rows: Vec<Vec<ProbabilityInterval>>,
    ) -> Result<&mut Self> {
        let c = self.index_of(child)?;
        let ps = parents
            .iter()
            .map(|p| self.index_of(p))
            .collect::<Result<Vec<_>>>()?;
        self.insert_cpt(c, ps, rows)?;
        Ok(self)
    }

    /// Adds a precise CPT.
    pub fn point_cpt(
        &mut self,
        child: &str,
        parents: &[&str],
        rows: Vec<Vec<f64>>,
    ) -> Result<&mut Self> {
        let rows = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(ProbabilityInterval::point)
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        self.cpt(child, parents, rows)
    }

    pub fn build(&self) -> Result<CredalNetwork> {
        let mut cpts = Vec::with_capacity(self.variables.len());
        for (i, v) in self.variables.iter().enumerate() {
            match self.cpts.get(&i) {
                Some(cpt) => cpts.push(cpt.clone()),
                None => {
                    return Err(CredalError::InvalidNetwork(format!(
                        "variable `{}` has no CPT",
                        v.name
                    )))
                }
            }
        }
        CredalNetwork::assemble(self.description.clone(), self.variables.clone(), cpts)
    }
}

/// JSON form of a network: variables, CPT rows keyed by parent states, and a
/// free-text description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    #[serde(default)]
    pub description: String,
    pub variables: Vec<VariableDocument>,
    pub cpts: Vec<CptDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDocument {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptDocument {
    pub child: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<RowDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDocument {
    #[serde(default)]
    pub given: Vec<String>,
    pub intervals: Vec<ProbabilityInterval>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(l: f64, u: f64) -> ProbabilityInterval {
        ProbabilityInterval::new(l, u).unwrap()
    }

    fn chain() -> CredalNetwork {
        let mut b = NetworkBuilder::new("chain");
        b.variable("A", ["a0", "a1"]).unwrap();
        b.variable("B", ["b0", "b1", "b2"]).unwrap();
        b.cpt(
            "B",
            &["A"],
            vec![
                vec![iv(0.1, 0.2), iv(0.3, 0.4), iv(0.4, 0.6)],
                vec![iv(0.5, 0.5), iv(0.2, 0.2), iv(0.3, 0.3)],
            ],
        )
        .unwrap();
        b.cpt("A", &[], vec![vec![iv(0.3, 0.5), iv(0.5, 0.7)]])
            .unwrap();
        b.build().unwrap()
    }

    #[test]
    fn builds_and_orders() {
        let net = chain();
        assert_eq!(net.topological_order(), &[0, 1]);
        assert!(!net.is_point());
        assert_eq!(net.resolve("B", "b2").unwrap(), (1, 2));
    }

    #[test]
    fn document_round_trip() {
        let net = chain();
        let back = CredalNetwork::from_json(&net.to_json()).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn mixed_radix_rows() {
        let mut b = NetworkBuilder::new("");
        b.variable("X", ["x0", "x1"]).unwrap();
        b.variable("Y", ["y0", "y1", "y2"]).unwrap();
        b.variable("Z", ["z0", "z1"]).unwrap();
        b.point_cpt("X", &[], vec![vec![0.5, 0.5]]).unwrap();
        b.point_cpt("Y", &[], vec![vec![0.2, 0.3, 0.5]]).unwrap();
        b.point_cpt("Z", &["X", "Y"], vec![vec![0.5, 0.5]; 6])
            .unwrap();
        let net = b.build().unwrap();
        for r in 0..6 {
            let ps = net.parent_states(2, r);
            assert_eq!(net.row_index(2, &ps), r);
        }
        assert_eq!(net.parent_states(2, 4), vec![1, 1]);
    }

    #[test]
    fn rejects_invalid_structures() {
        let mut b = NetworkBuilder::new("");
        b.variable("A", ["a0", "a1"]).unwrap();
        assert!(b.variable("A", ["x", "y"]).is_err());
        assert!(CategoricalVariable::new("B", ["b", "b"]).is_err());
        assert!(CategoricalVariable::new("B", ["b"]).is_err());
        assert!(b.build().is_err(), "missing CPT");

        let mut b = NetworkBuilder::new("");
        b.variable("A", ["a0", "a1"]).unwrap();
        b.variable("B", ["b0", "b1"]).unwrap();
        b.point_cpt("A", &["B"], vec![vec![0.5, 0.5]; 2]).unwrap();
        b.point_cpt("B", &["A"], vec![vec![0.5, 0.5]; 2]).unwrap();
        assert!(matches!(b.build(), Err(CredalError::InvalidNetwork(m)) if m.contains("cycle")));

        let mut b = NetworkBuilder::new("");
        b.variable("A", ["a0", "a1"]).unwrap();
        b.cpt("A", &[], vec![vec![iv(0.6, 0.7), iv(0.6, 0.7)]])
            .unwrap();
        assert!(matches!(b.build(), Err(CredalError::EmptyCredalSet { .. })));

        let mut b = NetworkBuilder::new("");
        b.variable("A", ["a0", "a1"]).unwrap();
        b.point_cpt("A", &[], vec![vec![0.5, 0.5]; 2]).unwrap();
        assert!(b.build().is_err(), "too many rows");
    }

    #[test]
    fn unknown_state_lists_valid_states() {
        let net = chain();
        match net.resolve("B", "b9") {
            Err(CredalError::UnknownState { valid, .. }) => assert_eq!(valid, ["b0", "b1", "b2"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn document_rejects_missing_and_duplicate_rows() {
        let net = chain();
        let mut doc = net.to_document();
        doc.cpts[1].rows.pop();
        assert!(CredalNetwork::from_document(&doc).is_err());
        let mut doc = net.to_document();
        let dup = doc.cpts[1].rows[0].clone();
        doc.cpts[1].rows[1] = dup;
        assert!(CredalNetwork::from_document(&doc).is_err());
    }
}

//! Greedy and exhaustive subset search driven by the coverage measure.
//!
//! Every strategy produces a [`SelectionTrace`]: a feature ordering plus the
//! coverage value of each prefix of that ordering. The selected subset is the
//! shortest prefix attaining the minimum coverage.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{coverage_subset, Engine};
use crate::dataset::{Dataset, FeatureSet};
use crate::error::{Error, Result};

/// Default limit on the number of features for [`exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Sfs,
    Sbs,
    Exhaustive,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sfs" => Ok(Strategy::Sfs),
            "sbs" => Ok(Strategy::Sbs),
            "exhaustive" => Ok(Strategy::Exhaustive),
            _ => Err(Error::invalid(format!("unknown strategy '{s}'"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Sfs => "sfs",
            Strategy::Sbs => "sbs",
            Strategy::Exhaustive => "exhaustive",
        })
    }
}

/// Record of a subset search.
///
/// `coverage_curve[i]` is the coverage of the first `i + 1` features of
/// `order`. For SBS, `order` is the removal order reversed: the last surviving
/// feature comes first, the first one removed comes last. An undefined
/// coverage value (degenerate cloud) is stored as `+inf` and serialised as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub strategy: Strategy,
    pub feature_names: Vec<String>,
    pub order: Vec<usize>,
    #[serde(rename = "coverage", with = "curve_json")]
    pub coverage_curve: Vec<f64>,
    pub argmin_index: usize,
    pub selected: FeatureSet,
    /// `(step, feature)` pairs whose coverage evaluation was undefined.
    pub degenerate_steps: Vec<(usize, usize)>,
}

impl SelectionTrace {
    fn assemble(
        strategy: Strategy,
        data: &Dataset,
        order: Vec<usize>,
        coverage_curve: Vec<f64>,
        degenerate_steps: Vec<(usize, usize)>,
    ) -> Self {
        let argmin_index = first_argmin(&coverage_curve);
        let selected = FeatureSet::new(order[..=argmin_index].to_vec())
            .expect("order is a permutation");
        Self {
            strategy,
            feature_names: data.feature_names().to_vec(),
            order,
            coverage_curve,
            argmin_index,
            selected,
            degenerate_steps,
        }
    }

    pub fn selected_names(&self) -> Vec<&str> {
        self.selected
            .indices()
            .iter()
            .map(|&i| self.feature_names[i].as_str())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let trace: Self = serde_json::from_str(s)?;
        trace.validate()?;
        Ok(trace)
    }

    /// Checks the structural invariants of a (possibly deserialised) trace.
    pub fn validate(&self) -> Result<()> {
        let d = self.feature_names.len();
        if self.order.len() != d || self.coverage_curve.len() != d {
            return Err(Error::invalid(
                "trace arrays must have one entry per feature",
            ));
        }
        let mut seen = vec![false; d];
        for &i in &self.order {
            if i >= d || std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid("trace order is not a permutation"));
            }
        }
        if d > 0 && self.argmin_index != first_argmin(&self.coverage_curve) {
            return Err(Error::invalid("argmin_index is not the first curve minimum"));
        }
        if d > 0 && self.selected.indices() != &self.order[..=self.argmin_index] {
            return Err(Error::invalid("selected is not the argmin prefix of order"));
        }
        Ok(())
    }
}

/// Index of the first minimum of a coverage curve.
pub fn first_argmin(curve: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in curve.iter().enumerate() {
        if v < curve[best] {
            best = i;
        }
    }
    best
}

/// The shortest prefix of `trace.order` attaining the curve minimum.
pub fn argmin_prefix(trace: &SelectionTrace) -> FeatureSet {
    let end = first_argmin(&trace.coverage_curve);
    FeatureSet::new(trace.order[..=end.min(trace.order.len().saturating_sub(1))].to_vec())
        .unwrap_or_default()
}

fn check_input(data: &Dataset) -> Result<()> {
    if data.n_features() == 0 {
        return Err(Error::EmptyDataset);
    }
    if data.n_rows() < 2 {
        return Err(Error::TooFewPoints(data.n_rows()));
    }
    Ok(())
}

/// Coverage of a subset, `None` when the cloud is degenerate.
fn score(data: &Dataset, subset: &FeatureSet, engine: Engine) -> Result<Option<f64>> {
    match coverage_subset(data, subset, engine) {
        Ok(r) => Ok(Some(r.lambda)),
        Err(Error::DegenerateCloud) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Picks the candidate with the lowest score; ties go to the smallest index
/// and undefined scores lose to every defined one. `candidates` must be in
/// ascending order.
fn pick(candidates: &[(usize, Option<f64>)]) -> (usize, f64) {
    let mut best: Option<(usize, f64)> = None;
    for &(j, s) in candidates {
        if let Some(v) = s {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((j, v));
            }
        }
    }
    best.unwrap_or((candidates[0].0, f64::INFINITY))
}

/// Sequential forward selection.
///
/// Starting from the empty set, each step adds the remaining feature that
/// gives the lowest coverage together with the features already chosen.
pub fn sfs(data: &Dataset, engine: Engine) -> Result<SelectionTrace> {
    check_input(data)?;
    let d = data.n_features();
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut prefix = FeatureSet::empty();
    let mut curve = Vec::with_capacity(d);
    let mut degenerate = Vec::new();

    for step in 0..d {
        let scored = remaining
            .par_iter()
            .map(|&j| {
                let mut s = prefix.clone();
                s.push(j);
                score(data, &s, engine).map(|v| (j, v))
            })
            .collect::<Result<Vec<_>>>()?;
        degenerate.extend(scored.iter().filter(|c| c.1.is_none()).map(|c| (step, c.0)));
        let (winner, value) = pick(&scored);
        if step == 0 && value.is_infinite() {
            return Err(Error::AllDegenerate);
        }
        prefix.push(winner);
        curve.push(value);
        remaining.retain(|&j| j != winner);
    }
    Ok(SelectionTrace::assemble(
        Strategy::Sfs,
        data,
        prefix.into(),
        curve,
        degenerate,
    ))
}

/// Sequential backward selection.
///
/// Starting from all features, each step removes the feature whose removal
/// leaves the lowest coverage. The trace lists features in reverse removal
/// order so that prefixes are the surviving sets.
pub fn sbs(data: &Dataset, engine: Engine) -> Result<SelectionTrace> {
    check_input(data)?;
    let d = data.n_features();
    let mut current: Vec<usize> = (0..d).collect();
    let mut curve = vec![f64::INFINITY; d];
    curve[d - 1] = score(data, &data.all_features(), engine)?.ok_or(Error::AllDegenerate)?;
    let mut removed = Vec::with_capacity(d);
    let mut degenerate = Vec::new();

    let mut step = 0;
    while current.len() > 1 {
        let scored = current
            .par_iter()
            .map(|&j| {
                let rest: Vec<usize> = current.iter().copied().filter(|&i| i != j).collect();
                score(data, &FeatureSet::new(rest)?, engine).map(|v| (j, v))
            })
            .collect::<Result<Vec<_>>>()?;
        degenerate.extend(scored.iter().filter(|c| c.1.is_none()).map(|c| (step, c.0)));
        let (victim, value) = pick(&scored);
        current.retain(|&j| j != victim);
        curve[current.len() - 1] = value;
        removed.push(victim);
        step += 1;
    }
    let mut order = current;
    order.extend(removed.into_iter().rev());
    Ok(SelectionTrace::assemble(
        Strategy::Sbs,
        data,
        order,
        curve,
        degenerate,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub subset: FeatureSet,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub best: FeatureSet,
    pub best_lambda: f64,
    /// One entry per non-empty subset; entry `m - 1` holds the subset whose
    /// bitmask is `m`.
    pub table: Vec<SubsetScore>,
}

impl ExhaustiveResult {
    fn lookup(&self, subset: &[usize]) -> Option<f64> {
        let mask: usize = subset.iter().map(|&i| 1usize << i).sum();
        self.table[mask - 1].lambda
    }

    /// Expresses the result as a trace: the best subset (ascending) followed
    /// by the remaining features, with each prefix scored from the table.
    pub fn to_trace(&self, data: &Dataset) -> SelectionTrace {
        let mut order: Vec<usize> = self.best.indices().to_vec();
        order.extend((0..data.n_features()).filter(|i| !self.best.contains(*i)));
        let curve = (1..=order.len())
            .map(|len| self.lookup(&order[..len]).unwrap_or(f64::INFINITY))
            .collect();
        let degenerate = self
            .table
            .iter()
            .filter(|s| s.lambda.is_none() && s.subset.len() == 1)
            .map(|s| (0, s.subset.indices()[0]))
            .collect();
        SelectionTrace::assemble(Strategy::Exhaustive, data, order, curve, degenerate)
    }
}

/// Scores every non-empty subset.
///
/// The best subset has the minimal coverage; ties go to the lexicographically
/// smallest ascending index list.
pub fn exhaustive(data: &Dataset, max_features: usize, engine: Engine) -> Result<ExhaustiveResult> {
    check_input(data)?;
    let d = data.n_features();
    if d > max_features || d >= usize::BITS as usize {
        return Err(Error::TooManyFeatures {
            features: d,
            limit: max_features,
        });
    }
    let table = (1usize..1 << d)
        .into_par_iter()
        .map(|mask| {
            let subset = FeatureSet::new((0..d).filter(|i| mask >> i & 1 == 1).collect())?;
            let lambda = score(data, &subset, engine)?;
            Ok(SubsetScore { subset, lambda })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(&SubsetScore, f64)> = None;
    for entry in &table {
        let Some(v) = entry.lambda else { continue };
        let better = match best {
            None => true,
            Some((b, bv)) => {
                v < bv || (v == bv && entry.subset.indices() < b.subset.indices())
            }
        };
        if better {
            best = Some((entry, v));
        }
    }
    let (best, best_lambda) = best.ok_or(Error::AllDegenerate)?;
    Ok(ExhaustiveResult {
        best: best.subset.clone(),
        best_lambda,
        table,
    })
}

mod curve_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(curve: &[f64], s: S) -> Result<S::Ok, S::Error> {
        curve
            .iter()
            .map(|v| v.is_finite().then_some(*v))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<Option<f64>>::deserialize(d)?;
        Ok(raw.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_with_curve(curve: &[f64]) -> SelectionTrace {
        let d = curve.len();
        SelectionTrace {
            strategy: Strategy::Sfs,
            feature_names: (0..d).map(|i| format!("f{i}")).collect(),
            order: (0..d).rev().collect(),
            coverage_curve: curve.to_vec(),
            argmin_index: 0,
            selected: FeatureSet::empty(),
            degenerate_steps: vec![],
        }
    }

    #[test]
    fn argmin_prefix_examples() {
        assert_eq!(argmin_prefix(&trace_with_curve(&[0.5, 0.3, 0.3, 0.4])).len(), 2);
        assert_eq!(argmin_prefix(&trace_with_curve(&[0.9, 0.5, 0.2])).len(), 3);
        assert_eq!(argmin_prefix(&trace_with_curve(&[0.2, 0.5, 0.9])).len(), 1);
        assert_eq!(
            argmin_prefix(&trace_with_curve(&[0.9, 0.5, 0.2])).indices(),
            &[2, 1, 0]
        );
    }

    #[test]
    fn infinite_entries_never_win() {
        assert_eq!(first_argmin(&[f64::INFINITY, 0.4, 0.4]), 1);
    }

    #[test]
    fn pick_prefers_defined_then_smallest_index() {
        assert_eq!(pick(&[(0, None), (2, Some(0.5)), (3, Some(0.5))]), (2, 0.5));
        assert_eq!(pick(&[(1, None), (4, None)]).0, 1);
    }

    #[test]
    fn strategy_round_trip() {
        for s in [Strategy::Sfs, Strategy::Sbs, Strategy::Exhaustive] {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
    }

    #[test]
    fn trace_json_uses_null_for_undefined() {
        let mut t = trace_with_curve(&[f64::INFINITY, 0.3]);
        t.argmin_index = 1;
        t.selected = FeatureSet::new(vec![1, 0]).unwrap();
        let json = t.to_json().unwrap();
        assert!(json.contains("null"));
        assert_eq!(SelectionTrace::from_json(&json).unwrap(), t);
    }

    #[test]
    fn malformed_trace_rejected() {
        let mut t = trace_with_curve(&[0.3, 0.2]);
        t.argmin_index = 1;
        t.selected = FeatureSet::new(vec![1, 0]).unwrap();
        t.order = vec![1, 1];
        assert!(SelectionTrace::from_json(&t.to_json().unwrap()).is_err());
    }
}

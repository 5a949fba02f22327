//! Classification scoring (overall accuracy, Cohen's kappa) and a k-nearest
//! neighbour baseline used to check that a selected subset keeps the
//! information needed to predict a label.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{sq_dist, PointCloud};
use crate::dataset::{project, Dataset, FeatureSet};
use crate::error::{Error, Result};
use crate::lab::{lab_rng, sample_sd};
use crate::search::SelectionTrace;

/// Non-empty vector of categorical labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector(Vec<String>);

impl LabelVector {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Result<Self> {
        let v: Vec<String> = values.into_iter().map(Into::into).collect();
        if v.is_empty() {
            return Err(Error::EmptyData);
        }
        Ok(Self(v))
    }

    pub fn values(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<&str> {
        let mut c: Vec<&str> = self.0.iter().map(String::as_str).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}

/// Per-class confusion counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub label: String,
    /// Occurrences in the ground truth.
    pub truth: usize,
    /// Occurrences in the predictions.
    pub predicted: usize,
    /// Correct predictions of this class.
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub overall_accuracy: f64,
    pub kappa: f64,
    pub n_test: usize,
    pub per_class_counts: Vec<ClassCounts>,
}

fn class_counts(truth: &LabelVector, pred: &LabelVector) -> Result<Vec<ClassCounts>> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    let mut table: BTreeMap<&str, ClassCounts> = BTreeMap::new();
    for (t, p) in truth.values().iter().zip(pred.values()) {
        counts_for(&mut table, t).truth += 1;
        counts_for(&mut table, p).predicted += 1;
        if t == p {
            counts_for(&mut table, t).correct += 1;
        }
    }
    Ok(table.into_values().collect())
}

fn counts_for<'m, 'a>(table: &'m mut BTreeMap<&'a str, ClassCounts>, label: &'a str) -> &'m mut ClassCounts {
    table.entry(label).or_insert_with(|| ClassCounts {
        label: label.to_string(),
        truth: 0,
        predicted: 0,
        correct: 0,
    })
}

/// Fraction of positions where `pred` equals `truth`.
pub fn overall_accuracy(truth: &LabelVector, pred: &LabelVector) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    let hits = truth
        .values()
        .iter()
        .zip(pred.values())
        .filter(|(t, p)| t == p)
        .count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Cohen's kappa `(n * sum T_c - sum G_c P_c) / (n^2 - sum G_c P_c)` where
/// `T_c` counts correct predictions, `G_c` truth and `P_c` predicted
/// occurrences of class `c`.
///
/// When the denominator vanishes (one class on both sides) kappa is reported
/// as 1 if the vectors agree everywhere and [`Error::UndefinedKappa`]
/// otherwise.
pub fn kappa(truth: &LabelVector, pred: &LabelVector) -> Result<f64> {
    let counts = class_counts(truth, pred)?;
    kappa_from_counts(truth.len(), &counts)
}

fn kappa_from_counts(n: usize, counts: &[ClassCounts]) -> Result<f64> {
    let n = n as f64;
    let agree: f64 = counts.iter().map(|c| c.correct as f64).sum();
    let chance: f64 = counts
        .iter()
        .map(|c| c.truth as f64 * c.predicted as f64)
        .sum();
    let denom = n * n - chance;
    if denom == 0.0 {
        return if agree == n {
            Ok(1.0)
        } else {
            Err(Error::UndefinedKappa)
        };
    }
    Ok((n * agree - chance) / denom)
}

/// Overall accuracy, kappa and confusion counts in one pass.
pub fn evaluate(truth: &LabelVector, pred: &LabelVector) -> Result<EvalResult> {
    let per_class_counts = class_counts(truth, pred)?;
    let n_test = truth.len();
    let correct: usize = per_class_counts.iter().map(|c| c.correct).sum();
    Ok(EvalResult {
        overall_accuracy: correct as f64 / n_test as f64,
        kappa: kappa_from_counts(n_test, &per_class_counts)?,
        n_test,
        per_class_counts,
    })
}

/// Majority vote among the `k` nearest training points.
///
/// Distance ties are broken by training index, vote ties by the smallest
/// label.
pub fn knn_predict(train: &PointCloud, train_labels: &[String], test: &PointCloud, k: usize) -> Vec<String> {
    let k = k.clamp(1, train.len().max(1));
    test.points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|q| {
            let mut dists: Vec<(f64, usize)> =
                train.points().map(|p| sq_dist(q, p)).zip(0..).collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < dists.len() {
                dists.select_nth_unstable_by(k - 1, cmp);
            }
            let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
            for &(_, j) in &dists[..k] {
                *votes.entry(train_labels[j].as_str()).or_default() += 1;
            }
            let mut winner = ("", 0);
            for (label, count) in votes {
                if count > winner.1 {
                    winner = (label, count);
                }
            }
            winner.0.to_string()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    /// Fraction of rows used for training.
    pub split_fraction: f64,
    pub k_neighbors: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self {
            split_fraction: 0.8,
            k_neighbors: 5,
            repeats: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub oa_mean: f64,
    pub oa_sd: f64,
    pub kappa_mean: f64,
    pub kappa_sd: f64,
    pub runs: Vec<EvalResult>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Train/test split, stratified by class when every class has at least two
/// members.
fn split(labels: &[String], fraction: f64, rng: &mut crate::lab::LabRng) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    if by_class.values().all(|members| members.len() >= 2) {
        for members in by_class.values_mut() {
            members.shuffle(rng);
            let cut = ((fraction * members.len() as f64).round() as usize).clamp(1, members.len() - 1);
            train.extend_from_slice(&members[..cut]);
            test.extend_from_slice(&members[cut..]);
        }
    } else {
        let mut all: Vec<usize> = (0..labels.len()).collect();
        all.shuffle(rng);
        let cut = (fraction * all.len() as f64).round() as usize;
        train.extend_from_slice(&all[..cut.min(all.len())]);
        test.extend_from_slice(&all[cut.min(all.len())..]);
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::TooFewPoints(train.len().min(test.len())));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn gather(cloud: &PointCloud, rows: &[usize]) -> PointCloud {
    let data = rows.iter().flat_map(|&i| cloud.point(i).iter().copied()).collect();
    PointCloud::from_flat(rows.len(), cloud.dim(), data).expect("consistent shape")
}

/// Repeated shuffle-split evaluation of a k-NN classifier on `subset`.
pub fn knn_eval(data: &Dataset, labels: &LabelVector, subset: &FeatureSet, params: &KnnParams) -> Result<EvalSummary> {
    if labels.len() != data.n_rows() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: data.n_rows(),
        });
    }
    if !(params.split_fraction > 0.0 && params.split_fraction < 1.0) {
        return Err(Error::invalid("split fraction must lie strictly between 0 and 1"));
    }
    if params.k_neighbors == 0 || params.repeats == 0 {
        return Err(Error::invalid("k_neighbors and repeats must be positive"));
    }
    if subset.is_empty() {
        return Err(Error::invalid("empty feature subset"));
    }
    let cloud = project(data, subset)?;
    let runs = (0..params.repeats)
        .into_par_iter()
        .map(|r| {
            let mut rng = lab_rng(params.seed);
            rng.set_stream(r as u64);
            let (train, test) = split(labels.values(), params.split_fraction, &mut rng)?;
            let train_labels: Vec<String> = train.iter().map(|&i| labels.values()[i].clone()).collect();
            let truth = LabelVector::new(test.iter().map(|&i| labels.values()[i].clone()))?;
            let pred = knn_predict(&gather(&cloud, &train), &train_labels, &gather(&cloud, &test), params.k_neighbors);
            evaluate(&truth, &LabelVector::new(pred)?)
        })
        .collect::<Result<Vec<_>>>()?;

    let oa: Vec<f64> = runs.iter().map(|r| r.overall_accuracy).collect();
    let kappas: Vec<f64> = runs.iter().map(|r| r.kappa).collect();
    Ok(EvalSummary {
        oa_mean: mean(&oa),
        oa_sd: sample_sd(&oa),
        kappa_mean: mean(&kappas),
        kappa_sd: sample_sd(&kappas),
        runs,
    })
}

/// One point of a stepwise evaluation curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEval {
    pub prefix_len: usize,
    pub oa_mean: f64,
    pub oa_sd: f64,
    pub kappa_mean: f64,
    pub kappa_sd: f64,
}

/// Runs [`knn_eval`] on every prefix of `trace.order`.
pub fn stepwise_eval(
    trace: &SelectionTrace,
    data: &Dataset,
    labels: &LabelVector,
    params: &KnnParams,
) -> Result<Vec<StepEval>> {
    trace.validate()?;
    if trace.feature_names.as_slice() != data.feature_names() {
        return Err(Error::invalid("trace features do not match the dataset"));
    }
    (1..=trace.order.len())
        .map(|len| {
            let subset = FeatureSet::new(trace.order[..len].to_vec())?;
            let s = knn_eval(data, labels, &subset, params)?;
            Ok(StepEval {
                prefix_len: len,
                oa_mean: s.oa_mean,
                oa_sd: s.oa_sd,
                kappa_mean: s.kappa_mean,
                kappa_sd: s.kappa_sd,
            })
        })
        .collect()
}

/// Writes `prefix_len,oa_mean,oa_sd,kappa_mean,kappa_sd` rows.
pub fn write_stepwise_csv<W: Write>(curve: &[StepEval], mut out: W) -> std::io::Result<()> {
    writeln!(out, "prefix_len,oa_mean,oa_sd,kappa_mean,kappa_sd")?;
    for s in curve {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.prefix_len, s.oa_mean, s.oa_sd, s.kappa_mean, s.kappa_sd
        )?;
    }
    Ok(())
}

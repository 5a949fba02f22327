//! Synthetic datasets with known informative and redundant features.

use std::collections::HashSet;
use std::f64::consts::PI;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lab_rng;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    /// `sum_i c_i * x_i`
    LinearCombination,
    /// `(sum_i c_i * x_i)^2`; with no coefficients, all weights are 1.
    Square,
    /// `prod_i x_i`, at least two sources, no coefficients.
    Product,
    /// `sin(sum_i c_i * x_i)`
    Sine,
    /// `c_0 * x + c_1`, one source.
    Affine,
}

/// One redundant feature computed from informative ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub target: String,
    /// Indices into the informative features.
    pub sources: Vec<usize>,
    pub kind: TransformKind,
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl Transform {
    pub fn new(target: &str, sources: &[usize], kind: TransformKind, coefficients: &[f64]) -> Self {
        Self {
            target: target.to_string(),
            sources: sources.to_vec(),
            kind,
            coefficients: coefficients.to_vec(),
        }
    }

    fn bad(&self, message: impl Into<String>) -> Error {
        Error::BadTransform {
            target: self.target.clone(),
            message: message.into(),
        }
    }

    fn validate(&self, n_informative: usize) -> Result<()> {
        if let Some(&s) = self.sources.iter().find(|&&s| s >= n_informative) {
            return Err(self.bad(format!(
                "source {s} is not one of the {n_informative} informative features"
            )));
        }
        let arity = self.sources.len();
        let coefs = self.coefficients.len();
        match self.kind {
            TransformKind::LinearCombination | TransformKind::Sine => {
                if arity == 0 || coefs != arity {
                    return Err(self.bad("needs one coefficient per source"));
                }
            }
            TransformKind::Square => {
                if arity == 0 || (coefs != 0 && coefs != arity) {
                    return Err(self.bad("needs at least one source and zero or one coefficient per source"));
                }
            }
            TransformKind::Product => {
                if arity < 2 || coefs != 0 {
                    return Err(self.bad("needs at least two sources and no coefficients"));
                }
            }
            TransformKind::Affine => {
                if arity != 1 || coefs != 2 {
                    return Err(self.bad("needs one source and coefficients [slope, intercept]"));
                }
            }
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(self.bad("non-finite coefficient"));
        }
        Ok(())
    }

    fn weighted_sum(&self, row: &[f64]) -> f64 {
        if self.coefficients.is_empty() {
            self.sources.iter().map(|&s| row[s]).sum()
        } else {
            self.sources
                .iter()
                .zip(&self.coefficients)
                .map(|(&s, c)| c * row[s])
                .sum()
        }
    }

    fn apply(&self, row: &[f64]) -> f64 {
        match self.kind {
            TransformKind::LinearCombination => self.weighted_sum(row),
            TransformKind::Square => self.weighted_sum(row).powi(2),
            TransformKind::Product => self.sources.iter().map(|&s| row[s]).product(),
            TransformKind::Sine => self.weighted_sum(row).sin(),
            TransformKind::Affine => self.coefficients[0] * row[self.sources[0]] + self.coefficients[1],
        }
    }
}

/// Description of a synthetic dataset: independent uniform informative
/// features followed by one deterministic redundant feature per transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancySpec {
    pub n_informative: usize,
    /// Names of the informative features; defaults to `X1, X2, ...`.
    #[serde(default)]
    pub informative_names: Vec<String>,
    pub transforms: Vec<Transform>,
    pub seed: u64,
}

impl RedundancySpec {
    /// Eight features shaped like the classic butterfly benchmark: informative
    /// `X1, X2, I6` and five nonlinear redundant features built from them.
    ///
    /// Layout: `X1, X2, I6, J3, J4, J5, I7, I8`.
    pub fn butterfly(seed: u64) -> Self {
        use TransformKind::*;
        Self {
            n_informative: 3,
            informative_names: vec!["X1".into(), "X2".into(), "I6".into()],
            transforms: vec![
                Transform::new("J3", &[0, 1], Product, &[]),
                Transform::new("J4", &[0, 1], Square, &[1.0, -1.0]),
                Transform::new("J5", &[0], Sine, &[2.0 * PI]),
                Transform::new("I7", &[1, 2], Square, &[1.0, -1.0]),
                Transform::new("I8", &[1, 2], Sine, &[2.0 * PI, 2.0 * PI]),
            ],
            seed,
        }
    }

    /// Only independent features.
    pub fn independent(n_informative: usize, seed: u64) -> Self {
        Self {
            n_informative,
            informative_names: Vec::new(),
            transforms: Vec::new(),
            seed,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s).map_err(|e| Error::BadTransform {
            target: String::new(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = if self.informative_names.is_empty() {
            (1..=self.n_informative).map(|i| format!("X{i}")).collect()
        } else {
            self.informative_names.clone()
        };
        names.extend(self.transforms.iter().map(|t| t.target.clone()));
        names
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_informative == 0 {
            return Err(Error::invalid("need at least one informative feature"));
        }
        if !self.informative_names.is_empty() && self.informative_names.len() != self.n_informative {
            return Err(Error::LengthMismatch {
                left: self.informative_names.len(),
                right: self.n_informative,
            });
        }
        for t in &self.transforms {
            t.validate(self.n_informative)?;
        }
        let names = self.feature_names();
        let unique: HashSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(Error::invalid("feature names must be unique"));
        }
        Ok(())
    }

    /// Indices of the informative features in generated datasets.
    pub fn informative_indices(&self) -> Vec<usize> {
        (0..self.n_informative).collect()
    }
}

/// Generates `n` rows. Informative features are uniform on `[0, 1)`; every
/// transformed feature is rescaled to `[0, 1]` afterwards.
pub fn gen_redundant(n: usize, spec: &RedundancySpec) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::invalid("gen_redundant needs at least 10 rows"));
    }
    spec.validate()?;
    let mut rng = lab_rng(spec.seed);
    let mut columns: Vec<Vec<f64>> = (0..spec.n_informative)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();

    let mut row = vec![0.0; spec.n_informative];
    let mut derived: Vec<Vec<f64>> = vec![Vec::with_capacity(n); spec.transforms.len()];
    for i in 0..n {
        for (r, col) in row.iter_mut().zip(&columns) {
            *r = col[i];
        }
        for (out, t) in derived.iter_mut().zip(&spec.transforms) {
            out.push(t.apply(&row));
        }
    }
    for (col, t) in derived.iter_mut().zip(&spec.transforms) {
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if hi > lo {
            col.iter_mut().for_each(|v| *v = (*v - lo) / (hi - lo));
        } else {
            warn!("transform '{}' produced a constant feature", t.target);
            col.iter_mut().for_each(|v| *v = 0.0);
        }
    }
    columns.extend(derived);
    Dataset::new(spec.feature_names(), columns)
}

//! Noise injection and column shuffling.

use log::warn;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::lab_rng;
use crate::dataset::{Dataset, FeatureSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PerturbationKind {
    /// Zero-mean Gaussian noise with standard deviation
    /// `fraction * sample_sd(column)`.
    GaussianNoise { fraction: f64 },
    Shuffle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    #[serde(flatten)]
    pub kind: PerturbationKind,
    pub target_columns: FeatureSet,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn noise(fraction: f64, target_columns: FeatureSet, seed: u64) -> Self {
        Self {
            kind: PerturbationKind::GaussianNoise { fraction },
            target_columns,
            seed,
        }
    }

    pub fn shuffle(target_columns: FeatureSet, seed: u64) -> Self {
        Self {
            kind: PerturbationKind::Shuffle,
            target_columns,
            seed,
        }
    }
}

/// Sample (n - 1) standard deviation; 0 for fewer than two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Adds seeded Gaussian noise to each target column.
///
/// Non-target columns are returned untouched. A target column with zero
/// standard deviation is left unchanged with a warning.
pub fn inject_noise(data: &Dataset, spec: &PerturbationSpec) -> Result<Dataset> {
    let PerturbationKind::GaussianNoise { fraction } = spec.kind else {
        return Err(Error::invalid("inject_noise needs a gaussian-noise spec"));
    };
    if !(fraction > 0.0 && fraction.is_finite()) {
        return Err(Error::invalid(format!("noise fraction must be positive, got {fraction}")));
    }
    spec.target_columns.check_bounds(data.n_features())?;

    let mut rng = lab_rng(spec.seed);
    let mut columns = data.columns().to_vec();
    for &j in spec.target_columns.indices() {
        let sd = sample_sd(&columns[j]);
        if sd == 0.0 {
            warn!("column '{}' is constant; no noise added", data.feature_names()[j]);
            continue;
        }
        let scale = fraction * sd;
        for v in columns[j].iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += scale * z;
        }
    }
    Ok(data.replace_columns(columns))
}

/// Applies an independent seeded row permutation to each target column.
pub fn shuffle_columns(data: &Dataset, spec: &PerturbationSpec) -> Result<Dataset> {
    if spec.kind != PerturbationKind::Shuffle {
        return Err(Error::invalid("shuffle_columns needs a shuffle spec"));
    }
    spec.target_columns.check_bounds(data.n_features())?;
    let mut rng = lab_rng(spec.seed);
    let mut columns = data.columns().to_vec();
    for &j in spec.target_columns.indices() {
        columns[j].shuffle(&mut rng);
    }
    Ok(data.replace_columns(columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                (0..20).map(|i| i as f64).collect(),
                (0..20).map(|i| (i * i) as f64).collect(),
                vec![3.0; 20],
            ],
        )
        .unwrap()
    }

    fn set(v: &[usize]) -> FeatureSet {
        FeatureSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn noise_touches_only_targets() {
        let d = toy();
        let out = inject_noise(&d, &PerturbationSpec::noise(0.1, set(&[1]), 3)).unwrap();
        assert_eq!(out.column(0), d.column(0));
        assert_ne!(out.column(1), d.column(1));
        assert_eq!(out.column(2), d.column(2));
    }

    #[test]
    fn noise_vanishes_with_fraction() {
        let d = toy();
        let out = inject_noise(&d, &PerturbationSpec::noise(1e-9, set(&[0, 1]), 3)).unwrap();
        for j in 0..2 {
            let sd = sample_sd(d.column(j).unwrap());
            let max = d
                .column(j)
                .unwrap()
                .iter()
                .zip(out.column(j).unwrap())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(max < 1e-6 * sd);
        }
    }

    #[test]
    fn constant_target_left_alone() {
        let d = toy();
        let out = inject_noise(&d, &PerturbationSpec::noise(0.5, set(&[2]), 3)).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn rejects_bad_specs() {
        let d = toy();
        assert!(inject_noise(&d, &PerturbationSpec::noise(0.0, set(&[0]), 1)).is_err());
        assert!(inject_noise(&d, &PerturbationSpec::shuffle(set(&[0]), 1)).is_err());
        assert!(shuffle_columns(&d, &PerturbationSpec::noise(0.1, set(&[0]), 1)).is_err());
        assert!(matches!(
            shuffle_columns(&d, &PerturbationSpec::shuffle(set(&[7]), 1)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn shuffle_permutes_targets() {
        let d = toy();
        let out = shuffle_columns(&d, &PerturbationSpec::shuffle(set(&[1]), 9)).unwrap();
        assert_eq!(out.column(0), d.column(0));
        let mut a = out.column(1).unwrap().to_vec();
        assert_ne!(a.as_slice(), d.column(1).unwrap());
        a.sort_by(f64::total_cmp);
        assert_eq!(a.as_slice(), d.column(1).unwrap());
        let same = shuffle_columns(&d, &PerturbationSpec::shuffle(FeatureSet::empty(), 9)).unwrap();
        assert_eq!(same, d);
    }

    #[test]
    fn spec_json_shape() {
        let s = PerturbationSpec::noise(0.05, set(&[3, 4]), 1);
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["kind"], "gaussian-noise");
        assert_eq!(v["fraction"], 0.05);
        assert_eq!(v["target_columns"], serde_json::json!([3, 4]));
    }
}

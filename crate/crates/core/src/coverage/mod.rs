//! The coverage measure: the coefficient of variation of nearest-neighbour
//! distances of a point cloud.
//!
//! For points `x_1..x_n` let `g_i` be the Euclidean distance from `x_i` to the
//! closest other point and `m` the mean of the `g_i`. Then
//!
//! ```text
//! lambda = sqrt( (1/n) * sum (g_i - m)^2 ) / m
//! ```
//!
//! A regular grid has `lambda = 0`; lower values mean a more even, space-filling
//! cloud. The variance is the population (divide by `n`) variance.

mod kdtree;

use std::fmt;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{sq_dist_bounded, PointCloud};
use crate::dataset::{project, Dataset, FeatureSet};
use crate::error::{Error, Result};

use self::kdtree::KdTree;

/// Above this dimension `Engine::Auto` uses brute force; tree pruning stops
/// paying off.
pub const TREE_MAX_DIM: usize = 15;

const TREE_MIN_POINTS: usize = 64;

/// All-nearest-neighbour strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Brute,
    Tree,
    #[default]
    Auto,
}

impl Engine {
    /// The concrete engine `Auto` resolves to for `n` points in `k` dimensions.
    pub fn resolve(self, n: usize, k: usize) -> Engine {
        match self {
            Engine::Auto if k <= TREE_MAX_DIM && n >= TREE_MIN_POINTS => Engine::Tree,
            Engine::Auto => Engine::Brute,
            e => e,
        }
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Engine::Brute),
            "tree" => Ok(Engine::Tree),
            "auto" => Ok(Engine::Auto),
            _ => Err(Error::invalid(format!("unknown engine '{s}'"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Brute => "brute",
            Engine::Tree => "tree",
            Engine::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub lambda: f64,
    /// Distance from each point to its nearest other point, in input order.
    pub nn_distances: Vec<f64>,
    pub mean_nn: f64,
}

/// Distance from every point to its nearest other point.
///
/// Coincident points give a distance of 0. Both engines return bitwise equal
/// results, and the result does not depend on the rayon pool size.
pub fn nn_min_distances(points: &PointCloud, engine: Engine) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let sq: Vec<f64> = match engine.resolve(n, points.dim()) {
        Engine::Tree => {
            let tree = KdTree::build(points);
            (0..n)
                .into_par_iter()
                .map(|i| tree.nearest_other_sq(i))
                .collect()
        }
        _ => (0..n)
            .into_par_iter()
            .map(|i| brute_nearest_sq(points, i))
            .collect(),
    };
    Ok(sq.into_iter().map(f64::sqrt).collect())
}

fn brute_nearest_sq(points: &PointCloud, i: usize) -> f64 {
    let q = points.point(i);
    let mut best = f64::INFINITY;
    for (j, p) in points.points().enumerate() {
        if j == i {
            continue;
        }
        let d = sq_dist_bounded(q, p, best);
        if d < best {
            best = d;
        }
    }
    best
}

/// Coverage measure of a point cloud using the automatically chosen engine.
pub fn coverage(points: &PointCloud) -> Result<CoverageReport> {
    coverage_with(points, Engine::Auto)
}

pub fn coverage_with(points: &PointCloud, engine: Engine) -> Result<CoverageReport> {
    if points
        .as_flat()
        .iter()
        .any(|&x| !(0.0..=1.0).contains(&x))
    {
        warn!("coverage: coordinates outside the unit hypercube");
    }
    let nn_distances = nn_min_distances(points, engine)?;
    let (lambda, mean_nn) = dispersion(&nn_distances)?;
    Ok(CoverageReport {
        lambda,
        nn_distances,
        mean_nn,
    })
}

/// Coverage of `data` restricted to `subset`.
///
/// The subset is evaluated in ascending index order, so the result is the same
/// for every ordering of the same features.
pub fn coverage_subset(data: &Dataset, subset: &FeatureSet, engine: Engine) -> Result<CoverageReport> {
    if subset.is_empty() {
        return Err(Error::invalid("empty feature subset"));
    }
    let cloud = project(data, &subset.sorted())?;
    coverage_with(&cloud, engine)
}

/// Returns `(lambda, mean)` of a vector of nearest-neighbour distances.
///
/// Sums run over the values in ascending order, which makes the result
/// independent of point order.
pub(crate) fn dispersion(gammas: &[f64]) -> Result<(f64, f64)> {
    let mut sorted = gammas.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(Error::DegenerateCloud);
    }
    let var = sorted.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
    Ok((var.sqrt() / mean, mean))
}

//! Unsupervised feature selection with the coverage measure.
//!
//! The coverage of a point cloud is the relative standard deviation of its
//! nearest-neighbour distances: 0 for a regular grid, larger for clumped or
//! lower-dimensional clouds. Redundant features fold the data onto a
//! lower-dimensional, unevenly populated manifold, which raises coverage, so a
//! greedy search that minimises coverage keeps informative features and drops
//! redundant ones.
//!
//! Crate layout:
//!
//! * [`dataset`]: data model, CSV I/O, unit rescaling, projection.
//! * [`coverage`]: the measure, with brute-force and k-d tree engines.
//! * [`search`]: forward, backward and exhaustive subset search.
//! * [`lab`]: reference point sets, synthetic redundant data, perturbations.
//! * [`metrics`]: accuracy, kappa and a k-NN baseline classifier.

pub mod cloud;
pub mod coverage;
pub mod dataset;
pub mod error;
pub mod lab;
pub mod metrics;
pub mod search;

pub use cloud::PointCloud;
pub use coverage::{coverage, coverage_subset, coverage_with, nn_min_distances, CoverageReport, Engine};
pub use dataset::{load_csv, project, rescale_unit, save_csv, CsvOptions, Dataset, FeatureSet, Labels, RescaleParams};
pub use error::{Error, Result};
pub use search::{argmin_prefix, exhaustive, sbs, sfs, ExhaustiveResult, SelectionTrace, Strategy};

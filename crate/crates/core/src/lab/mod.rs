//! Test geometries, synthetic redundant datasets and perturbations.
//!
//! Everything random here draws from [`LabRng`] (ChaCha8) seeded explicitly,
//! so outputs are reproducible across platforms.

mod perturb;
mod redundant;
mod sequences;
mod sobol_table;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

pub use self::perturb::{inject_noise, sample_sd, shuffle_columns, PerturbationKind, PerturbationSpec};
pub use self::redundant::{gen_redundant, RedundancySpec, Transform, TransformKind};
pub use self::sequences::{halton, regular_grid, sobol, uniform_random, SOBOL_MAX_DIM};

/// The one pseudo-random generator used by the lab.
pub type LabRng = rand_chacha::ChaCha8Rng;

pub fn lab_rng(seed: u64) -> LabRng {
    LabRng::seed_from_u64(seed)
}

/// Metadata written next to every generated or perturbed file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub generator: String,
    pub seed: Option<u64>,
    pub spec: serde_json::Value,
}

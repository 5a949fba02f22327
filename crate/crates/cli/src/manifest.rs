//! Run manifests: what was run, on which inputs, with which seeds.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use ufscov_core::{Error, Result};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: Vec<String>,
    pub seeds: Vec<u64>,
    /// sha256 of every input file, keyed by the path as given.
    pub input_hashes: BTreeMap<String, String>,
    pub version: String,
    pub duration_secs: f64,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Collected while a subcommand runs.
#[derive(Debug, Default)]
pub struct RunRecord {
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    /// Primary output file, if the subcommand wrote one.
    pub output: Option<PathBuf>,
}

impl RunRecord {
    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// `<output>.manifest.json`, or `<subcommand>.manifest.json` in the working
/// directory when the primary output went to standard output.
pub fn default_path(subcommand: &str, output: Option<&Path>) -> PathBuf {
    match output {
        Some(out) => sibling(out, "manifest.json"),
        None => PathBuf::from(format!("{subcommand}.manifest.json")),
    }
}

/// `foo.csv` -> `foo.csv.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

impl RunManifest {
    pub fn build(subcommand: &str, record: &RunRecord, elapsed: Duration, outcome: &Result<()>, code: i32) -> Self {
        let input_hashes = record
            .inputs
            .iter()
            .filter_map(|p| sha256_file(p).ok().map(|h| (p.display().to_string(), h)))
            .collect();
        Self {
            subcommand: subcommand.to_string(),
            args: std::env::args().collect(),
            seeds: record.seeds.clone(),
            input_hashes,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: elapsed.as_secs_f64(),
            exit_code: code,
            error: outcome.as_ref().err().map(ToString::to_string),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n").map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

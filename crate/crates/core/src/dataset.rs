//! Tabular data model, CSV ingestion and unit-hypercube rescaling.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Categorical label column carried alongside the features.
///
/// Selection never looks at it; it is only consumed by the evaluation code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub name: String,
    pub values: Vec<String>,
}

/// Column-major numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    label: Option<Labels>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_label(feature_names, columns, None)
    }

    pub fn with_label(
        feature_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        label: Option<Labels>,
    ) -> Result<Self> {
        if feature_names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                left: feature_names.len(),
                right: columns.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate feature name '{name}'")));
            }
        }
        let n = match (columns.first(), &label) {
            (Some(c), _) => c.len(),
            (None, Some(l)) => l.values.len(),
            (None, None) => 0,
        };
        if n == 0 {
            return Err(Error::EmptyData);
        }
        for (name, col) in feature_names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::LengthMismatch {
                    left: col.len(),
                    right: n,
                });
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    row: row + 1,
                    column: name.clone(),
                    message: "non-finite value".into(),
                });
            }
        }
        if let Some(l) = &label {
            if l.values.len() != n {
                return Err(Error::LengthMismatch {
                    left: l.values.len(),
                    right: n,
                });
            }
            if feature_names.contains(&l.name) {
                return Err(Error::invalid(format!(
                    "label '{}' clashes with a feature name",
                    l.name
                )));
            }
        }
        Ok(Self {
            feature_names,
            columns,
            label,
        })
    }

    /// Number of rows.
    pub fn n_rows(&self) -> usize {
        self.columns
            .first()
            .map(Vec::len)
            .or_else(|| self.label.as_ref().map(|l| l.values.len()))
            .unwrap_or(0)
    }

    /// Number of features (the label is not counted).
    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Option<&[f64]> {
        self.columns.get(j).map(Vec::as_slice)
    }

    pub fn label(&self) -> Option<&Labels> {
        self.label.as_ref()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    /// Resolves feature names to a [`FeatureSet`], keeping the given order.
    pub fn feature_set<S: AsRef<str>>(&self, names: &[S]) -> Result<FeatureSet> {
        let indices = names
            .iter()
            .map(|n| {
                self.feature_index(n.as_ref())
                    .ok_or_else(|| Error::MissingColumn(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureSet::new(indices)
    }

    pub fn all_features(&self) -> FeatureSet {
        FeatureSet((0..self.n_features()).collect())
    }

    /// Returns a copy with the given columns replaced.
    pub(crate) fn replace_columns(&self, columns: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(columns.len(), self.columns.len());
        Self {
            feature_names: self.feature_names.clone(),
            columns,
            label: self.label.clone(),
        }
    }

    pub fn without_label(mut self) -> Self {
        self.label = None;
        self
    }
}

/// Ordered list of distinct feature indices defining a subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSet(Vec<usize>);

impl FeatureSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if !seen.insert(i) {
                return Err(Error::invalid(format!("duplicate feature index {i}")));
            }
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn check_bounds(&self, n_features: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= n_features) {
            Some(&index) => Err(Error::IndexOutOfRange {
                index,
                len: n_features,
            }),
            None => Ok(()),
        }
    }

    /// Same features in ascending index order.
    pub fn sorted(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable();
        Self(v)
    }

    pub(crate) fn push(&mut self, index: usize) {
        debug_assert!(!self.0.contains(&index));
        self.0.push(index);
    }
}

impl From<FeatureSet> for Vec<usize> {
    fn from(s: FeatureSet) -> Self {
        s.0
    }
}

/// Per-feature range of a rescaling, in original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleParams {
    pub features: Vec<FeatureRange>,
}

impl RescaleParams {
    /// Indices of features whose min equals their max.
    pub fn constant_features(&self) -> Vec<usize> {
        self.features
            .iter()
            .enumerate()
            .filter(|(_, r)| r.min == r.max)
            .map(|(i, _)| i)
            .collect()
    }

    /// Maps a rescaled value of feature `j` back to original units.
    pub fn invert(&self, j: usize, value: f64) -> f64 {
        let r = &self.features[j];
        r.min + value * (r.max - r.min)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Maps every feature onto `[0, 1]` with `x -> (x - min) / (max - min)`.
///
/// A constant feature becomes all zeros and is reported with a warning.
pub fn rescale_unit(data: &Dataset) -> (Dataset, RescaleParams) {
    let mut ranges = Vec::with_capacity(data.n_features());
    let columns = data
        .columns
        .iter()
        .zip(&data.feature_names)
        .map(|(col, name)| {
            let (min, max) = col
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            ranges.push(FeatureRange {
                name: name.clone(),
                min,
                max,
            });
            if max > min {
                let span = max - min;
                col.iter().map(|&v| (v - min) / span).collect()
            } else {
                warn!("feature '{name}' is constant; rescaled to 0");
                vec![0.0; col.len()]
            }
        })
        .collect();
    (
        data.replace_columns(columns),
        RescaleParams { features: ranges },
    )
}

/// Extracts the listed features as a point cloud, in the listed order.
pub fn project(data: &Dataset, subset: &FeatureSet) -> Result<PointCloud> {
    subset.check_bounds(data.n_features())?;
    let cols: Vec<&[f64]> = subset
        .indices()
        .iter()
        .map(|&j| data.columns[j].as_slice())
        .collect();
    PointCloud::from_columns(&cols)
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: None,
            delimiter: b',',
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, options)
}

pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(e, 0))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::EmptyData);
    }

    let label_pos = match &options.label_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?,
        ),
        None => None,
    };
    let feature_pos: Vec<usize> = (0..header.len()).filter(|&i| Some(i) != label_pos).collect();

    let mut columns = vec![Vec::new(); feature_pos.len()];
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| csv_error(e, row))?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for (col, &pos) in columns.iter_mut().zip(&feature_pos) {
            let cell = &record[pos];
            let value = cell.parse::<f64>().ok().filter(|v| v.is_finite());
            match value {
                Some(v) => col.push(v),
                None => {
                    return Err(Error::Parse {
                        row,
                        column: header[pos].clone(),
                        message: if cell.is_empty() {
                            "missing value".into()
                        } else {
                            format!("'{cell}' is not a finite number")
                        },
                    })
                }
            }
        }
        if let Some(pos) = label_pos {
            labels.push(record[pos].to_string());
        }
    }
    if labels.is_empty() && columns.first().is_none_or(Vec::is_empty) {
        return Err(Error::EmptyData);
    }

    let names = feature_pos.iter().map(|&i| header[i].clone()).collect();
    let label = label_pos.map(|pos| Labels {
        name: header[pos].clone(),
        values: labels,
    });
    Dataset::with_label(names, columns, label)
}

fn csv_error(e: csv::Error, row: usize) -> Error {
    let message = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: Default::default(),
            source,
        },
        _ => Error::Parse {
            row,
            column: String::new(),
            message,
        },
    }
}

/// Writes features in order followed by the label column, if any.
///
/// Values are written with Rust's shortest round-trip formatting.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| csv_error(e, 0);
    let mut header: Vec<&str> = data.feature_names.iter().map(String::as_str).collect();
    if let Some(l) = &data.label {
        header.push(&l.name);
    }
    wtr.write_record(&header).map_err(io)?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..data.n_rows() {
        record.clear();
        record.extend(data.columns.iter().map(|c| c[i].to_string()));
        if let Some(l) = &data.label {
            record.push(l.values[i].clone());
        }
        wtr.write_record(&record).map_err(io)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: Default::default(),
        source,
    })?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(data, std::io::BufWriter::new(file))
}

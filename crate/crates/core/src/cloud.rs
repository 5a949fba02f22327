//! Dense row-major point storage used by the nearest-neighbour engines.

use crate::error::{Error, Result};

/// `n` points in `k` dimensions, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn from_flat(n: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("point dimension must be at least 1"));
        }
        if data.len() != n * k {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: n * k,
            });
        }
        Ok(Self { n, k, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * k);
        for row in rows {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: k,
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), k, data)
    }

    /// Builds a cloud from equal-length columns, in the order given.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let k = columns.len();
        let n = columns.first().map_or(0, |c| c.as_ref().len());
        if let Some(bad) = columns.iter().find(|c| c.as_ref().len() != n) {
            return Err(Error::LengthMismatch {
                left: bad.as_ref().len(),
                right: n,
            });
        }
        let mut data = vec![0.0; n * k];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.as_ref().iter().enumerate() {
                data[i * k + j] = v;
            }
        }
        Self::from_flat(n, k, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.k)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.points().map(|p| p[j]).collect()
    }

    /// Applies `x -> scale * x + offset` to every coordinate.
    pub fn map_affine(&self, scale: f64, offset: &[f64]) -> Self {
        let data = self
            .data
            .chunks_exact(self.k)
            .flat_map(|p| p.iter().zip(offset).map(|(&x, &t)| scale * x + t))
            .collect();
        Self {
            n: self.n,
            k: self.k,
            data,
        }
    }
}

/// Squared Euclidean distance, summed in coordinate order.
///
/// Both nearest-neighbour engines go through this function so that they agree
/// bit for bit.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Like [`sq_dist`] but gives up once the partial sum exceeds `bound`.
///
/// Partial sums of non-negative terms never decrease, so any return value
/// `<= bound` is the exact full sum.
#[inline]
pub(crate) fn sq_dist_bounded(a: &[f64], b: &[f64], bound: f64) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
        if acc > bound {
            return acc;
        }
    }
    acc
}

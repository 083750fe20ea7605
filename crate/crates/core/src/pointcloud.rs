//! Point clouds in Euclidean space and their pairwise distances.

use crate::error::{Error, Result};
use std::path::Path;

/// Finite point cloud, row-major coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Wraps row-major coordinates; length must be a multiple of `dim` and
    /// every entry finite.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not fill rows of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coordinate at flat index {bad}"
            )));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.is_empty() || dim == 0 {
            return Err(Error::EmptyInput);
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    r.len()
                )));
            }
            coords.extend_from_slice(r);
        }
        PointCloud::new(dim, coords)
    }

    /// Loads comma-separated coordinates. The first line is treated as a
    /// header only when every cell fails to parse as a number.
    pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text)
    }

    /// Parses CSV text; row numbers in errors are 1-based file lines.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut dim = 0usize;
        let mut coords = Vec::new();
        let mut rows = 0usize;
        let mut first_data_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let row = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if !first_data_seen {
                first_data_seen = true;
                if cells.iter().all(|c| c.parse::<f64>().is_err()) {
                    continue; // header line
                }
            }
            if dim == 0 {
                dim = cells.len();
            } else if cells.len() != dim {
                return Err(Error::Parse {
                    row,
                    reason: format!("expected {dim} columns, found {}", cells.len()),
                });
            }
            for cell in cells {
                let value: f64 = cell.parse().map_err(|_| Error::Parse {
                    row,
                    reason: format!("cannot parse {cell:?} as a number"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        row,
                        reason: format!("non-finite value {cell:?}"),
                    });
                }
                coords.push(value);
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(Error::EmptyInput);
        }
        PointCloud::new(dim, coords)
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Cloud with `z` appended as the last point.
    pub fn with_point(&self, z: &[f64]) -> Result<Self> {
        if z.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "point has dimension {}, cloud has {}",
                z.len(),
                self.dim
            )));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(z);
        PointCloud::new(self.dim, coords)
    }

    /// Cloud restricted to the given point indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    /// Multiplies every coordinate by a positive finite factor.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Ok(PointCloud {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
        })
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = self.distance(i, j);
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        DistanceMatrix { n, d }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric pairwise distance matrix with zero diagonal.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Largest pairwise distance, 0 for clouds with fewer than two points.
    pub fn max(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }
}

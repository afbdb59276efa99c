//! Point clouds in Euclidean space, their distance matrices, and the
//! enclosing radius used as the default filtration threshold.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which population a cloud was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Train,
    Test,
    Ood,
    #[default]
    Unlabeled,
}

impl Role {
    pub fn as_byte(self) -> u8 {
        match self {
            Role::Train => 0,
            Role::Test => 1,
            Role::Ood => 2,
            Role::Unlabeled => 3,
        }
    }

    pub fn from_byte(b: u8) -> Option<Role> {
        match b {
            0 => Some(Role::Train),
            1 => Some(Role::Test),
            2 => Some(Role::Ood),
            3 => Some(Role::Unlabeled),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Train => "train",
            Role::Test => "test",
            Role::Ood => "ood",
            Role::Unlabeled => "unlabeled",
        })
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Role::Train),
            "test" => Ok(Role::Test),
            "ood" => Ok(Role::Ood),
            "unlabeled" | "none" => Ok(Role::Unlabeled),
            other => Err(Error::InvalidConfig(format!("unknown role {other:?}"))),
        }
    }
}

/// `n` points in ℝ^`dim`, stored row-major. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
    pub role: Role,
    pub source: String,
}

impl PointCloud {
    /// Builds a cloud from a flat row-major buffer, rejecting empty shapes and
    /// non-finite coordinates.
    pub fn new(coords: Vec<f64>, dim: usize, role: Role, source: impl Into<String>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Shape { len: coords.len(), dim });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                point: pos / dim,
                axis: pos % dim,
            });
        }
        Ok(Self {
            coords,
            dim,
            role,
            source: source.into(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], role: Role, source: impl Into<String>) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::Shape { len: row.len(), dim });
            }
            coords.extend_from_slice(row);
        }
        Self::new(coords, dim, role, source)
    }

    /// Single-precision input, widened to f64.
    pub fn from_f32(coords: &[f32], dim: usize, role: Role, source: impl Into<String>) -> Result<Self> {
        Self::new(coords.iter().map(|&c| f64::from(c)).collect(), dim, role, source)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
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

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.coords.iter().map(|c| c * factor).collect(),
            self.dim,
            self.role,
            self.source.clone(),
        )
    }

    /// Rows reordered so that row `i` of the result is row `order[i]` of `self`.
    pub fn select(&self, order: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(order.len() * self.dim);
        for &i in order {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.len(),
                });
            }
            coords.extend_from_slice(self.point(i));
        }
        Self::new(coords, self.dim, self.role, self.source.clone())
    }

    /// Per-feature standardization to zero mean and unit variance. Constant
    /// features are centered only.
    pub fn standardized(&self) -> Self {
        let n = self.len() as f64;
        let mut out = self.coords.clone();
        for axis in 0..self.dim {
            let mean = self.points().map(|p| p[axis]).sum::<f64>() / n;
            let var = self.points().map(|p| (p[axis] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            for row in out.chunks_exact_mut(self.dim) {
                row[axis] -= mean;
                if sd > 0.0 {
                    row[axis] /= sd;
                }
            }
        }
        Self {
            coords: out,
            dim: self.dim,
            role: self.role,
            source: self.source.clone(),
        }
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of pairwise Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

/// Above this many points the rows are filled in parallel.
const PARALLEL_ROWS: usize = 512;

impl DistanceMatrix {
    /// Wraps a full `n × n` matrix. Checks symmetry, zero diagonal and
    /// non-negative finite entries.
    pub fn from_full(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyCloud);
        }
        if entries.len() != n * n {
            return Err(Error::Shape {
                len: entries.len(),
                dim: n,
            });
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidConfig(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..i {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 || v != entries[j * n + i] {
                    return Err(Error::InvalidConfig(format!(
                        "entry ({i},{j}) is not a finite symmetric distance"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Full Euclidean distance matrix of `cloud`. Each entry is computed once for
/// `i < j` and mirrored, so the result is exactly symmetric.
pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    let all: Vec<usize> = (0..cloud.len()).collect();
    distances_of_subset(cloud, &all)
}

/// Distance matrix of the points `indices` (with repetition) of `cloud`.
pub fn distances_of_subset(cloud: &PointCloud, indices: &[usize]) -> DistanceMatrix {
    let n = indices.len();
    let mut entries = vec![0.0; n * n];
    let fill_row = |(i, row): (usize, &mut [f64])| {
        let p = cloud.point(indices[i]);
        for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
            *slot = euclidean(p, cloud.point(indices[j]));
        }
    };
    if n >= PARALLEL_ROWS {
        entries.par_chunks_mut(n).enumerate().for_each(fill_row);
    } else {
        entries.chunks_mut(n).enumerate().for_each(fill_row);
    }
    for i in 0..n {
        for j in 0..i {
            entries[i * n + j] = entries[j * n + i];
        }
    }
    DistanceMatrix { n, entries }
}

/// Minimum over points of the maximum distance to any other point. Beyond
/// this scale the Rips complex is a cone, so no 1-cycle survives.
pub fn enclosing_radius(dm: &DistanceMatrix) -> f64 {
    (0..dm.len())
        .map(|i| dm.row(i).iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

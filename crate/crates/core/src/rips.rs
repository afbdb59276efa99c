//! Vietoris-Rips filtration up to dimension two.
//!
//! Simplices are identified by their colexicographic rank in the combinatorial
//! number system: `{i < j}` ↦ `C(j,2) + i`, `{i < j < k}` ↦ `C(k,3) + C(j,2) + i`.
//! Within one dimension the filtration order is ascending diameter, ties broken
//! by descending rank (reverse colexicographic). Edges are stored eagerly;
//! triangles are produced on demand from the distance matrix.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::pointcloud::DistanceMatrix;

/// Largest simplex dimension built. H1 needs triangles and nothing above.
pub const MAX_DIM: usize = 2;

#[inline]
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    match k {
        0 => 1,
        1 => n,
        2 => n * n.saturating_sub(1) / 2,
        3 => {
            if n < 3 {
                0
            } else {
                n * (n - 1) / 2 * (n - 2) / 3
            }
        }
        _ => unreachable!("only ranks up to dimension two are used"),
    }
}

#[inline]
pub fn edge_rank(i: usize, j: usize) -> u64 {
    debug_assert!(i < j);
    binomial(j as u64, 2) + i as u64
}

#[inline]
pub fn triangle_rank(i: usize, j: usize, k: usize) -> u64 {
    debug_assert!(i < j && j < k);
    binomial(k as u64, 3) + binomial(j as u64, 2) + i as u64
}

/// Inverse of [`triangle_rank`].
pub fn triangle_vertices(rank: u64) -> [usize; 3] {
    let mut rest = rank;
    let k = top_vertex(rest, 3);
    rest -= binomial(k, 3);
    let j = top_vertex(rest, 2);
    rest -= binomial(j, 2);
    [rest as usize, j as usize, k as usize]
}

// largest v with C(v, k) <= rank
fn top_vertex(rank: u64, k: u64) -> u64 {
    let mut v = k - 1;
    while binomial(v + 1, k) <= rank {
        v += 1;
    }
    v
}

/// Position of a simplex in the filtration order of its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexKey {
    pub diameter: f64,
    pub rank: u64,
}

impl Eq for SimplexKey {}

impl Ord for SimplexKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diameter
            .total_cmp(&other.diameter)
            .then_with(|| other.rank.cmp(&self.rank))
    }
}

impl PartialOrd for SimplexKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub diameter: f64,
}

impl Edge {
    pub fn key(&self) -> SimplexKey {
        SimplexKey {
            diameter: self.diameter,
            rank: edge_rank(self.u, self.v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub diameter: f64,
}

impl Simplex {
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Entry scale of a simplex: the largest pairwise distance among its vertices.
pub fn simplex_diameter(vertices: &[usize], dm: &DistanceMatrix) -> Result<f64> {
    if vertices.is_empty() || vertices.len() > MAX_DIM + 1 || vertices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSimplex(vertices.to_vec()));
    }
    if let Some(&bad) = vertices.iter().find(|&&v| v >= dm.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            n: dm.len(),
        });
    }
    let mut diam = 0.0f64;
    for (a, &i) in vertices.iter().enumerate() {
        for &j in &vertices[a + 1..] {
            diam = diam.max(dm.get(i, j));
        }
    }
    Ok(diam)
}

/// The Rips filtration of a distance matrix, truncated at `threshold` for
/// edges and triangles.
#[derive(Debug, Clone)]
pub struct Filtration {
    dm: DistanceMatrix,
    threshold: f64,
    edges: Vec<Edge>,
}

/// All vertices plus every edge of diameter `<= threshold`, in filtration order.
pub fn build_filtration(dm: DistanceMatrix, threshold: f64) -> Result<Filtration> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold {threshold} must be non-negative"
        )));
    }
    let n = dm.len();
    let mut edges = Vec::new();
    for v in 1..n {
        for u in 0..v {
            let diameter = dm.get(u, v);
            if diameter <= threshold {
                edges.push(Edge { u, v, diameter });
            }
        }
    }
    edges.sort_unstable_by_key(Edge::key);
    Ok(Filtration { dm, threshold, edges })
}

impl Filtration {
    pub fn n_points(&self) -> usize {
        self.dm.len()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dm
    }

    /// Edges in filtration order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertices in filtration order: all at scale zero, descending index.
    pub fn vertices(&self) -> Vec<Simplex> {
        (0..self.n_points())
            .rev()
            .map(|v| Simplex {
                vertices: vec![v],
                diameter: 0.0,
            })
            .collect()
    }

    /// Eagerly enumerated triangles in filtration order.
    pub fn triangles(&self) -> Vec<(SimplexKey, [usize; 3])> {
        let n = self.n_points();
        let mut out = Vec::new();
        for k in 2..n {
            for j in 1..k {
                let djk = self.dm.get(j, k);
                if djk > self.threshold {
                    continue;
                }
                for i in 0..j {
                    let diameter = djk.max(self.dm.get(i, j)).max(self.dm.get(i, k));
                    if diameter <= self.threshold {
                        let key = SimplexKey {
                            diameter,
                            rank: triangle_rank(i, j, k),
                        };
                        out.push((key, [i, j, k]));
                    }
                }
            }
        }
        out.sort_unstable_by_key(|(key, _)| *key);
        out
    }

    /// Simplices of one dimension in filtration order.
    pub fn simplices(&self, dim: usize) -> Vec<Simplex> {
        match dim {
            0 => self.vertices(),
            1 => self
                .edges
                .iter()
                .map(|e| Simplex {
                    vertices: vec![e.u, e.v],
                    diameter: e.diameter,
                })
                .collect(),
            2 => self
                .triangles()
                .into_iter()
                .map(|(key, vs)| Simplex {
                    vertices: vs.to_vec(),
                    diameter: key.diameter,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Appends the cofacets (triangles within threshold) of `edge` to `out`,
    /// in descending rank order.
    pub(crate) fn edge_cofacets(&self, edge: &Edge, out: &mut Vec<SimplexKey>) {
        let (a, b) = (edge.u, edge.v);
        let row_a = self.dm.row(a);
        let row_b = self.dm.row(b);
        for w in (0..self.n_points()).rev() {
            if w == a || w == b {
                continue;
            }
            let diameter = edge.diameter.max(row_a[w]).max(row_b[w]);
            if diameter <= self.threshold {
                out.push(SimplexKey {
                    diameter,
                    rank: sorted_triangle_rank(a, b, w),
                });
            }
        }
    }

    /// Earliest cofacet of `edge` whose diameter equals the edge's own, if any.
    /// Scans in descending rank, so the first hit is the filtration-minimal one.
    pub(crate) fn zero_cofacet(&self, edge: &Edge) -> Option<SimplexKey> {
        let (a, b) = (edge.u, edge.v);
        let row_a = self.dm.row(a);
        let row_b = self.dm.row(b);
        (0..self.n_points()).rev().find_map(|w| {
            if w == a || w == b || row_a[w] > edge.diameter || row_b[w] > edge.diameter {
                return None;
            }
            Some(SimplexKey {
                diameter: edge.diameter,
                rank: sorted_triangle_rank(a, b, w),
            })
        })
    }
}

#[inline]
fn sorted_triangle_rank(a: usize, b: usize, w: usize) -> u64 {
    // a < b always
    if w > b {
        triangle_rank(a, b, w)
    } else if w > a {
        triangle_rank(a, w, b)
    } else {
        triangle_rank(w, a, b)
    }
}

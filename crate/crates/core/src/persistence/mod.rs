//! Persistence diagrams of Rips filtrations in dimensions zero and one.
//!
//! H0 comes from a union-find pass over the edges in filtration order (elder
//! rule; every class is born at scale zero). H1 comes from reducing the
//! coboundary matrix of edges over the two-element field. Edges that merged
//! two components in the H0 pass are cleared from the H1 reduction up front,
//! and zero-persistence pairs can be recognised before their coboundary is
//! materialised (`apparent_pairs`).

mod h0;
mod h1;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::{enclosing_radius, pairwise_distances, DistanceMatrix, PointCloud};
use crate::rips::{build_filtration, Filtration};

pub use h0::{compute_h0, DisjointSet};
pub use h1::{compute_h1, compute_h1_with};

/// One (birth, death) interval. Essential classes have `death == f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub dimension: u8,
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(dimension: u8, birth: f64, death: f64) -> Self {
        debug_assert!(birth <= death);
        Self {
            dimension,
            birth,
            death,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }
}

/// Filtration threshold used for edges and triangles.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ThresholdPolicy {
    /// The enclosing radius of each distance matrix.
    #[default]
    Enclosing,
    Fixed(f64),
}

impl ThresholdPolicy {
    pub fn resolve(&self, dm: &DistanceMatrix) -> f64 {
        match *self {
            ThresholdPolicy::Enclosing => enclosing_radius(dm),
            ThresholdPolicy::Fixed(t) => t,
        }
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdPolicy::Enclosing => f.write_str("enclosing"),
            ThresholdPolicy::Fixed(t) => write!(f, "{t:?}"),
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("enclosing") {
            return Ok(ThresholdPolicy::Enclosing);
        }
        match s.parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(ThresholdPolicy::Fixed(t)),
            _ => Err(Error::InvalidConfig(format!(
                "threshold must be \"enclosing\" or a non-negative number, got {s:?}"
            ))),
        }
    }
}

impl From<ThresholdPolicy> for String {
    fn from(p: ThresholdPolicy) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for ThresholdPolicy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PersistenceConfig {
    pub threshold: ThresholdPolicy,
    /// Keep the `[0, 0)` H0 bars that duplicate points produce.
    pub include_zero_bars: bool,
    /// Pair zero-persistence edges without materialising their coboundary.
    pub apparent_pairs: bool,
}

impl Default for PersistenceConfig {
    fn default() -> Self {
        Self {
            threshold: ThresholdPolicy::Enclosing,
            include_zero_bars: true,
            apparent_pairs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub n_points: usize,
    pub threshold: f64,
    pub h0: Vec<Bar>,
    pub h1: Vec<Bar>,
}

impl PersistenceDiagram {
    pub fn bars(&self, dimension: u8) -> &[Bar] {
        match dimension {
            0 => &self.h0,
            1 => &self.h1,
            _ => &[],
        }
    }

    pub fn all_bars(&self) -> impl Iterator<Item = &Bar> {
        self.h0.iter().chain(&self.h1)
    }
}

/// Betti numbers at one scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub beta0: usize,
    pub beta1: usize,
}

pub fn compute_persistence(cloud: &PointCloud, config: &PersistenceConfig) -> Result<PersistenceDiagram> {
    compute_persistence_from_distances(pairwise_distances(cloud), config)
}

pub fn compute_persistence_from_distances(
    dm: DistanceMatrix,
    config: &PersistenceConfig,
) -> Result<PersistenceDiagram> {
    let threshold = config.threshold.resolve(&dm);
    let filtration = build_filtration(dm, threshold)?;
    Ok(diagram_of(&filtration, config))
}

pub fn diagram_of(filtration: &Filtration, config: &PersistenceConfig) -> PersistenceDiagram {
    let n = filtration.n_points();
    let (h0, negative) = h0::h0_from_edges(n, filtration.edges(), config.include_zero_bars);
    let h1 = h1::reduce(filtration, &negative, config.apparent_pairs);
    PersistenceDiagram {
        n_points: n,
        threshold: filtration.threshold(),
        h0,
        h1,
    }
}

/// Counts the bars alive at `eps`, i.e. with `birth <= eps < death`.
pub fn betti_at_scale(diagram: &PersistenceDiagram, eps: f64) -> Result<BettiVector> {
    if !(eps >= 0.0) || eps >= diagram.threshold {
        return Err(Error::OutOfValidity {
            eps,
            threshold: diagram.threshold,
        });
    }
    let alive = |bars: &[Bar]| bars.iter().filter(|b| b.birth <= eps && eps < b.death).count();
    Ok(BettiVector {
        beta0: alive(&diagram.h0),
        beta1: alive(&diagram.h1),
    })
}

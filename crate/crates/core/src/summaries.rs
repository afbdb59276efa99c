//! Lifetime statistics of a persistence diagram: average and maximum lifetime,
//! average birth and average death, over the finite bars of one dimension.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{Bar, PersistenceDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramSummary {
    pub dimension: u8,
    pub avg_lifetime: f64,
    pub max_lifetime: f64,
    pub avg_birth: f64,
    pub avg_death: f64,
    pub n_finite_bars: usize,
    pub n_essential_bars: usize,
}

impl DiagramSummary {
    pub fn is_empty(&self) -> bool {
        self.n_finite_bars == 0
    }

    pub fn get(&self, kind: StatKind) -> f64 {
        match kind {
            StatKind::AvgLifetime => self.avg_lifetime,
            StatKind::MaxLifetime => self.max_lifetime,
            StatKind::AvgBirth => self.avg_birth,
            StatKind::AvgDeath => self.avg_death,
        }
    }
}

/// Summary of the finite bars of `dimension`. Essential bars are only counted.
/// With no finite bars every statistic is zero.
pub fn summarize(diagram: &PersistenceDiagram, dimension: u8) -> DiagramSummary {
    summarize_bars(diagram.bars(dimension), dimension)
}

pub fn summarize_bars(bars: &[Bar], dimension: u8) -> DiagramSummary {
    let mut n = 0usize;
    let mut essential = 0usize;
    let (mut births, mut deaths, mut max_life) = (0.0, 0.0, 0.0f64);
    for bar in bars.iter().filter(|b| b.dimension == dimension) {
        if bar.is_essential() {
            essential += 1;
            continue;
        }
        n += 1;
        births += bar.birth;
        deaths += bar.death;
        max_life = max_life.max(bar.lifetime());
    }
    if n == 0 {
        return DiagramSummary {
            dimension,
            avg_lifetime: 0.0,
            max_lifetime: 0.0,
            avg_birth: 0.0,
            avg_death: 0.0,
            n_finite_bars: 0,
            n_essential_bars: essential,
        };
    }
    let avg_birth = births / n as f64;
    let avg_death = deaths / n as f64;
    DiagramSummary {
        dimension,
        // defined from the two averages so the identity is exact
        avg_lifetime: avg_death - avg_birth,
        max_lifetime: max_life,
        avg_birth,
        avg_death,
        n_finite_bars: n,
        n_essential_bars: essential,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatKind {
    AvgLifetime,
    MaxLifetime,
    AvgBirth,
    AvgDeath,
}

impl StatKind {
    pub const ALL: [StatKind; 4] = [
        StatKind::AvgLifetime,
        StatKind::MaxLifetime,
        StatKind::AvgBirth,
        StatKind::AvgDeath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatKind::AvgLifetime => "avg_lifetime",
            StatKind::MaxLifetime => "max_lifetime",
            StatKind::AvgBirth => "avg_birth",
            StatKind::AvgDeath => "avg_death",
        }
    }
}

/// A homology dimension paired with a statistic, written `h0.avg_lifetime`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct StatisticId {
    pub dimension: u8,
    pub kind: StatKind,
}

impl StatisticId {
    pub const fn new(dimension: u8, kind: StatKind) -> Self {
        Self { dimension, kind }
    }

    pub const H0_AVG_LIFETIME: StatisticId = StatisticId::new(0, StatKind::AvgLifetime);

    /// All eight statistics, H0 first.
    pub fn all() -> Vec<StatisticId> {
        (0..=1)
            .flat_map(|d| StatKind::ALL.into_iter().map(move |k| StatisticId::new(d, k)))
            .collect()
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}.{}", self.dimension, self.kind.name())
    }
}

impl FromStr for StatisticId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown statistic {s:?}"));
        let (dim, name) = s.trim().split_once('.').ok_or_else(bad)?;
        let dimension = match dim {
            "h0" | "H0" => 0,
            "h1" | "H1" => 1,
            _ => return Err(bad()),
        };
        let kind = StatKind::ALL.into_iter().find(|k| k.name() == name).ok_or_else(bad)?;
        Ok(StatisticId { dimension, kind })
    }
}

impl From<StatisticId> for String {
    fn from(id: StatisticId) -> String {
        id.to_string()
    }
}

impl TryFrom<String> for StatisticId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

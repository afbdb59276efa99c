//! Confidence-interval comparison of Train, Test and OOD distributions, and
//! the one-sided OOD decision on H0 average lifetime.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{BootstrapConfig, BootstrapOutput};
use crate::error::{Error, Result};
use crate::pointcloud::Role;
use crate::summaries::StatisticId;

/// How the percentile interval endpoints are computed.
pub const QUANTILE_RULE: &str = "linear interpolation between order statistics at 0-based position (M-1)p";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
}

impl Interval {
    pub fn new(low: f64, high: f64) -> Self {
        Self {
            low,
            high,
            mean: None,
            std: None,
        }
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.low.max(other.low) <= self.high.min(other.high)
    }

    /// Distance between the intervals; zero when they intersect.
    pub fn gap(&self, other: &Interval) -> f64 {
        (self.low.max(other.low) - self.high.min(other.high)).max(0.0)
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            low: self.low * c,
            high: self.high * c,
            mean: self.mean.map(|m| m * c),
            std: self.std.map(|s| s * c),
        }
    }
}

/// One statistic's interval from a bootstrap run, values optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalStat {
    pub statistic: StatisticId,
    pub interval: Interval,
}

/// The comparable part of a bootstrap run: its configuration and intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSet {
    pub config: BootstrapConfig,
    pub role: Role,
    pub source: String,
    pub stats: Vec<IntervalStat>,
}

impl DistributionSet {
    pub fn get(&self, id: StatisticId) -> Option<&Interval> {
        self.stats.iter().find(|s| s.statistic == id).map(|s| &s.interval)
    }

    /// Every interval and moment multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.stats {
            s.interval = s.interval.scaled(c);
        }
        out
    }
}

impl From<&BootstrapOutput> for DistributionSet {
    fn from(out: &BootstrapOutput) -> Self {
        Self {
            config: out.config.clone(),
            role: out.role,
            source: out.source.clone(),
            stats: out
                .distributions
                .iter()
                .map(|d| IntervalStat {
                    statistic: d.statistic,
                    interval: Interval {
                        low: d.ci_low,
                        high: d.ci_high,
                        mean: Some(d.mean),
                        std: Some(d.std),
                    },
                })
                .collect(),
        }
    }
}

/// Where the second interval sits relative to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
    Overlapping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub overlap: bool,
    pub gap: f64,
    pub side: Side,
    /// Difference of means over the pooled standard deviation, when both runs
    /// carry moments.
    pub standardized_mean_difference: Option<f64>,
}

pub fn compare_pair(first: &Interval, second: &Interval) -> PairComparison {
    let overlap = first.overlaps(second);
    let side = if overlap {
        Side::Overlapping
    } else if second.low > first.high {
        Side::Above
    } else {
        Side::Below
    };
    let smd = match (first.mean, first.std, second.mean, second.std) {
        (Some(m1), Some(s1), Some(m2), Some(s2)) => {
            let pooled = ((s1 * s1 + s2 * s2) / 2.0).sqrt();
            (pooled > 0.0).then(|| (m2 - m1) / pooled)
        }
        _ => None,
    };
    PairComparison {
        overlap,
        gap: first.gap(second),
        side,
        standardized_mean_difference: smd,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticComparison {
    pub statistic: StatisticId,
    pub train: Interval,
    pub test: Option<Interval>,
    pub ood: Option<Interval>,
    pub train_vs_test: Option<PairComparison>,
    pub train_vs_ood: Option<PairComparison>,
    pub test_vs_ood: Option<PairComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub ci_method: String,
    pub ci_level: f64,
    pub quantile_rule: String,
    pub threshold: String,
    pub include_zero_bars: bool,
    pub empty_policy: String,
    pub sample_size: usize,
    pub iterations: usize,
    pub seeds: Vec<(Role, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub conventions: Conventions,
    pub config: BootstrapConfig,
    pub entries: Vec<StatisticComparison>,
}

impl ComparisonReport {
    pub fn get(&self, id: StatisticId) -> Option<&StatisticComparison> {
        self.entries.iter().find(|e| e.statistic == id)
    }
}

/// Pairwise interval comparison for every statistic in the Train set. Test and
/// OOD are each optional, but at least one must be given.
pub fn compare_distributions(
    train: Option<&DistributionSet>,
    test: Option<&DistributionSet>,
    ood: Option<&DistributionSet>,
) -> Result<ComparisonReport> {
    let train = train.ok_or(Error::MissingTrain)?;
    if test.is_none() && ood.is_none() {
        return Err(Error::MissingCandidate);
    }
    for (label, other) in [("test", test), ("ood", ood)] {
        if let Some(diff) = other.and_then(|o| train.config.mismatch(&o.config)) {
            return Err(Error::ConfigMismatch(format!("train vs {label}: {diff}")));
        }
    }

    let lookup = |set: Option<&DistributionSet>, id: StatisticId| -> Result<Option<Interval>> {
        match set {
            None => Ok(None),
            Some(s) => s
                .get(id)
                .copied()
                .map(Some)
                .ok_or_else(|| Error::MissingStatistic(format!("{id} in {} set", s.role))),
        }
    };

    let mut entries = Vec::with_capacity(train.stats.len());
    for stat in &train.stats {
        let id = stat.statistic;
        let tr = stat.interval;
        let te = lookup(test, id)?;
        let oo = lookup(ood, id)?;
        entries.push(StatisticComparison {
            statistic: id,
            train: tr,
            test: te,
            ood: oo,
            train_vs_test: te.map(|t| compare_pair(&tr, &t)),
            train_vs_ood: oo.map(|o| compare_pair(&tr, &o)),
            test_vs_ood: te.zip(oo).map(|(t, o)| compare_pair(&t, &o)),
        });
    }

    let mut seeds = vec![(Role::Train, train.config.master_seed)];
    seeds.extend(test.map(|t| (Role::Test, t.config.master_seed)));
    seeds.extend(ood.map(|o| (Role::Ood, o.config.master_seed)));
    let c = &train.config;
    Ok(ComparisonReport {
        conventions: Conventions {
            ci_method: "percentile bootstrap".into(),
            ci_level: c.ci_level,
            quantile_rule: QUANTILE_RULE.into(),
            threshold: c.persistence.threshold.to_string(),
            include_zero_bars: c.persistence.include_zero_bars,
            empty_policy: format!("{:?}", c.empty_policy).to_lowercase(),
            sample_size: c.sample_size,
            iterations: c.iterations,
            seeds,
        },
        config: c.clone(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    OodIndicated,
    Indistinguishable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OodVerdict {
    pub decision: Decision,
    /// The population judged against Train: OOD when present, else Test.
    pub candidate: Role,
    /// Candidate lower bound minus Train upper bound on H0 average lifetime.
    /// Positive exactly when OOD is indicated, and then equal to the gap.
    pub margin: f64,
    /// Statistics whose candidate interval lies strictly above Train's. Only
    /// H0 average lifetime decides; the rest corroborate.
    pub evidence: Vec<StatisticId>,
}

pub fn ood_verdict(report: &ComparisonReport) -> Result<OodVerdict> {
    let decisive = report
        .get(StatisticId::H0_AVG_LIFETIME)
        .ok_or_else(|| Error::MissingStatistic(StatisticId::H0_AVG_LIFETIME.to_string()))?;
    let (candidate, cand) = candidate_of(decisive).ok_or(Error::MissingCandidate)?;

    let above = |e: &StatisticComparison| candidate_of(e).is_some_and(|(_, iv)| iv.low > e.train.high);
    let margin = cand.low - decisive.train.high;
    let decision = if above(decisive) {
        Decision::OodIndicated
    } else {
        Decision::Indistinguishable
    };
    Ok(OodVerdict {
        decision,
        candidate,
        margin,
        evidence: report
            .entries
            .iter()
            .filter(|e| above(e))
            .map(|e| e.statistic)
            .collect(),
    })
}

fn candidate_of(e: &StatisticComparison) -> Option<(Role, Interval)> {
    e.ood
        .map(|o| (Role::Ood, o))
        .or_else(|| e.test.map(|t| (Role::Test, t)))
}

/// Three-decimal interval table for one statistic, one row per population.
pub fn render_table(report: &ComparisonReport, id: StatisticId) -> Option<String> {
    let e = report.get(id)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}% confidence intervals for {id} (n = {}, M = {})",
        report.conventions.ci_level * 100.0,
        report.conventions.sample_size,
        report.conventions.iterations
    );
    for (label, iv) in [("Train", Some(e.train)), ("Test", e.test), ("OOD", e.ood)] {
        if let Some(iv) = iv {
            let _ = writeln!(out, "{label:<6}| ({:.3}, {:.3})", iv.low, iv.high);
        }
    }
    Some(out)
}

pub fn render_verdict(verdict: &OodVerdict) -> String {
    let decision = match verdict.decision {
        Decision::OodIndicated => "OOD indicated",
        Decision::Indistinguishable => "indistinguishable",
    };
    let evidence: Vec<String> = verdict.evidence.iter().map(|s| s.to_string()).collect();
    format!(
        "verdict: {decision} ({} vs train, margin {:.3}); separated statistics: [{}]\n",
        verdict.candidate,
        verdict.margin,
        evidence.join(", ")
    )
}

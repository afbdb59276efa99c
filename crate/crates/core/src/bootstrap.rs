//! Bootstrap distributions of diagram statistics.
//!
//! Each iteration draws `sample_size` indices with replacement, computes the
//! diagram of that subsample, and records its summaries. Iteration `i` draws
//! from a ChaCha8 stream keyed by `(master_seed, i)`, and results land in slot
//! `i`, so output does not depend on the number of worker threads.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{compute_persistence_from_distances, PersistenceConfig};
use crate::pointcloud::{distances_of_subset, PointCloud, Role};
use crate::summaries::{summarize, DiagramSummary, StatisticId};

/// Sample sizes swept by default.
pub const DEFAULT_SAMPLE_SIZES: [usize; 4] = [25, 50, 100, 150];
pub const DEFAULT_ITERATIONS: usize = 50_000;
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

/// What an iteration with no finite bars in a dimension contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmptyPolicy {
    /// Statistics of an empty diagram are zero.
    #[default]
    Zero,
    /// The iteration is left out of that dimension's distributions.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub sample_size: usize,
    pub iterations: usize,
    pub ci_level: f64,
    pub master_seed: u64,
    #[serde(flatten)]
    pub persistence: PersistenceConfig,
    pub empty_policy: EmptyPolicy,
    pub standardize: bool,
    pub statistics: Vec<StatisticId>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            sample_size: 150,
            iterations: DEFAULT_ITERATIONS,
            ci_level: DEFAULT_CI_LEVEL,
            master_seed: 0,
            persistence: PersistenceConfig::default(),
            empty_policy: EmptyPolicy::Zero,
            standardize: false,
            statistics: StatisticId::all(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::InvalidConfig("sample size must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        check_level(self.ci_level)?;
        if self.statistics.is_empty() {
            return Err(Error::InvalidConfig("no statistics selected".into()));
        }
        Ok(())
    }

    /// Differences that make two runs incomparable. Seeds are allowed to differ.
    pub fn mismatch(&self, other: &BootstrapConfig) -> Option<String> {
        let mut diffs = Vec::new();
        if self.sample_size != other.sample_size {
            diffs.push(format!("sample_size {} vs {}", self.sample_size, other.sample_size));
        }
        if self.iterations != other.iterations {
            diffs.push(format!("iterations {} vs {}", self.iterations, other.iterations));
        }
        if self.ci_level != other.ci_level {
            diffs.push(format!("ci_level {} vs {}", self.ci_level, other.ci_level));
        }
        if self.persistence.threshold != other.persistence.threshold {
            diffs.push(format!(
                "threshold {} vs {}",
                self.persistence.threshold, other.persistence.threshold
            ));
        }
        if self.persistence.include_zero_bars != other.persistence.include_zero_bars {
            diffs.push("include_zero_bars differs".into());
        }
        if self.empty_policy != other.empty_policy {
            diffs.push("empty_policy differs".into());
        }
        if self.standardize != other.standardize {
            diffs.push("standardize differs".into());
        }
        (!diffs.is_empty()).then(|| diffs.join(", "))
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "confidence level {level} must lie in (0, 1]"
        )))
    }
}

/// `n` indices uniform on `[0, population)`, determined by `(master_seed, iteration)` alone.
pub fn draw_sample(master_seed: u64, iteration: u64, population: usize, n: usize) -> Vec<usize> {
    assert!(population >= 1, "cannot sample from an empty population");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(iteration);
    (0..n).map(|_| rng.random_range(0..population)).collect()
}

/// Empirical quantile by linear interpolation between order statistics, at
/// 0-based position `(len - 1) * p` of the sorted values.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile interval `(q((1-level)/2), q(1-(1-level)/2))`.
pub fn percentile_ci(values: &[f64], level: f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    check_level(level)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((quantile_sorted(&sorted, tail), quantile_sorted(&sorted, 1.0 - tail)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticDistribution {
    pub statistic: StatisticId,
    pub values: Vec<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean: f64,
    pub std: f64,
    /// Iterations whose diagram had no finite bars in this dimension.
    pub n_empty: usize,
}

impl StatisticDistribution {
    pub fn from_values(statistic: StatisticId, values: Vec<f64>, level: f64, n_empty: usize) -> Result<Self> {
        let (ci_low, ci_high) = percentile_ci(&values, level)?;
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            statistic,
            values,
            ci_low,
            ci_high,
            mean,
            std,
            n_empty,
        })
    }

    /// Mean of the values inside the confidence interval.
    pub fn central_mean(&self) -> f64 {
        let inside: Vec<f64> = self
            .values
            .iter()
            .copied()
            .filter(|v| (self.ci_low..=self.ci_high).contains(v))
            .collect();
        if inside.is_empty() {
            return self.ci_low;
        }
        inside.iter().sum::<f64>() / inside.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutput {
    pub config: BootstrapConfig,
    pub role: Role,
    pub source: String,
    pub population: usize,
    pub distributions: Vec<StatisticDistribution>,
}

impl BootstrapOutput {
    pub fn get(&self, id: StatisticId) -> Option<&StatisticDistribution> {
        self.distributions.iter().find(|d| d.statistic == id)
    }
}

/// Hooks for long runs: a cancellation flag checked before every iteration and
/// a callback receiving the number of completed iterations.
#[derive(Default, Clone, Copy)]
pub struct RunControl<'a> {
    pub cancel: Option<&'a AtomicBool>,
    pub progress: Option<&'a (dyn Fn(usize) + Sync)>,
}

pub fn run_bootstrap(cloud: &PointCloud, config: &BootstrapConfig) -> Result<BootstrapOutput> {
    run_bootstrap_with(cloud, config, RunControl::default())
}

pub fn run_bootstrap_with(
    cloud: &PointCloud,
    config: &BootstrapConfig,
    control: RunControl<'_>,
) -> Result<BootstrapOutput> {
    config.validate()?;
    let standardized;
    let cloud = if config.standardize {
        standardized = cloud.standardized();
        &standardized
    } else {
        cloud
    };

    // fail early rather than abort mid-run if the result buffer cannot fit
    Vec::<[DiagramSummary; 2]>::new()
        .try_reserve_exact(config.iterations)
        .map_err(|e| Error::Resource(format!("bootstrap result buffer: {e}")))?;

    let done = AtomicUsize::new(0);
    let per_iteration = |i: usize| -> Result<[DiagramSummary; 2]> {
        if control.cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(Error::Cancelled);
        }
        let summaries = bootstrap_iteration(cloud, config, i as u64)?;
        if let Some(report) = control.progress {
            report(done.fetch_add(1, Ordering::Relaxed) + 1);
        }
        Ok(summaries)
    };
    let slots: Vec<[DiagramSummary; 2]> = (0..config.iterations)
        .into_par_iter()
        .map(per_iteration)
        .collect::<Result<_>>()?;

    let mut distributions = Vec::with_capacity(config.statistics.len());
    for &id in &config.statistics {
        let dim = usize::from(id.dimension);
        let mut values = Vec::new();
        values
            .try_reserve_exact(slots.len())
            .map_err(|e| Error::Resource(format!("values of {id}: {e}")))?;
        let mut n_empty = 0;
        for s in &slots {
            let summary = &s[dim];
            if summary.is_empty() {
                n_empty += 1;
                if config.empty_policy == EmptyPolicy::Skip {
                    continue;
                }
            }
            values.push(summary.get(id.kind));
        }
        let dist = StatisticDistribution::from_values(id, values, config.ci_level, n_empty).map_err(|e| match e {
            Error::EmptyValues => Error::InvalidConfig(format!(
                "every diagram was empty in dimension {dim}; use the zero empty-policy"
            )),
            other => other,
        })?;
        distributions.push(dist);
    }

    Ok(BootstrapOutput {
        config: config.clone(),
        role: cloud.role,
        source: cloud.source.clone(),
        population: cloud.len(),
        distributions,
    })
}

/// Summaries (H0, H1) of bootstrap iteration `iteration`.
pub fn bootstrap_iteration(
    cloud: &PointCloud,
    config: &BootstrapConfig,
    iteration: u64,
) -> Result<[DiagramSummary; 2]> {
    let indices = draw_sample(config.master_seed, iteration, cloud.len(), config.sample_size);
    let dm = distances_of_subset(cloud, &indices);
    let diagram = compute_persistence_from_distances(dm, &config.persistence)?;
    Ok([summarize(&diagram, 0), summarize(&diagram, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_population() {
        assert_eq!(draw_sample(9, 4, 1, 7), vec![0; 7]);
    }

    #[test]
    fn sample_is_keyed() {
        let a = draw_sample(42, 17, 1000, 150);
        assert_eq!(a, draw_sample(42, 17, 1000, 150));
        assert_ne!(a, draw_sample(42, 18, 1000, 150));
        assert_ne!(a, draw_sample(43, 17, 1000, 150));
        assert!(a.iter().all(|&i| i < 1000));
    }

    #[test]
    fn ci_one_to_hundred() {
        let values: Vec<f64> = (1..=100).map(f64::from).collect();
        let (lo, hi) = percentile_ci(&values, 0.95).unwrap();
        assert!((lo - 3.475).abs() < 1e-9, "{lo}");
        assert!((hi - 97.525).abs() < 1e-9, "{hi}");
    }

    #[test]
    fn ci_constant_and_full_range() {
        assert_eq!(percentile_ci(&[2.5; 9], 0.95).unwrap(), (2.5, 2.5));
        assert_eq!(percentile_ci(&[3.0, 1.0, 2.0], 1.0).unwrap(), (1.0, 3.0));
        assert_eq!(percentile_ci(&[4.0], 0.95).unwrap(), (4.0, 4.0));
    }

    #[test]
    fn ci_errors() {
        assert!(matches!(percentile_ci(&[], 0.95), Err(Error::EmptyValues)));
        assert!(percentile_ci(&[1.0], 0.0).is_err());
        assert!(percentile_ci(&[1.0], 1.5).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = BootstrapConfig::default();
        assert!(c.validate().is_ok());
        c.sample_size = 0;
        assert!(c.validate().is_err());
        let c = BootstrapConfig {
            iterations: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn mismatch_ignores_seed() {
        let a = BootstrapConfig::default();
        let b = BootstrapConfig {
            master_seed: 99,
            ..Default::default()
        };
        assert!(a.mismatch(&b).is_none());
        let c = BootstrapConfig {
            sample_size: 25,
            ..Default::default()
        };
        assert!(a.mismatch(&c).unwrap().contains("sample_size"));
    }

    #[test]
    fn single_iteration_degenerate_ci() {
        let cloud = PointCloud::from_rows(&[[0.0], [1.0], [3.0], [7.0]], Role::Train, "t").unwrap();
        let config = BootstrapConfig {
            sample_size: 4,
            iterations: 1,
            ..Default::default()
        };
        let out = run_bootstrap(&cloud, &config).unwrap();
        assert_eq!(out.distributions.len(), 8);
        for d in &out.distributions {
            assert_eq!(d.values.len(), 1);
            assert_eq!((d.ci_low, d.ci_high), (d.values[0], d.values[0]));
            assert_eq!(d.std, 0.0);
        }
    }

    #[test]
    fn cancellation_discards_results() {
        let cloud = PointCloud::from_rows(&[[0.0], [1.0], [3.0]], Role::Train, "t").unwrap();
        let cancel = AtomicBool::new(true);
        let config = BootstrapConfig {
            sample_size: 3,
            iterations: 10,
            ..Default::default()
        };
        let err = run_bootstrap_with(
            &cloud,
            &config,
            RunControl {
                cancel: Some(&cancel),
                progress: None,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Cancelled));
    }

    #[test]
    fn skip_policy_drops_empty_h1() {
        // three collinear points never form a loop
        let cloud = PointCloud::from_rows(&[[0.0], [1.0], [3.0]], Role::Train, "t").unwrap();
        let base = BootstrapConfig {
            sample_size: 3,
            iterations: 20,
            statistics: vec![StatisticId::H0_AVG_LIFETIME, "h1.avg_lifetime".parse().unwrap()],
            ..Default::default()
        };
        let zero = run_bootstrap(&cloud, &base).unwrap();
        let h1 = &zero.distributions[1];
        assert_eq!(h1.n_empty, 20);
        assert!(h1.values.iter().all(|&v| v == 0.0));
        let skip = BootstrapConfig {
            empty_policy: EmptyPolicy::Skip,
            ..base
        };
        assert!(run_bootstrap(&cloud, &skip).is_err());
    }

    #[test]
    fn progress_counts_every_iteration() {
        let cloud = PointCloud::from_rows(&[[0.0], [1.0], [3.0]], Role::Train, "t").unwrap();
        let seen = AtomicUsize::new(0);
        let report = |done: usize| {
            seen.fetch_max(done, Ordering::Relaxed);
        };
        let config = BootstrapConfig {
            sample_size: 3,
            iterations: 12,
            ..Default::default()
        };
        run_bootstrap_with(
            &cloud,
            &config,
            RunControl {
                cancel: None,
                progress: Some(&report),
            },
        )
        .unwrap();
        assert_eq!(seen.load(Ordering::Relaxed), 12);
    }
}
